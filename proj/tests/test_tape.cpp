#include "test_util.hpp"

namespace cloudcast {
namespace {

// Builds a small graph exercising every tape op and checks d(sum(out * R)) against central
// differences, for both the leaf frames and the parameters.
struct Graph {
  ParameterSet params;
  DConvLayer lin, sig, combine;
  AttentionLayer attn;
  ParameterSet::Id bias = 0;
  PointCloudFrame x0, x1, r;
  FrameShape shape{2, 6, 1, 2};

  explicit Graph(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    lin = DConvLayer::create(params, "lin", {2, 2, 3, 1, 2}, false);
    sig = DConvLayer::create(params, "sig", {2, 2, 2, 1, 2}, true);
    combine = DConvLayer::create(params, "combine", {4, 2, 1, 1, 2}, true);
    attn = AttentionLayer::create(params, "attn", 3, 2, 3);
    bias = params.add("bias", {2, 3});
    testing::fill_uniform(params, -0.7, 0.7, rng);
    x0 = random_frame(shape, rng);
    x1 = random_frame(shape, rng);
    r = random_frame(shape, rng);
  }

  // Returns the scalar loss; when `tape_out` is given leaves are variables and gradients flow.
  double run(const ParameterSet& ps, const PointCloudFrame& a, const PointCloudFrame& b, ParameterSet* grads,
             PointCloudFrame* ga, PointCloudFrame* gb) const {
    Tape t(ps, grads);
    const auto va = t.variable(a);
    const auto vb = t.variable(b);
    // Neighbour tables from the unperturbed inputs so finite differences see a smooth map.
    const auto na = std::make_shared<const NeighborTable>(knn_neighbors(x0, 3));
    const auto nb = std::make_shared<const NeighborTable>(knn_neighbors(x1, 2));
    const auto p = t.dconv(va, lin, na);
    const auto q = t.sigmoid(t.add_bias(t.dconv(vb, sig, nb), bias));
    const auto m = t.mul(t.tanh(p), t.one_minus(q));
    const auto s = t.add(m, va);
    const auto ctx = t.attention({va, vb, s}, q, attn);
    const auto joined = t.concat_channels(s, ctx);
    const auto out = t.splice_coords(
        t.dconv(joined, combine, std::make_shared<const NeighborTable>(NeighborTable::identity(4, 6))), x1);
    const auto& v = t.value(out);
    double loss = 0.0;
    for (std::size_t i = 0; i < v.data().size(); ++i) loss += v.data()[i] * r.data()[i];
    if (grads || ga) {
      t.seed(out, r);
      t.backward();
      if (ga) *ga = t.grad(va);
      if (gb) *gb = t.grad(vb);
    }
    return loss;
  }
};

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6}); }

TEST(Tape, AllOpsMatchFiniteDifferences) {
  const Graph g(21);
  ParameterSet ps = g.params;
  ParameterSet grads = ps.zeros_like();
  PointCloudFrame ga, gb;
  g.run(ps, g.x0, g.x1, &grads, &ga, &gb);

  const double h = 1e-6;
  for (std::size_t id = 0; id < ps.size(); ++id)
    for (std::size_t i = 0; i < ps.values(id).size(); ++i) {
      double& v = ps.values(id)[i];
      const double saved = v;
      v = saved + h;
      const double up = g.run(ps, g.x0, g.x1, nullptr, nullptr, nullptr);
      v = saved - h;
      const double down = g.run(ps, g.x0, g.x1, nullptr, nullptr, nullptr);
      v = saved;
      EXPECT_LT(rel(grads.values(id)[i], (up - down) / (2 * h)), 1e-5) << ps[id].name << "[" << i << "]";
    }
  for (int which = 0; which < 2; ++which) {
    PointCloudFrame a = g.x0, b = g.x1;
    PointCloudFrame& leaf = which == 0 ? a : b;
    const PointCloudFrame& analytic = which == 0 ? ga : gb;
    for (std::size_t i = 0; i < leaf.storage().size(); ++i) {
      const double saved = leaf.storage()[i];
      leaf.storage()[i] = saved + h;
      const double up = g.run(ps, a, b, nullptr, nullptr, nullptr);
      leaf.storage()[i] = saved - h;
      const double down = g.run(ps, a, b, nullptr, nullptr, nullptr);
      leaf.storage()[i] = saved;
      EXPECT_LT(rel(analytic.data()[i], (up - down) / (2 * h)), 1e-5) << "leaf " << which << " [" << i << "]";
    }
  }
}

TEST(Tape, ConstantsReceiveNoGradient) {
  ParameterSet ps;
  Tape t(ps);
  PointCloudFrame f({1, 2, 1, 1});
  const auto c = t.constant(f);
  const auto s = t.sigmoid(c);
  t.seed(s, PointCloudFrame({1, 2, 1, 1}, {1, 1, 1, 1}));
  t.backward();
  const auto g = t.grad(c);
  for (double v : g.data()) EXPECT_EQ(v, 0.0);
}

TEST(Tape, GradientsAccumulateOverReuse) {
  ParameterSet ps;
  Tape t(ps);
  PointCloudFrame f({1, 1, 1, 0}, {3.0});
  const auto x = t.variable(f);
  const auto y = t.mul(x, x);  // x^2
  const auto z = t.add(y, x);  // x^2 + x
  t.seed(z, PointCloudFrame({1, 1, 1, 0}, {1.0}));
  t.backward();
  EXPECT_DOUBLE_EQ(t.grad(x).data()[0], 7.0);
}

TEST(Tape, ShapeChecks) {
  ParameterSet ps;
  const auto b = ps.add("b", {2, 3});
  Tape t(ps);
  const auto x = t.constant(PointCloudFrame({1, 2, 1, 2}));
  const auto y = t.constant(PointCloudFrame({1, 3, 1, 2}));
  EXPECT_THROW(t.add(x, y), ArgumentError);
  EXPECT_THROW(t.mul(x, y), ArgumentError);
  EXPECT_THROW(t.add_bias(x, b), ArgumentError);
  EXPECT_THROW(t.concat_channels(x, y), ArgumentError);
  EXPECT_THROW(t.splice_coords(x, PointCloudFrame({1, 3, 1, 2})), ArgumentError);
}

TEST(ParameterSetTest, LayoutAndArithmetic) {
  ParameterSet a;
  a.add("w", {2, 3});
  a.add("b", {2});
  EXPECT_THROW(a.add("w", {1}), ArgumentError);
  EXPECT_EQ(a.scalar_count(), 8u);
  ASSERT_TRUE(a.find("b").has_value());
  EXPECT_FALSE(a.find("nope").has_value());
  a.fill(2.0);
  ParameterSet b = a.zeros_like();
  b.fill(1.0);
  a.add_scaled(b, 0.5);
  a.scale(2.0);
  for (std::size_t id = 0; id < a.size(); ++id)
    for (double v : a.values(id)) EXPECT_EQ(v, 5.0);
  ParameterSet other;
  other.add("w", {3, 2});
  other.add("b", {2});
  EXPECT_THROW(a.check_same_layout(other), ArgumentError);
}

}  // namespace
}  // namespace cloudcast
