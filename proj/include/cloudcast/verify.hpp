#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cloudcast/training.hpp"

namespace cloudcast {

// Seeded finite-difference checks used by `cloudcast gradcheck` and the test suite.

struct GradCheckCase {
  std::string name;
  GradCheckReport report;
  double tolerance = 0.0;

  bool passed() const { return report.passed(tolerance); }
};

inline constexpr double kDConvGradTolerance = 1e-4;
inline constexpr double kModelGradTolerance = 1e-3;

// Frame with uniform values in [-1, 1] and uniform coordinates in [0, 1].
inline PointCloudFrame random_frame(const FrameShape& shape, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  PointCloudFrame f(shape);
  for (std::size_t u = 0; u < shape.channels; ++u)
    for (std::size_t n = 0; n < shape.points; ++n) {
      for (std::size_t h = 0; h < shape.value_dim; ++h) f.value(u, n, h) = value(rng);
      for (std::size_t l = 0; l < shape.coord_dim; ++l) f.coord(u, n, l) = coord(rng);
    }
  return f;
}

/// D-Conv in isolation: the scalar loss sum(out * R) for a fixed random R, differentiated with
/// respect to input, weights and bias. Neighbours are computed once from the unperturbed input.
inline GradCheckCase dconv_grad_check(std::uint64_t seed, bool coord_sigmoid, double step = 1e-5) {
  std::mt19937_64 rng(seed);
  const DConvShape s{2, 3, 3, 1, 2};
  const FrameShape in_shape{s.in_channels, 6, s.value_dim, s.coord_dim};
  const PointCloudFrame x0 = random_frame(in_shape, rng);
  const NeighborTable nbrs = knn_neighbors(x0, s.k);
  DConvParams p0(s);
  dconv_init(p0.weights, p0.bias, s, rng);
  std::uniform_real_distribution<double> jitter(-0.5, 0.5);
  for (double& b : p0.bias) b = jitter(rng);
  const PointCloudFrame r = random_frame({s.out_channels, in_shape.points, s.value_dim, s.coord_dim}, rng);

  ParameterSet params;
  const auto ix = params.add("x", {in_shape.channels, in_shape.points, in_shape.features()});
  const auto iw = params.add("w", {s.in_channels, s.k, s.features(), s.features(), s.out_channels});
  const auto ib = params.add("b", {s.out_channels});
  std::copy(x0.data().begin(), x0.data().end(), params.values(ix).begin());
  std::copy(p0.weights.begin(), p0.weights.end(), params.values(iw).begin());
  std::copy(p0.bias.begin(), p0.bias.end(), params.values(ib).begin());

  auto unpack = [&](const ParameterSet& ps) {
    PointCloudFrame x(in_shape, {ps.values(ix).begin(), ps.values(ix).end()});
    DConvView view{s, ps.values(iw), ps.values(ib), coord_sigmoid};
    return std::pair{std::move(x), view};
  };
  auto loss = [&](const ParameterSet& ps) {
    const auto [x, view] = unpack(ps);
    const auto out = dconv_forward_fast(x, view, nbrs);
    double acc = 0.0;
    for (std::size_t i = 0; i < out.data().size(); ++i) acc += out.data()[i] * r.data()[i];
    return acc;
  };

  ParameterSet analytic = params.zeros_like();
  {
    const auto [x, view] = unpack(params);
    const auto out = dconv_forward_fast(x, view, nbrs);
    PointCloudFrame gx(in_shape);
    dconv_backward_accumulate(x, view, nbrs, out, r, &gx, analytic.values(iw), analytic.values(ib));
    std::copy(gx.data().begin(), gx.data().end(), analytic.values(ix).begin());
  }
  return {coord_sigmoid ? "dconv (coordinate sigmoid)" : "dconv (linear)", grad_check(params, analytic, loss, step),
          kDConvGradTolerance};
}

// The tiny end-to-end configuration: N=4, M=J=2, two hidden channels.
inline ModelSpec tiny_model_spec(CellKind kind, bool attention) {
  ModelSpec spec;
  spec.cell_kind = kind;
  spec.attention = attention;
  spec.stacks = 2;
  spec.channels = 2;
  spec.k = 3;
  spec.embed_k = 3;
  spec.input_len = 2;
  spec.output_len = 2;
  spec.data_channels = 1;
  return spec;
}

/// Whole seq2seq model on one random window of the tiny configuration, with and without teacher
/// forcing folded into one loss.
inline GradCheckCase model_grad_check(const ModelSpec& spec, std::uint64_t seed, double step = 1e-5) {
  std::mt19937_64 rng(seed);
  const FrameShape shape{spec.data_channels, 4, spec.value_dim, spec.coord_dim};
  std::vector<PointCloudFrame> window;
  for (std::size_t t = 0; t < spec.input_len + spec.output_len; ++t) window.push_back(random_frame(shape, rng));

  Seq2SeqModel model = Seq2SeqModel::create(spec, seed);
  ParameterSet params = model.params();
  auto loss_with = [&](const ParameterSet& ps, ParameterSet* grads) {
    Seq2SeqModel m = model;
    m.set_params(ps);
    return window_loss(m, window, true, grads) + window_loss(m, window, false, grads);
  };
  ParameterSet analytic = params.zeros_like();
  loss_with(params, &analytic);
  auto report = grad_check(params, analytic, [&](const ParameterSet& ps) { return loss_with(ps, nullptr); }, step);
  return {"model " + spec.name(), report, kModelGradTolerance};
}

/// Every check run by `cloudcast gradcheck`.
inline std::vector<GradCheckCase> gradcheck_suite(std::uint64_t seed) {
  std::vector<GradCheckCase> cases;
  cases.push_back(dconv_grad_check(seed, false));
  cases.push_back(dconv_grad_check(seed, true));
  for (auto kind : {CellKind::rnn, CellKind::gru, CellKind::lstm})
    cases.push_back(model_grad_check(tiny_model_spec(kind, false), seed));
  cases.push_back(model_grad_check(tiny_model_spec(CellKind::lstm, true), seed));
  return cases;
}

}  // namespace cloudcast
