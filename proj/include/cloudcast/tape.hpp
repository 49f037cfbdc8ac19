#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cloudcast/attention.hpp"
#include "cloudcast/dconv.hpp"
#include "cloudcast/parameters.hpp"

namespace cloudcast {

/// Handle to one D-Conv layer whose tensors live in a ParameterSet.
struct DConvLayer {
  ParameterSet::Id weight = 0;
  ParameterSet::Id bias = 0;
  DConvShape shape;
  bool apply_coord_sigmoid = true;

  static DConvLayer create(ParameterSet& params, const std::string& name, DConvShape s, bool coord_sigmoid) {
    DConvLayer layer;
    layer.shape = s;
    layer.apply_coord_sigmoid = coord_sigmoid;
    const std::size_t f = s.features();
    layer.weight = params.add(name + ".w", {s.in_channels, s.k, f, f, s.out_channels});
    layer.bias = params.add(name + ".b", {s.out_channels});
    return layer;
  }

  DConvView view(const ParameterSet& params) const {
    return {shape, params.values(weight), params.values(bias), apply_coord_sigmoid};
  }
};

struct AttentionLayer {
  ParameterSet::Id wa = 0;
  ParameterSet::Id va = 0;
  std::size_t attn_dim = 0;

  static AttentionLayer create(ParameterSet& params, const std::string& name, std::size_t attn_dim,
                               std::size_t channels, std::size_t features) {
    AttentionLayer layer;
    layer.attn_dim = attn_dim;
    layer.wa = params.add(name + ".wa", {attn_dim, 2 * channels * features});
    layer.va = params.add(name + ".va", {attn_dim});
    return layer;
  }

  AttentionView view(const ParameterSet& params) const {
    return {attn_dim, params.values(wa), params.values(va)};
  }
};

/// Reverse-mode tape over point-cloud frames.
///
/// Nodes are appended in evaluation order, so walking them backwards is a valid topological
/// order. Parameter gradients are accumulated into the optional `grads` set, which must share
/// the layout of `params`.
class Tape {
 public:
  using Var = std::size_t;

  explicit Tape(const ParameterSet& params, ParameterSet* grads = nullptr) : params_(params), grads_(grads) {
    if (grads_) params_.check_same_layout(*grads_);
  }
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  const ParameterSet& params() const noexcept { return params_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  Var constant(PointCloudFrame f) { return push(std::move(f), false, nullptr); }
  Var variable(PointCloudFrame f) { return push(std::move(f), true, nullptr); }

  const PointCloudFrame& value(Var v) const { return nodes_.at(v).value; }

  // Gradient reaching `v` after backward(); zeros if none did.
  PointCloudFrame grad(Var v) const {
    const auto& n = nodes_.at(v);
    return n.grad.shape().size() ? n.grad : PointCloudFrame(n.value.shape());
  }

  // Tables depend only on coordinates, so frames repeating earlier coordinates (decoder inputs that
  // carry the last observed positions, or a hidden state queried twice) reuse the earlier table.
  std::shared_ptr<const NeighborTable> neighbors(Var x, std::size_t k) const {
    const PointCloudFrame& f = value(x);
    std::vector<double> coords;
    coords.reserve(f.channels() * f.points() * f.coord_dim());
    for (std::size_t u = 0; u < f.channels(); ++u)
      for (std::size_t n = 0; n < f.points(); ++n)
        for (std::size_t l = 0; l < f.coord_dim(); ++l) coords.push_back(f.coord(u, n, l));
    for (const auto& e : knn_cache_)
      if (e.k == k && e.shape == f.shape() && e.coords == coords) return e.table;
    auto table = std::make_shared<const NeighborTable>(knn_neighbors(f, k));
    knn_cache_.push_back({k, f.shape(), std::move(coords), table});
    return table;
  }

  Var dconv(Var x, const DConvLayer& layer, std::shared_ptr<const NeighborTable> nbrs) {
    const DConvView view = layer.view(params_);
    PointCloudFrame out = dconv_forward_fast(value(x), view, *nbrs);
    const Var self = nodes_.size();
    return push(std::move(out), wants_grad(x) || grads_, [this, x, self, layer, nbrs] {
      const DConvView v = layer.view(params_);
      PointCloudFrame* gx = wants_grad(x) ? &grad_ref(x) : nullptr;
      std::span<double> gw, gb;
      if (grads_) {
        gw = grads_->values(layer.weight);
        gb = grads_->values(layer.bias);
      }
      dconv_backward_accumulate(value(x), v, *nbrs, value(self), nodes_[self].grad, gx, gw, gb);
    });
  }

  Var add(Var a, Var b) {
    check_same(a, b, "add");
    PointCloudFrame out = value(a);
    auto src = value(b).data();
    auto dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    const Var self = nodes_.size();
    return push(std::move(out), wants_grad(a) || wants_grad(b), [this, a, b, self] {
      accumulate(a, nodes_[self].grad.data());
      accumulate(b, nodes_[self].grad.data());
    });
  }

  Var mul(Var a, Var b) {
    check_same(a, b, "mul");
    PointCloudFrame out = value(a);
    auto src = value(b).data();
    auto dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] *= src[i];
    const Var self = nodes_.size();
    return push(std::move(out), wants_grad(a) || wants_grad(b), [this, a, b, self] {
      const auto g = nodes_[self].grad.data();
      if (wants_grad(a)) {
        auto ga = grad_ref(a).data();
        auto vb = value(b).data();
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * vb[i];
      }
      if (wants_grad(b)) {
        auto gb = grad_ref(b).data();
        auto va = value(a).data();
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * va[i];
      }
    });
  }

  // 1 - a
  Var one_minus(Var a) {
    PointCloudFrame out = value(a);
    for (double& v : out.data()) v = 1.0 - v;
    const Var self = nodes_.size();
    return push(std::move(out), wants_grad(a), [this, a, self] {
      auto g = nodes_[self].grad.data();
      auto ga = grad_ref(a).data();
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] -= g[i];
    });
  }

  Var sigmoid(Var a) {
    PointCloudFrame out = value(a);
    for (double& v : out.data()) v = cloudcast::sigmoid(v);
    const Var self = nodes_.size();
    return push(std::move(out), wants_grad(a), [this, a, self] {
      auto g = nodes_[self].grad.data();
      auto y = value(self).data();
      auto ga = grad_ref(a).data();
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
    });
  }

  Var tanh(Var a) {
    PointCloudFrame out = value(a);
    for (double& v : out.data()) v = std::tanh(v);
    const Var self = nodes_.size();
    return push(std::move(out), wants_grad(a), [this, a, self] {
      auto g = nodes_[self].grad.data();
      auto y = value(self).data();
      auto ga = grad_ref(a).data();
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
    });
  }

  // a + bias, where bias has shape (channels, features) and is shared by every point.
  Var add_bias(Var a, ParameterSet::Id bias) {
    const auto& va = value(a);
    auto b = params_.values(bias);
    if (b.size() != va.channels() * va.features())
      detail::throw_argument("add_bias: bias ", params_[bias].name, " has ", b.size(), " entries, expected ",
                             va.channels() * va.features());
    PointCloudFrame out = va;
    for (std::size_t u = 0; u < out.channels(); ++u)
      for (std::size_t n = 0; n < out.points(); ++n)
        for (std::size_t f = 0; f < out.features(); ++f) out.at(u, n, f) += b[u * out.features() + f];
    const Var self = nodes_.size();
    return push(std::move(out), wants_grad(a) || grads_, [this, a, bias, self] {
      const auto& g = nodes_[self].grad;
      accumulate(a, g.data());
      if (!grads_) return;
      auto gb = grads_->values(bias);
      for (std::size_t u = 0; u < g.channels(); ++u)
        for (std::size_t n = 0; n < g.points(); ++n)
          for (std::size_t f = 0; f < g.features(); ++f) gb[u * g.features() + f] += g.at(u, n, f);
    });
  }

  // Stacks b's channels after a's.
  Var concat_channels(Var a, Var b) {
    const auto& va = value(a);
    const auto& vb = value(b);
    if (va.points() != vb.points() || va.value_dim() != vb.value_dim() || va.coord_dim() != vb.coord_dim())
      throw ArgumentError("concat_channels: point count or feature layout differs");
    FrameShape s = va.shape();
    s.channels += vb.channels();
    std::vector<double> data(va.data().begin(), va.data().end());
    data.insert(data.end(), vb.data().begin(), vb.data().end());
    const Var self = nodes_.size();
    const std::size_t split = va.data().size();
    return push(PointCloudFrame(s, std::move(data)), wants_grad(a) || wants_grad(b), [this, a, b, self, split] {
      auto g = nodes_[self].grad.data();
      accumulate(a, g.subspan(0, split));
      accumulate(b, g.subspan(split));
    });
  }

  // Value rows from `a`, coordinate rows from the constant frame `coords` (same shape).
  Var splice_coords(Var a, const PointCloudFrame& coords) {
    const auto& va = value(a);
    if (va.shape() != coords.shape()) throw ArgumentError("splice_coords: shape mismatch");
    PointCloudFrame out = va;
    for (std::size_t u = 0; u < out.channels(); ++u)
      for (std::size_t n = 0; n < out.points(); ++n)
        for (std::size_t l = 0; l < out.coord_dim(); ++l) out.coord(u, n, l) = coords.coord(u, n, l);
    const Var self = nodes_.size();
    return push(std::move(out), wants_grad(a), [this, a, self] {
      const auto& g = nodes_[self].grad;
      auto& ga = grad_ref(a);
      for (std::size_t u = 0; u < g.channels(); ++u)
        for (std::size_t n = 0; n < g.points(); ++n)
          for (std::size_t h = 0; h < g.value_dim(); ++h) ga.value(u, n, h) += g.value(u, n, h);
    });
  }

  // Soft-attention context; optionally reports the (M, N) attention weights.
  Var attention(const std::vector<Var>& encoder, Var decoder, const AttentionLayer& layer,
                std::vector<double>* weights_out = nullptr) {
    std::vector<const PointCloudFrame*> enc;
    for (Var e : encoder) enc.push_back(&value(e));
    auto fwd = std::make_shared<AttentionResult>(attention_forward(enc, value(decoder), layer.view(params_)));
    if (weights_out) *weights_out = fwd->weights;
    bool needs = grads_ != nullptr || wants_grad(decoder);
    for (Var e : encoder) needs = needs || wants_grad(e);
    PointCloudFrame ctx = fwd->context;
    const Var self = nodes_.size();
    return push(std::move(ctx), needs, [this, encoder, decoder, layer, fwd, self] {
      std::vector<const PointCloudFrame*> enc_values;
      std::vector<PointCloudFrame*> enc_grads;
      for (Var e : encoder) {
        enc_values.push_back(&value(e));
        enc_grads.push_back(wants_grad(e) ? &grad_ref(e) : nullptr);
      }
      PointCloudFrame* gd = wants_grad(decoder) ? &grad_ref(decoder) : nullptr;
      std::span<double> gwa, gva;
      if (grads_) {
        gwa = grads_->values(layer.wa);
        gva = grads_->values(layer.va);
      }
      attention_backward_accumulate(enc_values, value(decoder), layer.view(params_), *fwd, nodes_[self].grad,
                                    enc_grads, gd, gwa, gva);
    });
  }

  // Adds `g` to the gradient of `v`; call before backward().
  void seed(Var v, const PointCloudFrame& g) {
    if (g.shape() != value(v).shape()) throw ArgumentError("seed: gradient shape mismatch");
    if (!wants_grad(v)) return;
    accumulate(v, g.data());
  }

  void backward() {
    for (std::size_t i = nodes_.size(); i-- > 0;) {
      auto& n = nodes_[i];
      if (n.backward && n.grad.shape().size()) n.backward();
    }
  }

 private:
  struct Node {
    PointCloudFrame value;
    PointCloudFrame grad;
    bool requires_grad = false;
    std::function<void()> backward;
  };

  Var push(PointCloudFrame value, bool requires_grad, std::function<void()> backward) {
    nodes_.push_back({std::move(value), PointCloudFrame(), requires_grad, requires_grad ? std::move(backward) : nullptr});
    return nodes_.size() - 1;
  }

  bool wants_grad(Var v) const { return nodes_[v].requires_grad; }

  PointCloudFrame& grad_ref(Var v) {
    auto& n = nodes_[v];
    if (!n.grad.shape().size()) n.grad = PointCloudFrame(n.value.shape());
    return n.grad;
  }

  void accumulate(Var v, std::span<const double> g) {
    if (!wants_grad(v)) return;
    auto dst = grad_ref(v).data();
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
  }

  void check_same(Var a, Var b, const char* op) const {
    if (value(a).shape() != value(b).shape())
      detail::throw_argument(op, ": shape ", to_string(value(a).shape()), " vs ", to_string(value(b).shape()));
  }

  const ParameterSet& params_;
  ParameterSet* grads_;
  std::vector<Node> nodes_;

  struct CachedTable {
    std::size_t k;
    FrameShape shape;
    std::vector<double> coords;
    std::shared_ptr<const NeighborTable> table;
  };
  mutable std::vector<CachedTable> knn_cache_;
};

}  // namespace cloudcast
