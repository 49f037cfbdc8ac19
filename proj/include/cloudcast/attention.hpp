#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "cloudcast/frame.hpp"

namespace cloudcast {

/// Numerically stable softmax.
inline std::vector<double> softmax(std::span<const double> scores) {
  if (scores.empty()) throw ArgumentError("softmax of an empty score list");
  const double top = *std::max_element(scores.begin(), scores.end());
  std::vector<double> out(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) total += out[i] = std::exp(scores[i] - top);
  for (double& v : out) v /= total;
  return out;
}

struct AttentionView {
  std::size_t attn_dim = 0;
  std::span<const double> wa;  // (attn_dim, 2 * C * F), row-major
  std::span<const double> va;  // (attn_dim)
};

/// Score projection for soft attention over point-cloud hidden states.
///
/// For every point n and encoder step j the score is
///   e[j][n] = va . tanh(Wa [H_en^j(:, n, :) ; H_de(:, n, :)])
/// with the same Wa, va at every point. Weights are a softmax over j per point and the context is
/// the weighted sum of encoder states.
struct AttentionParams {
  std::size_t attn_dim = 0;
  std::vector<double> wa;
  std::vector<double> va;

  AttentionParams() = default;
  AttentionParams(std::size_t dim, std::size_t channels, std::size_t features)
      : attn_dim(dim), wa(dim * 2 * channels * features, 0.0), va(dim, 0.0) {}

  AttentionView view() const { return {attn_dim, wa, va}; }
};

struct AttentionResult {
  PointCloudFrame context;
  std::vector<double> weights;    // (M, N): weights[j * N + n]
  std::vector<double> activations;  // (M, N, attn_dim): tanh of the projection, kept for backward
};

namespace detail {

inline void check_attention_args(std::span<const PointCloudFrame* const> encoder, const PointCloudFrame& decoder,
                                 const AttentionView& p) {
  if (encoder.empty()) throw ArgumentError("attention: encoder state list is empty");
  for (const auto* e : encoder)
    if (e->shape() != decoder.shape())
      throw_argument("attention: encoder state shape ", to_string(e->shape()),
                     " differs from decoder state ", to_string(decoder.shape()));
  const std::size_t width = 2 * decoder.channels() * decoder.features();
  if (p.wa.size() != p.attn_dim * width || p.va.size() != p.attn_dim)
    throw_argument("attention: parameters sized for a different hidden layout (Wa ", p.wa.size(),
                   ", expected ", p.attn_dim * width, ")");
}

// Concatenation [enc(:, n, :) ; dec(:, n, :)] flattened channel-major.
inline void attention_features(const PointCloudFrame& enc, const PointCloudFrame& dec, std::size_t n,
                               std::vector<double>& z) {
  const std::size_t cf = dec.channels() * dec.features();
  z.resize(2 * cf);
  for (std::size_t c = 0; c < dec.channels(); ++c) {
    auto a = enc.point(c, n);
    auto b = dec.point(c, n);
    std::copy(a.begin(), a.end(), z.begin() + c * dec.features());
    std::copy(b.begin(), b.end(), z.begin() + cf + c * dec.features());
  }
}

}  // namespace detail

inline AttentionResult attention_forward(std::span<const PointCloudFrame* const> encoder,
                                         const PointCloudFrame& decoder, const AttentionView& p) {
  detail::check_attention_args(encoder, decoder, p);
  const std::size_t steps = encoder.size();
  const std::size_t n_points = decoder.points();
  const std::size_t width = 2 * decoder.channels() * decoder.features();

  AttentionResult r{PointCloudFrame(decoder.shape()), std::vector<double>(steps * n_points),
                    std::vector<double>(steps * n_points * p.attn_dim)};
  std::vector<double> z;
  std::vector<double> scores(steps);
  for (std::size_t n = 0; n < n_points; ++n) {
    for (std::size_t j = 0; j < steps; ++j) {
      detail::attention_features(*encoder[j], decoder, n, z);
      double e = 0.0;
      for (std::size_t a = 0; a < p.attn_dim; ++a) {
        double s = 0.0;
        for (std::size_t q = 0; q < width; ++q) s += p.wa[a * width + q] * z[q];
        const double t = std::tanh(s);
        r.activations[(j * n_points + n) * p.attn_dim + a] = t;
        e += p.va[a] * t;
      }
      scores[j] = e;
    }
    const auto w = softmax(scores);
    for (std::size_t j = 0; j < steps; ++j) {
      r.weights[j * n_points + n] = w[j];
      for (std::size_t c = 0; c < decoder.channels(); ++c) {
        auto src = encoder[j]->point(c, n);
        auto dst = r.context.point(c, n);
        for (std::size_t f = 0; f < dst.size(); ++f) dst[f] += w[j] * src[f];
      }
    }
  }
  return r;
}

/// Context tensor for one decoder state.
inline PointCloudFrame attention_context(std::span<const PointCloudFrame> encoder_states,
                                         const PointCloudFrame& decoder_state, const AttentionParams& p) {
  std::vector<const PointCloudFrame*> ptrs;
  for (const auto& e : encoder_states) ptrs.push_back(&e);
  if (ptrs.empty()) throw ArgumentError("attention: encoder state list is empty");
  return attention_forward(ptrs, decoder_state, p.view()).context;
}

/// Accumulates gradients of the attention context. `grad_encoder` may hold null entries and
/// `grad_decoder` may be null for inputs that need no gradient.
inline void attention_backward_accumulate(std::span<const PointCloudFrame* const> encoder,
                                          const PointCloudFrame& decoder, const AttentionView& p,
                                          const AttentionResult& fwd, const PointCloudFrame& grad_context,
                                          std::span<PointCloudFrame* const> grad_encoder,
                                          PointCloudFrame* grad_decoder, std::span<double> grad_wa,
                                          std::span<double> grad_va) {
  const std::size_t steps = encoder.size();
  const std::size_t n_points = decoder.points();
  const std::size_t cf = decoder.channels() * decoder.features();
  const std::size_t width = 2 * cf;

  std::vector<double> z;
  std::vector<double> d_weight(steps);
  std::vector<double> d_s(p.attn_dim);
  std::vector<double> d_z(width);
  for (std::size_t n = 0; n < n_points; ++n) {
    double mean_dw = 0.0;
    for (std::size_t j = 0; j < steps; ++j) {
      const double w = fwd.weights[j * n_points + n];
      double acc = 0.0;
      for (std::size_t c = 0; c < decoder.channels(); ++c) {
        auto g = grad_context.point(c, n);
        auto e = encoder[j]->point(c, n);
        for (std::size_t f = 0; f < g.size(); ++f) acc += g[f] * e[f];
        if (grad_encoder[j]) {
          auto ge = grad_encoder[j]->point(c, n);
          for (std::size_t f = 0; f < g.size(); ++f) ge[f] += w * g[f];
        }
      }
      d_weight[j] = acc;
      mean_dw += w * acc;
    }
    for (std::size_t j = 0; j < steps; ++j) {
      const double d_score = fwd.weights[j * n_points + n] * (d_weight[j] - mean_dw);
      if (d_score == 0.0) continue;
      const double* t = fwd.activations.data() + (j * n_points + n) * p.attn_dim;
      for (std::size_t a = 0; a < p.attn_dim; ++a) {
        if (!grad_va.empty()) grad_va[a] += d_score * t[a];
        d_s[a] = d_score * p.va[a] * (1.0 - t[a] * t[a]);
      }
      detail::attention_features(*encoder[j], decoder, n, z);
      std::fill(d_z.begin(), d_z.end(), 0.0);
      for (std::size_t a = 0; a < p.attn_dim; ++a) {
        const double* row = p.wa.data() + a * width;
        for (std::size_t q = 0; q < width; ++q) {
          if (!grad_wa.empty()) grad_wa[a * width + q] += d_s[a] * z[q];
          d_z[q] += d_s[a] * row[q];
        }
      }
      for (std::size_t c = 0; c < decoder.channels(); ++c) {
        const std::size_t base = c * decoder.features();
        if (grad_encoder[j]) {
          auto ge = grad_encoder[j]->point(c, n);
          for (std::size_t f = 0; f < ge.size(); ++f) ge[f] += d_z[base + f];
        }
        if (grad_decoder) {
          auto gd = grad_decoder->point(c, n);
          for (std::size_t f = 0; f < gd.size(); ++f) gd[f] += d_z[cf + base + f];
        }
      }
    }
  }
}

}  // namespace cloudcast
