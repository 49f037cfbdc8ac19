#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cloudcast/frame.hpp"
#include "cloudcast/knn.hpp"

namespace cloudcast {

inline double sigmoid(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

struct DConvShape {
  std::size_t in_channels = 1;   // U_in
  std::size_t out_channels = 1;  // U_out
  std::size_t k = 1;             // neighbours per point, anchor included
  std::size_t value_dim = 1;     // H
  std::size_t coord_dim = 2;     // L

  std::size_t features() const noexcept { return value_dim + coord_dim; }
  std::size_t weight_count() const noexcept {
    return in_channels * k * features() * features() * out_channels;
  }

  // Flat offset of w[i][k][m][m'][j] in the (U_in, K, F, F, U_out) weight tensor.
  std::size_t weight_index(std::size_t i, std::size_t kk, std::size_t m, std::size_t mp,
                           std::size_t j) const noexcept {
    const std::size_t f = features();
    return (((i * k + kk) * f + m) * f + mp) * out_channels + j;
  }

  friend bool operator==(const DConvShape&, const DConvShape&) = default;
};

/// Read-only view of one D-Conv layer's parameters.
struct DConvView {
  DConvShape shape;
  std::span<const double> weights;  // (U_in, K, H+L, H+L, U_out)
  std::span<const double> bias;     // (U_out)
  bool apply_coord_sigmoid = true;
};

/// Owning parameters of one D-Conv layer.
struct DConvParams {
  DConvShape shape;
  std::vector<double> weights;
  std::vector<double> bias;
  bool apply_coord_sigmoid = true;

  DConvParams() = default;
  explicit DConvParams(DConvShape s, bool coord_sigmoid = true)
      : shape(s), weights(s.weight_count(), 0.0), bias(s.out_channels, 0.0),
        apply_coord_sigmoid(coord_sigmoid) {}

  double& w(std::size_t i, std::size_t k, std::size_t m, std::size_t mp, std::size_t j) {
    return weights[shape.weight_index(i, k, m, mp, j)];
  }

  DConvView view() const { return {shape, weights, bias, apply_coord_sigmoid}; }
};

// Glorot-uniform bound for a D-Conv layer.
inline double dconv_init_bound(const DConvShape& s) {
  const double fan_in = static_cast<double>(s.in_channels * s.k * s.features());
  const double fan_out = static_cast<double>(s.out_channels * s.features());
  return std::sqrt(6.0 / (fan_in + fan_out));
}

template <typename Rng>
void dconv_init(std::span<double> weights, std::span<double> bias, const DConvShape& s, Rng& rng) {
  std::uniform_real_distribution<double> dist(-dconv_init_bound(s), dconv_init_bound(s));
  for (double& w : weights) w = dist(rng);
  std::fill(bias.begin(), bias.end(), 0.0);
}

namespace detail {

inline void check_dconv_args(const PointCloudFrame& input, const DConvView& p, const NeighborTable& nbrs) {
  const auto& s = p.shape;
  if (p.weights.size() != s.weight_count())
    throw_argument("dconv: weight tensor has ", p.weights.size(), " entries, expected ", s.weight_count());
  if (p.bias.size() != s.out_channels)
    throw_argument("dconv: bias has ", p.bias.size(), " entries, expected ", s.out_channels);
  if (input.channels() != s.in_channels)
    throw_argument("dconv: input has ", input.channels(), " channels, layer expects ", s.in_channels);
  if (input.value_dim() != s.value_dim || input.coord_dim() != s.coord_dim)
    throw_argument("dconv: input feature layout H=", input.value_dim(), ",L=", input.coord_dim(),
                   " does not match layer H=", s.value_dim, ",L=", s.coord_dim);
  if (nbrs.channels() != s.in_channels || nbrs.points() != input.points() || nbrs.k() != s.k)
    throw_argument("dconv: neighbour table (", nbrs.channels(), ",", nbrs.points(), ",", nbrs.k(),
                   ") does not match input channels/points and K=", s.k);
}

inline FrameShape dconv_output_shape(const PointCloudFrame& input, const DConvShape& s) {
  return {s.out_channels, input.points(), s.value_dim, s.coord_dim};
}

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Neighbour-gathered input: row n, column (k * U_in + i) * F + m  =  x[i][nbr(i, n, k)][m].
inline RowMatrix gather_neighbors(const PointCloudFrame& input, const NeighborTable& nbrs) {
  const std::size_t f = input.features();
  const std::size_t u_in = input.channels();
  const std::size_t k = nbrs.k();
  RowMatrix g(input.points(), k * u_in * f);
  for (std::size_t n = 0; n < input.points(); ++n) {
    double* dst = g.row(n).data();
    for (std::size_t kk = 0; kk < k; ++kk)
      for (std::size_t i = 0; i < u_in; ++i) {
        auto src = input.point(i, nbrs(i, n, kk));
        std::copy(src.begin(), src.end(), dst + (kk * u_in + i) * f);
      }
  }
  return g;
}

// The 5D weight tensor laid out as a (K * U_in * F) x (U_out * F) matrix.
inline RowMatrix reshape_weights(const DConvView& p) {
  const auto& s = p.shape;
  const std::size_t f = s.features();
  RowMatrix w(s.k * s.in_channels * f, s.out_channels * f);
  for (std::size_t i = 0; i < s.in_channels; ++i)
    for (std::size_t kk = 0; kk < s.k; ++kk)
      for (std::size_t m = 0; m < f; ++m)
        for (std::size_t mp = 0; mp < f; ++mp)
          for (std::size_t j = 0; j < s.out_channels; ++j)
            w((kk * s.in_channels + i) * f + m, j * f + mp) = p.weights[s.weight_index(i, kk, m, mp, j)];
  return w;
}

}  // namespace detail

/// Reference D-Conv: direct evaluation of the weighted neighbour sum, one output scalar at a time.
inline PointCloudFrame dconv_forward_naive(const PointCloudFrame& input, const DConvView& p,
                                           const NeighborTable& nbrs) {
  detail::check_dconv_args(input, p, nbrs);
  const auto& s = p.shape;
  const std::size_t f = s.features();
  PointCloudFrame out(detail::dconv_output_shape(input, s));
  for (std::size_t j = 0; j < s.out_channels; ++j)
    for (std::size_t n = 0; n < input.points(); ++n)
      for (std::size_t mp = 0; mp < f; ++mp) {
        double acc = 0.0;
        for (std::size_t i = 0; i < s.in_channels; ++i)
          for (std::size_t kk = 0; kk < s.k; ++kk) {
            const std::size_t q = nbrs(i, n, kk);
            for (std::size_t m = 0; m < f; ++m) acc += p.weights[s.weight_index(i, kk, m, mp, j)] * input.at(i, q, m);
          }
        acc += p.bias[j];
        out.at(j, n, mp) = (p.apply_coord_sigmoid && mp >= s.value_dim) ? sigmoid(acc) : acc;
      }
  return out;
}

inline PointCloudFrame dconv_forward_naive(const PointCloudFrame& input, const DConvParams& p,
                                           const NeighborTable& nbrs) {
  return dconv_forward_naive(input, p.view(), nbrs);
}

/// D-Conv as a single matrix product: gather the neighbourhoods into an (N, K * U_in * F) map,
/// reshape the weights to (K * U_in * F, U_out * F), multiply, add the bias and squash the
/// coordinate rows. Equivalent to a stride-1 unpadded 2D convolution whose kernel spans the full
/// neighbourhood.
inline PointCloudFrame dconv_forward_fast(const PointCloudFrame& input, const DConvView& p,
                                          const NeighborTable& nbrs) {
  detail::check_dconv_args(input, p, nbrs);
  const auto& s = p.shape;
  const std::size_t f = s.features();
  const detail::RowMatrix g = detail::gather_neighbors(input, nbrs);
  const detail::RowMatrix w = detail::reshape_weights(p);
  detail::RowMatrix o = g * w;

  PointCloudFrame out(detail::dconv_output_shape(input, s));
  for (std::size_t n = 0; n < input.points(); ++n)
    for (std::size_t j = 0; j < s.out_channels; ++j)
      for (std::size_t mp = 0; mp < f; ++mp) {
        const double v = o(n, j * f + mp) + p.bias[j];
        out.at(j, n, mp) = (p.apply_coord_sigmoid && mp >= s.value_dim) ? sigmoid(v) : v;
      }
  return out;
}

inline PointCloudFrame dconv_forward_fast(const PointCloudFrame& input, const DConvParams& p,
                                          const NeighborTable& nbrs) {
  return dconv_forward_fast(input, p.view(), nbrs);
}

/// Accumulates D-Conv gradients. `output` must be the forward result for `input`; it supplies the
/// sigmoid derivative on coordinate rows. Any of the three sinks may be null/empty to skip it.
inline void dconv_backward_accumulate(const PointCloudFrame& input, const DConvView& p,
                                      const NeighborTable& nbrs, const PointCloudFrame& output,
                                      const PointCloudFrame& grad_output, PointCloudFrame* grad_input,
                                      std::span<double> grad_weights, std::span<double> grad_bias) {
  detail::check_dconv_args(input, p, nbrs);
  const auto& s = p.shape;
  const std::size_t f = s.features();
  const FrameShape out_shape = detail::dconv_output_shape(input, s);
  if (grad_output.shape() != out_shape || output.shape() != out_shape)
    detail::throw_argument("dconv_backward: grad_output shape ", to_string(grad_output.shape()),
                           " does not match forward output ", to_string(out_shape));
  if (grad_input && grad_input->shape() != input.shape())
    throw ArgumentError("dconv_backward: grad_input shape mismatch");

  const std::size_t n_points = input.points();
  detail::RowMatrix d_pre(n_points, s.out_channels * f);
  for (std::size_t n = 0; n < n_points; ++n)
    for (std::size_t j = 0; j < s.out_channels; ++j)
      for (std::size_t mp = 0; mp < f; ++mp) {
        double g = grad_output.at(j, n, mp);
        if (p.apply_coord_sigmoid && mp >= s.value_dim) {
          const double y = output.at(j, n, mp);
          g *= y * (1.0 - y);
        }
        d_pre(n, j * f + mp) = g;
      }

  if (!grad_bias.empty()) {
    for (std::size_t j = 0; j < s.out_channels; ++j)
      grad_bias[j] += d_pre.middleCols(j * f, f).sum();
  }

  const detail::RowMatrix g = detail::gather_neighbors(input, nbrs);
  if (!grad_weights.empty()) {
    const detail::RowMatrix dw = g.transpose() * d_pre;
    for (std::size_t i = 0; i < s.in_channels; ++i)
      for (std::size_t kk = 0; kk < s.k; ++kk)
        for (std::size_t m = 0; m < f; ++m)
          for (std::size_t mp = 0; mp < f; ++mp)
            for (std::size_t j = 0; j < s.out_channels; ++j)
              grad_weights[s.weight_index(i, kk, m, mp, j)] += dw((kk * s.in_channels + i) * f + m, j * f + mp);
  }

  if (grad_input) {
    const detail::RowMatrix dg = d_pre * detail::reshape_weights(p).transpose();
    for (std::size_t n = 0; n < n_points; ++n)
      for (std::size_t kk = 0; kk < s.k; ++kk)
        for (std::size_t i = 0; i < s.in_channels; ++i) {
          auto dst = grad_input->point(i, nbrs(i, n, kk));
          const double* src = dg.row(n).data() + (kk * s.in_channels + i) * f;
          for (std::size_t m = 0; m < f; ++m) dst[m] += src[m];
        }
  }
}

struct DConvGradients {
  PointCloudFrame input;
  std::vector<double> weights;
  std::vector<double> bias;
};

/// Analytic gradients of the D-Conv output with respect to its input, weights and bias, holding
/// the neighbour selection fixed.
inline DConvGradients dconv_backward(const PointCloudFrame& input, const DConvView& p,
                                     const NeighborTable& nbrs, const PointCloudFrame& grad_output) {
  const PointCloudFrame output = dconv_forward_fast(input, p, nbrs);
  DConvGradients grads{PointCloudFrame(input.shape()), std::vector<double>(p.shape.weight_count(), 0.0),
                       std::vector<double>(p.shape.out_channels, 0.0)};
  dconv_backward_accumulate(input, p, nbrs, output, grad_output, &grads.input, grads.weights, grads.bias);
  return grads;
}

inline DConvGradients dconv_backward(const PointCloudFrame& input, const DConvParams& p,
                                     const NeighborTable& nbrs, const PointCloudFrame& grad_output) {
  return dconv_backward(input, p.view(), nbrs, grad_output);
}

/// Multiply-accumulate cost model of one D-Conv layer.
struct DConvCost {
  std::uint64_t weighting = 0;  // U_in * U_out * N * K * (H+L)^2
  std::uint64_t distance = 0;   // U_in * L * N^2 for the pairwise distances

  std::uint64_t total() const noexcept { return weighting + distance; }
};

inline DConvCost dconv_cost(std::uint64_t n, std::uint64_t k, std::uint64_t h, std::uint64_t l,
                            std::uint64_t u_in, std::uint64_t u_out) {
  const std::uint64_t f = h + l;
  return {u_in * u_out * n * k * f * f, u_in * l * n * n};
}

inline std::uint64_t dconv_flops(std::uint64_t n, std::uint64_t k, std::uint64_t h, std::uint64_t l,
                                 std::uint64_t u_in, std::uint64_t u_out) {
  return dconv_cost(n, k, h, l, u_in, u_out).total();
}

}  // namespace cloudcast
