#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "cloudcast/dconv.hpp"
#include "cloudcast/verify.hpp"

namespace cloudcast {

struct ScalingConfig {
  std::vector<std::size_t> sizes{64, 128, 256, 512};
  std::size_t k = 9;
  std::size_t channels = 4;  // U_in = U_out
  std::size_t value_dim = 1;
  std::size_t coord_dim = 2;
  std::size_t trials = 5;
  double min_trial_seconds = 0.02;
  std::uint64_t seed = 1;
};

struct ScalingRow {
  std::size_t points = 0;
  double knn_seconds = 0.0;      // one knn_neighbors call
  double dconv_seconds = 0.0;    // one dconv_forward_fast call
  double dconv_weighting = 0.0;  // U_in * U_out * N * K * (H+L)^2
  double dconv_flops = 0.0;      // weighting plus distance terms
  double knn_pairs = 0.0;        // U * N^2
};

// Best-of-trials mean seconds per call; each trial repeats `fn` until it has run for at least
// `min_seconds`.
template <class Fn>
double time_per_call(Fn&& fn, std::size_t trials, double min_seconds) {
  using clock = std::chrono::steady_clock;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    std::size_t calls = 0;
    const auto start = clock::now();
    double elapsed = 0.0;
    do {
      fn();
      ++calls;
      elapsed = std::chrono::duration<double>(clock::now() - start).count();
    } while (elapsed < min_seconds);
    best = std::min(best, elapsed / static_cast<double>(calls));
  }
  return best;
}

inline std::vector<ScalingRow> measure_scaling(const ScalingConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::vector<ScalingRow> rows;
  for (const std::size_t n : cfg.sizes) {
    const FrameShape shape{cfg.channels, n, cfg.value_dim, cfg.coord_dim};
    const PointCloudFrame x = random_frame(shape, rng);
    const DConvShape s{cfg.channels, cfg.channels, cfg.k, cfg.value_dim, cfg.coord_dim};
    DConvParams p(s);
    dconv_init(p.weights, p.bias, s, rng);
    const NeighborTable nbrs = knn_neighbors(x, cfg.k);

    ScalingRow row;
    row.points = n;
    volatile std::uint32_t sink = 0;
    row.knn_seconds = time_per_call([&] { sink = sink + knn_neighbors(x, cfg.k)(0, 0, 0); }, cfg.trials,
                                    cfg.min_trial_seconds);
    volatile double dsink = 0.0;
    row.dconv_seconds = time_per_call([&] { dsink = dsink + dconv_forward_fast(x, p, nbrs).at(0, 0, 0); }, cfg.trials,
                                      cfg.min_trial_seconds);
    const auto cost = dconv_cost(n, cfg.k, cfg.value_dim, cfg.coord_dim, cfg.channels, cfg.channels);
    row.dconv_weighting = static_cast<double>(cost.weighting);
    row.dconv_flops = static_cast<double>(cost.total());
    row.knn_pairs = static_cast<double>(cfg.channels) * static_cast<double>(n) * static_cast<double>(n);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace cloudcast
