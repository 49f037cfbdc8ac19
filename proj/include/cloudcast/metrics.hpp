#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "cloudcast/frame.hpp"

namespace cloudcast {

// SSIM stabilisers for float data with dynamic range 2.
inline constexpr double kSsimDynamicRange = 2.0;
inline constexpr double kSsimK1 = 0.1;
inline constexpr double kSsimK2 = 0.3;
inline constexpr double kSsimC1 = (kSsimK1 * kSsimDynamicRange) * (kSsimK1 * kSsimDynamicRange);
inline constexpr double kSsimC2 = (kSsimK2 * kSsimDynamicRange) * (kSsimK2 * kSsimDynamicRange);

// Reported for a perfect forecast.
inline constexpr double kPsnrPerfect = std::numeric_limits<double>::infinity();

struct MetricValues {
  double mae = 0.0;
  double rmse = 0.0;
  double psnr = 0.0;
  double ssim = 1.0;
};

/// MAE / RMSE / PSNR / SSIM over forecast value features (coordinates are ignored).
///
/// Every metric is computed per forecast step over all services (channels x value features) and
/// points, then averaged over steps and, for a test set, over forecast instances. `*_std` fields
/// give the standard deviation across instances.
struct MetricReport {
  double mae = 0.0;
  double rmse = 0.0;
  double psnr = 0.0;
  double ssim = 1.0;
  double mae_std = 0.0;
  double rmse_std = 0.0;
  double psnr_std = 0.0;
  double ssim_std = 0.0;
  double v_max = 0.0;  // peak truth value used for PSNR
  std::size_t instances = 0;
  std::vector<MetricValues> per_step;
  // Per channel; PSNR here uses that channel's own peak value.
  std::vector<MetricValues> per_service;
};

namespace detail {

struct SnapshotStats {
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  std::size_t count = 0;
  double mean_x = 0.0, mean_y = 0.0, var_x = 0.0, var_y = 0.0, cov = 0.0;
};

// Error and second-order moments of the value features of `pred` vs `truth`; `channel` < 0 means
// all channels.
inline SnapshotStats snapshot_stats(const PointCloudFrame& pred, const PointCloudFrame& truth, long channel = -1) {
  SnapshotStats s;
  const std::size_t u0 = channel < 0 ? 0 : static_cast<std::size_t>(channel);
  const std::size_t u1 = channel < 0 ? truth.channels() : u0 + 1;
  for (std::size_t u = u0; u < u1; ++u)
    for (std::size_t n = 0; n < truth.points(); ++n)
      for (std::size_t h = 0; h < truth.value_dim(); ++h) {
        const double y = pred.value(u, n, h);
        const double x = truth.value(u, n, h);
        s.abs_sum += std::abs(y - x);
        s.sq_sum += (y - x) * (y - x);
        s.mean_x += x;
        s.mean_y += y;
        ++s.count;
      }
  const double c = static_cast<double>(s.count);
  s.mean_x /= c;
  s.mean_y /= c;
  for (std::size_t u = u0; u < u1; ++u)
    for (std::size_t n = 0; n < truth.points(); ++n)
      for (std::size_t h = 0; h < truth.value_dim(); ++h) {
        const double dx = truth.value(u, n, h) - s.mean_x;
        const double dy = pred.value(u, n, h) - s.mean_y;
        s.var_x += dx * dx;
        s.var_y += dy * dy;
        s.cov += dx * dy;
      }
  s.var_x /= c;
  s.var_y /= c;
  s.cov /= c;
  return s;
}

inline MetricValues snapshot_metrics(const SnapshotStats& s, double v_max) {
  const double c = static_cast<double>(s.count);
  const double mse = s.sq_sum / c;
  MetricValues m;
  m.mae = s.abs_sum / c;
  m.rmse = std::sqrt(mse);
  m.psnr = mse > 0.0 ? 20.0 * std::log10(v_max) - 10.0 * std::log10(mse) : kPsnrPerfect;
  m.ssim = ((2.0 * s.mean_x * s.mean_y + kSsimC1) * (2.0 * s.cov + kSsimC2)) /
           ((s.mean_x * s.mean_x + s.mean_y * s.mean_y + kSsimC1) * (s.var_x + s.var_y + kSsimC2));
  return m;
}

inline double peak_value(const PointCloudFrame& f, long channel = -1) {
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t u = 0; u < f.channels(); ++u) {
    if (channel >= 0 && u != static_cast<std::size_t>(channel)) continue;
    for (std::size_t n = 0; n < f.points(); ++n)
      for (std::size_t h = 0; h < f.value_dim(); ++h) peak = std::max(peak, f.value(u, n, h));
  }
  return peak;
}

struct Accumulator {
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  void add(double v) {
    sum += v;
    sq += v * v;
    ++n;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
  double stddev() const {
    if (n == 0) return 0.0;
    const double m = mean();
    if (!std::isfinite(m)) return 0.0;
    return std::sqrt(std::max(0.0, sq / static_cast<double>(n) - m * m));
  }
};

}  // namespace detail

/// Scores a set of forecasts against their ground truth. PSNR uses the peak value over every
/// truth frame passed in.
inline MetricReport evaluate(std::span<const StreamSequence> preds, std::span<const StreamSequence> truths) {
  if (preds.size() != truths.size() || preds.empty())
    detail::throw_argument("evaluate: ", preds.size(), " forecasts vs ", truths.size(), " ground truths");
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].size() != truths[i].size() || preds[i].empty())
      detail::throw_argument("evaluate: instance ", i, " has ", preds[i].size(), " predicted vs ", truths[i].size(),
                             " true steps");
    for (std::size_t t = 0; t < preds[i].size(); ++t)
      if (preds[i].frames[t].shape() != truths[i].frames[t].shape() ||
          truths[i].frames[t].shape() != truths[0].frames[0].shape())
        detail::throw_argument("evaluate: shape mismatch in instance ", i, " step ", t);
  }

  const std::size_t steps = truths[0].size();
  const std::size_t channels = truths[0].frames[0].channels();
  for (const auto& t : truths)
    if (t.size() != steps) throw ArgumentError("evaluate: instances differ in forecast length");

  double v_max = -std::numeric_limits<double>::infinity();
  std::vector<double> channel_peak(channels, -std::numeric_limits<double>::infinity());
  for (const auto& seq : truths)
    for (const auto& f : seq.frames) {
      v_max = std::max(v_max, detail::peak_value(f));
      for (std::size_t u = 0; u < channels; ++u)
        channel_peak[u] = std::max(channel_peak[u], detail::peak_value(f, static_cast<long>(u)));
    }

  MetricReport r;
  r.v_max = v_max;
  r.instances = preds.size();
  std::vector<std::array<detail::Accumulator, 4>> step_acc(steps);
  std::vector<std::array<detail::Accumulator, 4>> chan_acc(channels);
  std::array<detail::Accumulator, 4> inst_acc;

  for (std::size_t i = 0; i < preds.size(); ++i) {
    std::array<detail::Accumulator, 4> this_instance;
    for (std::size_t t = 0; t < steps; ++t) {
      const auto m = detail::snapshot_metrics(detail::snapshot_stats(preds[i].frames[t], truths[i].frames[t]), v_max);
      const double vals[4] = {m.mae, m.rmse, m.psnr, m.ssim};
      for (int q = 0; q < 4; ++q) {
        step_acc[t][q].add(vals[q]);
        this_instance[q].add(vals[q]);
      }
      for (std::size_t u = 0; u < channels; ++u) {
        const auto mc = detail::snapshot_metrics(
            detail::snapshot_stats(preds[i].frames[t], truths[i].frames[t], static_cast<long>(u)), channel_peak[u]);
        const double cv[4] = {mc.mae, mc.rmse, mc.psnr, mc.ssim};
        for (int q = 0; q < 4; ++q) chan_acc[u][q].add(cv[q]);
      }
    }
    for (int q = 0; q < 4; ++q) inst_acc[q].add(this_instance[q].mean());
  }

  auto to_values = [](const std::array<detail::Accumulator, 4>& a) {
    return MetricValues{a[0].mean(), a[1].mean(), a[2].mean(), a[3].mean()};
  };
  for (const auto& a : step_acc) r.per_step.push_back(to_values(a));
  for (const auto& a : chan_acc) r.per_service.push_back(to_values(a));
  r.mae = inst_acc[0].mean();
  r.rmse = inst_acc[1].mean();
  r.psnr = inst_acc[2].mean();
  r.ssim = inst_acc[3].mean();
  r.mae_std = inst_acc[0].stddev();
  r.rmse_std = inst_acc[1].stddev();
  r.psnr_std = inst_acc[2].stddev();
  r.ssim_std = inst_acc[3].stddev();
  return r;
}

inline MetricReport evaluate(const StreamSequence& pred, const StreamSequence& truth) {
  return evaluate(std::span<const StreamSequence>(&pred, 1), std::span<const StreamSequence>(&truth, 1));
}

}  // namespace cloudcast
