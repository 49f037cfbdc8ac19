#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "cloudcast/frame.hpp"

namespace cloudcast {

/// Synthetic multi-service traffic over a fixed scatter of antennas.
///
/// Demand comes from Gaussian hot spots that drift across the unit square (bouncing off its
/// edges), modulated by a daily sinusoid with a per-service phase, plus white noise clamped at 0.
struct SynthConfig {
  std::size_t points = 100;    // N
  std::size_t channels = 4;    // U, one per service
  std::size_t frames = 2000;   // T
  std::size_t sources = 3;     // hot spots
  double mobility = 0.003;     // hot-spot displacement per frame, unit-square lengths
  double source_sigma = 0.15;  // hot-spot spatial spread
  double amplitude = 1.0;      // peak demand of a hot spot
  std::size_t period = 288;    // frames per day (5-minute slots)
  double seasonal_amplitude = 0.3;
  double noise_std = 0.08;
  double timestep_seconds = 300.0;
  std::uint64_t seed = 42;

  static constexpr std::size_t value_dim = 1;
  static constexpr std::size_t coord_dim = 2;

  void validate() const {
    if (points < 1 || channels < 1 || frames < 1 || sources < 1 || period < 1)
      throw ArgumentError("synth config: counts must be positive");
    if (noise_std < 0.0 || mobility < 0.0 || !(source_sigma > 0.0) || !(timestep_seconds > 0.0))
      throw ArgumentError("synth config: noise/mobility must be >= 0, sigma and timestep > 0");
  }
};

inline StreamSequence generate_stream(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  // Antenna locations, fixed for the whole stream.
  std::vector<double> px(cfg.points), py(cfg.points);
  for (std::size_t n = 0; n < cfg.points; ++n) {
    px[n] = unit(rng);
    py[n] = unit(rng);
  }

  struct Source {
    double x, y, vx, vy;
    std::vector<double> weight;  // per service
  };
  std::vector<Source> sources(cfg.sources);
  for (auto& s : sources) {
    s.x = unit(rng);
    s.y = unit(rng);
    const double heading = 2.0 * std::numbers::pi * unit(rng);
    s.vx = cfg.mobility * std::cos(heading);
    s.vy = cfg.mobility * std::sin(heading);
    s.weight.resize(cfg.channels);
    for (double& w : s.weight) w = cfg.amplitude * (0.5 + 0.5 * unit(rng));
  }
  std::vector<double> phase(cfg.channels);
  for (double& p : phase) p = 2.0 * std::numbers::pi * unit(rng);

  const FrameShape shape{cfg.channels, cfg.points, SynthConfig::value_dim, SynthConfig::coord_dim};
  const double inv_two_sigma2 = 1.0 / (2.0 * cfg.source_sigma * cfg.source_sigma);

  auto bounce = [](double& pos, double& vel) {
    pos += vel;
    if (pos < 0.0) {
      pos = -pos;
      vel = -vel;
    } else if (pos > 1.0) {
      pos = 2.0 - pos;
      vel = -vel;
    }
  };

  StreamSequence out{{}, cfg.timestep_seconds};
  out.frames.reserve(cfg.frames);
  for (std::size_t t = 0; t < cfg.frames; ++t) {
    PointCloudFrame frame(shape);
    for (std::size_t u = 0; u < cfg.channels; ++u) {
      const double season =
          1.0 + cfg.seasonal_amplitude *
                    std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(cfg.period) + phase[u]);
      for (std::size_t n = 0; n < cfg.points; ++n) {
        double v = 0.0;
        for (const auto& s : sources) {
          const double dx = px[n] - s.x;
          const double dy = py[n] - s.y;
          v += s.weight[u] * std::exp(-(dx * dx + dy * dy) * inv_two_sigma2);
        }
        v *= season;
        if (cfg.noise_std > 0.0) v += cfg.noise_std * noise(rng);
        frame.value(u, n, 0) = std::max(0.0, v);
        frame.coord(u, n, 0) = px[n];
        frame.coord(u, n, 1) = py[n];
      }
    }
    out.frames.push_back(normalize_coords(frame));
    for (auto& s : sources) {
      bounce(s.x, s.vx);
      bounce(s.y, s.vy);
    }
  }
  return out;
}

}  // namespace cloudcast
