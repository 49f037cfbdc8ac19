#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "cloudcast/frame.hpp"

namespace cloudcast {

/// Per channel, per point: the K nearest points (anchor first) by Euclidean distance in that
/// channel's coordinate space. Ties resolve to the lower point index.
class NeighborTable {
 public:
  NeighborTable() = default;
  NeighborTable(std::size_t channels, std::size_t points, std::size_t k)
      : channels_(channels), points_(points), k_(k), indices_(channels * points * k) {}

  std::size_t channels() const noexcept { return channels_; }
  std::size_t points() const noexcept { return points_; }
  std::size_t k() const noexcept { return k_; }

  std::span<const std::uint32_t> row(std::size_t u, std::size_t n) const noexcept {
    return {indices_.data() + (u * points_ + n) * k_, k_};
  }
  std::span<std::uint32_t> row(std::size_t u, std::size_t n) noexcept {
    return {indices_.data() + (u * points_ + n) * k_, k_};
  }
  std::uint32_t operator()(std::size_t u, std::size_t n, std::size_t k) const noexcept {
    return indices_[(u * points_ + n) * k_ + k];
  }

  // Every point is its own only neighbour.
  static NeighborTable identity(std::size_t channels, std::size_t points) {
    NeighborTable t(channels, points, 1);
    for (std::size_t u = 0; u < channels; ++u)
      for (std::size_t n = 0; n < points; ++n) t.row(u, n)[0] = static_cast<std::uint32_t>(n);
    return t;
  }

  friend bool operator==(const NeighborTable&, const NeighborTable&) = default;

 private:
  std::size_t channels_ = 0;
  std::size_t points_ = 0;
  std::size_t k_ = 0;
  std::vector<std::uint32_t> indices_;
};

/// Exact K-nearest-neighbour table for every channel of `frame`.
///
/// Each row starts with the anchor point itself; the remaining K-1 entries are the closest other
/// points ordered by (distance, index). Candidates go through a sorted buffer of size K-1, so the
/// cost is O(U * N^2 * L) plus insertions.
inline NeighborTable knn_neighbors(const PointCloudFrame& frame, std::size_t k) {
  if (k < 1) throw ArgumentError("knn_neighbors: K must be at least 1");
  if (k > frame.points())
    detail::throw_argument("knn_neighbors: K=", k, " exceeds point count N=", frame.points());

  const std::size_t n_points = frame.points();
  const std::size_t dims = frame.coord_dim();
  NeighborTable table(frame.channels(), n_points, k);
  const std::size_t keep = k - 1;

  // Coordinates stored dimension-major so the distance sweep vectorizes.
  std::vector<double> coords(dims * n_points);
  std::vector<double> dist(n_points);
  std::vector<double> best_d(keep + 1);
  std::vector<std::uint32_t> best_i(keep + 1);

  for (std::size_t u = 0; u < frame.channels(); ++u) {
    for (std::size_t n = 0; n < n_points; ++n)
      for (std::size_t l = 0; l < dims; ++l) coords[l * n_points + n] = frame.coord(u, n, l);

    for (std::size_t n = 0; n < n_points; ++n) {
      auto row = table.row(u, n);
      row[0] = static_cast<std::uint32_t>(n);
      if (keep == 0) continue;
      std::fill(dist.begin(), dist.end(), 0.0);
      for (std::size_t l = 0; l < dims; ++l) {
        const double* c = &coords[l * n_points];
        const double a = c[n];
        for (std::size_t m = 0; m < n_points; ++m) dist[m] += (a - c[m]) * (a - c[m]);
      }
      std::size_t filled = 0;
      for (std::size_t m = 0; m < n_points; ++m) {
        if (m == n) continue;
        const double d = dist[m];
        // Scanning m in ascending order means an equal distance never displaces an earlier index.
        if (filled == keep && !(d < best_d[keep - 1])) continue;
        std::size_t pos = filled < keep ? filled++ : keep - 1;
        while (pos > 0 && d < best_d[pos - 1]) {
          best_d[pos] = best_d[pos - 1];
          best_i[pos] = best_i[pos - 1];
          --pos;
        }
        best_d[pos] = d;
        best_i[pos] = static_cast<std::uint32_t>(m);
      }
      for (std::size_t i = 0; i < keep; ++i) row[i + 1] = best_i[i];
    }
  }
  return table;
}

}  // namespace cloudcast
