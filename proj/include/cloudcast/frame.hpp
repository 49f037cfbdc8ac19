#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "cloudcast/errors.hpp"

namespace cloudcast {

// Dimensions shared by every frame of a stream.
struct FrameShape {
  std::size_t channels = 0;   // U
  std::size_t points = 0;     // N
  std::size_t value_dim = 0;  // H
  std::size_t coord_dim = 0;  // L

  std::size_t features() const noexcept { return value_dim + coord_dim; }
  std::size_t size() const noexcept { return channels * points * features(); }

  friend bool operator==(const FrameShape&, const FrameShape&) = default;
};

inline std::string to_string(const FrameShape& s) {
  return detail::concat("(U=", s.channels, ", N=", s.points, ", H=", s.value_dim, ", L=", s.coord_dim,
                        ")");
}

/// One snapshot of a point cloud: U channels x N points x (H value + L coordinate) features.
///
/// Storage is dense row-major (channel, point, feature); per point the H value features come
/// first, followed by the L coordinate features.
class PointCloudFrame {
 public:
  PointCloudFrame() = default;

  explicit PointCloudFrame(FrameShape shape) : shape_(shape), data_(shape.size(), 0.0) {}

  PointCloudFrame(FrameShape shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
    if (data_.size() != shape_.size())
      detail::throw_argument("frame data has ", data_.size(), " entries, shape ", to_string(shape_),
                             " needs ", shape_.size());
  }

  const FrameShape& shape() const noexcept { return shape_; }
  std::size_t channels() const noexcept { return shape_.channels; }
  std::size_t points() const noexcept { return shape_.points; }
  std::size_t value_dim() const noexcept { return shape_.value_dim; }
  std::size_t coord_dim() const noexcept { return shape_.coord_dim; }
  std::size_t features() const noexcept { return shape_.features(); }

  std::size_t offset(std::size_t u, std::size_t n, std::size_t f = 0) const noexcept {
    return (u * shape_.points + n) * shape_.features() + f;
  }

  double& at(std::size_t u, std::size_t n, std::size_t f) noexcept { return data_[offset(u, n, f)]; }
  double at(std::size_t u, std::size_t n, std::size_t f) const noexcept { return data_[offset(u, n, f)]; }

  double& value(std::size_t u, std::size_t n, std::size_t h) noexcept { return at(u, n, h); }
  double value(std::size_t u, std::size_t n, std::size_t h) const noexcept { return at(u, n, h); }
  double& coord(std::size_t u, std::size_t n, std::size_t l) noexcept {
    return at(u, n, shape_.value_dim + l);
  }
  double coord(std::size_t u, std::size_t n, std::size_t l) const noexcept {
    return at(u, n, shape_.value_dim + l);
  }

  // All features of point n in channel u.
  std::span<double> point(std::size_t u, std::size_t n) noexcept {
    return {data_.data() + offset(u, n), shape_.features()};
  }
  std::span<const double> point(std::size_t u, std::size_t n) const noexcept {
    return {data_.data() + offset(u, n), shape_.features()};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::vector<double>& storage() noexcept { return data_; }

  bool is_coord_feature(std::size_t f) const noexcept { return f >= shape_.value_dim; }

  bool all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }

  friend bool operator==(const PointCloudFrame&, const PointCloudFrame&) = default;

 private:
  FrameShape shape_{};
  std::vector<double> data_;
};

/// Chronologically ordered frames sharing one shape.
struct StreamSequence {
  std::vector<PointCloudFrame> frames;
  double timestep_seconds = 1.0;

  std::size_t size() const noexcept { return frames.size(); }
  bool empty() const noexcept { return frames.empty(); }
  const FrameShape& shape() const {
    if (frames.empty()) throw ArgumentError("empty stream has no shape");
    return frames.front().shape();
  }

  // Throws DataError when frames disagree on shape or hold non-finite entries.
  void validate() const {
    if (!(timestep_seconds > 0.0) || !std::isfinite(timestep_seconds))
      throw DataError("timestep must be a positive finite number of seconds");
    for (std::size_t t = 0; t < frames.size(); ++t) {
      if (frames[t].shape() != frames.front().shape())
        throw DataError(detail::concat("frame ", t, " has shape ", to_string(frames[t].shape()),
                                       ", expected ", to_string(frames.front().shape())));
      if (!frames[t].all_finite()) throw DataError(detail::concat("frame ", t, " has non-finite entries"));
    }
  }

  friend bool operator==(const StreamSequence&, const StreamSequence&) = default;
};

/// Min-max normalises every coordinate dimension of every channel independently to [0, 1].
/// A dimension whose values are all equal maps to 0.5. Value features are untouched.
inline PointCloudFrame normalize_coords(const PointCloudFrame& frame) {
  if (frame.coord_dim() < 1) throw ArgumentError("normalize_coords needs at least one coordinate feature");
  if (!frame.all_finite()) throw DataError("normalize_coords: frame has non-finite entries");

  PointCloudFrame out = frame;
  for (std::size_t u = 0; u < frame.channels(); ++u) {
    for (std::size_t l = 0; l < frame.coord_dim(); ++l) {
      double lo = frame.coord(u, 0, l);
      double hi = lo;
      for (std::size_t n = 1; n < frame.points(); ++n) {
        lo = std::min(lo, frame.coord(u, n, l));
        hi = std::max(hi, frame.coord(u, n, l));
      }
      const double range = hi - lo;
      for (std::size_t n = 0; n < frame.points(); ++n)
        out.coord(u, n, l) = range > 0.0 ? (frame.coord(u, n, l) - lo) / range : 0.5;
    }
  }
  return out;
}

inline StreamSequence normalize_coords(const StreamSequence& stream) {
  StreamSequence out{{}, stream.timestep_seconds};
  out.frames.reserve(stream.size());
  for (const auto& f : stream.frames) out.frames.push_back(normalize_coords(f));
  return out;
}

// Relabels points: point n of the input becomes point perm[n] of the output.
inline PointCloudFrame permute_points(const PointCloudFrame& frame, std::span<const std::size_t> perm) {
  if (perm.size() != frame.points()) throw ArgumentError("permutation size does not match point count");
  PointCloudFrame out(frame.shape());
  for (std::size_t u = 0; u < frame.channels(); ++u)
    for (std::size_t n = 0; n < frame.points(); ++n) {
      auto src = frame.point(u, n);
      std::copy(src.begin(), src.end(), out.point(u, perm[n]).begin());
    }
  return out;
}

inline StreamSequence permute_points(const StreamSequence& stream, std::span<const std::size_t> perm) {
  StreamSequence out{{}, stream.timestep_seconds};
  for (const auto& f : stream.frames) out.frames.push_back(permute_points(f, perm));
  return out;
}

// Copy of channel `src` coordinates replicated over `channels` channels with zero value rows.
inline PointCloudFrame replicate_coords(const PointCloudFrame& frame, std::size_t channels,
                                        std::size_t src = 0) {
  FrameShape s = frame.shape();
  s.channels = channels;
  PointCloudFrame out(s);
  for (std::size_t u = 0; u < channels; ++u)
    for (std::size_t n = 0; n < s.points; ++n)
      for (std::size_t l = 0; l < s.coord_dim; ++l) out.coord(u, n, l) = frame.coord(src, n, l);
  return out;
}

inline double max_abs_diff(const PointCloudFrame& a, const PointCloudFrame& b) {
  if (a.shape() != b.shape()) throw ArgumentError("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace cloudcast
