#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cloudcast/errors.hpp"

namespace cloudcast {

struct NamedTensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> data;

  friend bool operator==(const NamedTensor&, const NamedTensor&) = default;
};

/// Ordered collection of named parameter tensors. The same type doubles as the gradient buffer.
class ParameterSet {
 public:
  using Id = std::size_t;

  Id add(std::string name, std::vector<std::size_t> shape) {
    if (find(name)) throw ArgumentError("duplicate parameter name " + name);
    std::size_t count = 1;
    for (auto d : shape) count *= d;
    tensors_.push_back({std::move(name), std::move(shape), std::vector<double>(count, 0.0)});
    return tensors_.size() - 1;
  }

  std::size_t size() const noexcept { return tensors_.size(); }
  const NamedTensor& operator[](Id id) const { return tensors_.at(id); }
  NamedTensor& operator[](Id id) { return tensors_.at(id); }
  std::span<double> values(Id id) { return tensors_.at(id).data; }
  std::span<const double> values(Id id) const { return tensors_.at(id).data; }

  std::optional<Id> find(const std::string& name) const {
    for (Id i = 0; i < tensors_.size(); ++i)
      if (tensors_[i].name == name) return i;
    return std::nullopt;
  }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& t : tensors_) n += t.data.size();
    return n;
  }

  ParameterSet zeros_like() const {
    ParameterSet out = *this;
    out.fill(0.0);
    return out;
  }

  void fill(double v) {
    for (auto& t : tensors_) std::fill(t.data.begin(), t.data.end(), v);
  }

  void scale(double s) {
    for (auto& t : tensors_)
      for (double& v : t.data) v *= s;
  }

  // this += scale * other; shapes must match.
  void add_scaled(const ParameterSet& other, double scale) {
    check_same_layout(other);
    for (Id i = 0; i < tensors_.size(); ++i)
      for (std::size_t k = 0; k < tensors_[i].data.size(); ++k) tensors_[i].data[k] += scale * other.tensors_[i].data[k];
  }

  void check_same_layout(const ParameterSet& other) const {
    if (other.size() != size()) throw ArgumentError("parameter sets differ in tensor count");
    for (Id i = 0; i < tensors_.size(); ++i)
      if (tensors_[i].name != other.tensors_[i].name || tensors_[i].shape != other.tensors_[i].shape)
        throw ArgumentError("parameter sets differ at tensor " + tensors_[i].name);
  }

  const std::vector<NamedTensor>& tensors() const noexcept { return tensors_; }

  friend bool operator==(const ParameterSet&, const ParameterSet&) = default;

 private:
  std::vector<NamedTensor> tensors_;
};

}  // namespace cloudcast
