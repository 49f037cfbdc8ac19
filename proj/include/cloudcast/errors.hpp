#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace cloudcast {

// Caller passed something inconsistent: shapes, sizes, out-of-range K, ...
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input data violated an invariant (non-finite entries, mixed shapes).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A dataset or checkpoint file could not be parsed.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Optimisation produced NaN/Inf somewhere it must not.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <typename... Parts>
std::string concat(const Parts&... parts) {
  std::string out;
  ((out += [](const auto& p) {
     if constexpr (std::is_arithmetic_v<std::decay_t<decltype(p)>>)
       return std::to_string(p);
     else
       return std::string(p);
   }(parts)),
   ...);
  return out;
}

template <typename... Parts>
[[noreturn]] void throw_argument(const Parts&... parts) {
  throw ArgumentError(concat(parts...));
}

}  // namespace detail
}  // namespace cloudcast
