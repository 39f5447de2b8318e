#pragma once
#include <limits>
#include <string>
#include <vector>

namespace mareq {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Infinite bounds are the IEEE infinity sentinel, never a large finite stand-in.
inline bool is_unbounded(double v) { return v == kInf || v == -kInf; }

struct SolveError : std::exception {
  std::string msg;
  explicit SolveError(std::string m) : msg(std::move(m)) {}
  const char* what() const noexcept override { return msg.c_str(); }
};

}  // namespace mareq
