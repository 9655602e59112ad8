#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>

namespace covert {

// Tolerance for discrete shape checks: `rel` scaled by the largest magnitude.
inline double shape_tolerance(std::span<const double> v, double rel = 1e-9) {
  double scale = 1.0;
  for (double x : v) {
    scale = std::max(scale, std::abs(x));
  }
  return rel * scale;
}

/// First index k with v[k] < v[k-1] - tol, if any.
inline std::optional<std::size_t> first_decrease(std::span<const double> v, double tol) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (v[k] < v[k - 1] - tol) {
      return k;
    }
  }
  return std::nullopt;
}

/// First interior index k with a negative second difference below -tol.
inline std::optional<std::size_t> first_concavity(std::span<const double> v, double tol) {
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    if (v[k + 1] - 2.0 * v[k] + v[k - 1] < -tol) {
      return k;
    }
  }
  return std::nullopt;
}

inline bool is_nondecreasing(std::span<const double> v, double tol) { return !first_decrease(v, tol); }
inline bool is_convex(std::span<const double> v, double tol) { return !first_concavity(v, tol); }

}  // namespace covert
