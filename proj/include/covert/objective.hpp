#pragma once

#include <functional>
#include <string>

#include "covert/oracle.hpp"

namespace covert {

/// Synthetic objective with a known minimizer and gradient Lipschitz bound.
struct Objective {
  std::string name;
  std::function<double(const Vector&)> value;
  GradientFn gradient;
  Vector minimizer;
  double lipschitz = 1.0;
  double min_value = 0.0;
};

/// f(x) = gamma/2 |x - center|^2.
Objective quadratic_objective(double gamma, const Vector& center);

/// f(x) = gamma/2 |x - center|^2 + amplitude * sum_j (1 - cos(frequency (x_j - c_j))).
/// Gradient is (gamma + amplitude frequency^2)-Lipschitz; nonconvex once
/// amplitude * frequency^2 > gamma. The minimizer stays at `center`.
Objective nonconvex_objective(double gamma, const Vector& center, double amplitude, double frequency);

}  // namespace covert
