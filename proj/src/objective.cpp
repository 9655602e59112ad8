#include "covert/objective.hpp"

#include <cmath>

namespace covert {

Objective quadratic_objective(double gamma, const Vector& center) {
  Objective f;
  f.name = "quadratic";
  f.value = [gamma, center](const Vector& x) { return 0.5 * gamma * (x - center).squaredNorm(); };
  f.gradient = [gamma, center](const Vector& x) -> Vector { return gamma * (x - center); };
  f.minimizer = center;
  f.lipschitz = gamma;
  return f;
}

Objective nonconvex_objective(double gamma, const Vector& center, double amplitude, double frequency) {
  Objective f;
  f.name = "nonconvex";
  f.value = [=](const Vector& x) {
    const Vector d = x - center;
    double ripple = 0.0;
    for (Eigen::Index j = 0; j < d.size(); ++j) {
      ripple += 1.0 - std::cos(frequency * d(j));
    }
    return 0.5 * gamma * d.squaredNorm() + amplitude * ripple;
  };
  f.gradient = [=](const Vector& x) -> Vector {
    const Vector d = x - center;
    Vector g = gamma * d;
    for (Eigen::Index j = 0; j < d.size(); ++j) {
      g(j) += amplitude * frequency * std::sin(frequency * d(j));
    }
    return g;
  };
  f.minimizer = center;
  f.lipschitz = gamma + amplitude * frequency * frequency;
  return f;
}

}  // namespace covert
