#include "covert/gradient_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "covert/errors.hpp"

namespace covert {

SgBudget compute_budget(double initial_gap, double lipschitz, double noise_variance, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw DomainError("compute_budget: epsilon must be positive");
  }
  if (!(lipschitz > 0.0)) {
    throw DomainError("compute_budget: Lipschitz constant must be positive");
  }
  if (!(initial_gap > 0.0)) {
    throw DomainError("compute_budget: initial suboptimality F must be positive");
  }
  if (!(noise_variance >= 0.0)) {
    throw DomainError("compute_budget: noise variance must be nonnegative");
  }
  SgBudget b{initial_gap, lipschitz, noise_variance, epsilon, 0, 0.0};
  const double bias_term = 4.0 * initial_gap * lipschitz / epsilon;
  const double noise_term = 8.0 * initial_gap * lipschitz * noise_variance / (epsilon * epsilon);
  const double raw = std::max(bias_term, noise_term);
  // Products like 8*2*3*4/0.01 land a few ulps above the integer.
  b.steps = static_cast<std::size_t>(std::ceil(raw * (1.0 - 1e-12)));
  b.step_size = noise_variance == 0.0
                    ? 1.0 / lipschitz
                    : std::min(1.0 / lipschitz, epsilon / (2.0 * noise_variance * lipschitz));
  return b;
}

DualSgState sg_update(const DualSgState& state, bool learn, const OracleResponse& response,
                      const Vector& synthetic) {
  const auto d = state.learn.size();
  if (state.obfuscate.size() != d) {
    throw ShapeError("sg_update: learner and obfuscator estimates differ in dimension");
  }
  DualSgState next = state;
  if (learn) {
    if (response.gradient.size() != d) {
      throw ShapeError("sg_update: response dimension " + std::to_string(response.gradient.size()) +
                       " != " + std::to_string(d));
    }
    next.learn -= state.step_size * response.gradient;
    if (response.success) {
      ++next.successful_steps;
      next.last_gradient = response.gradient;
    }
  } else {
    if (synthetic.size() != d) {
      throw ShapeError("sg_update: synthetic dimension " + std::to_string(synthetic.size()) +
                       " != " + std::to_string(d));
    }
    next.obfuscate -= state.step_size * synthetic;
  }
  return next;
}

const Vector& make_query(const DualSgState& state, bool learn) {
  return learn ? state.learn : state.obfuscate;
}

Vector synthetic_response(const DualSgState& state, const SyntheticSource& source, Rng& rng) {
  const auto d = state.obfuscate.size();
  if (source.mode == SyntheticMode::kMirror) {
    if (state.last_gradient) {
      return -*state.last_gradient;
    }
    Vector dir(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      dir(j) = rng.normal();
    }
    const double norm = dir.norm();
    return norm > 0.0 ? Vector(dir / norm) : Vector::Zero(d);
  }
  if (!source.decoy_gradient) {
    throw DomainError("synthetic_response: decoy mode requires a decoy gradient");
  }
  Vector g = source.decoy_gradient(state.obfuscate);
  if (g.size() != d) {
    throw ShapeError("synthetic_response: decoy gradient has the wrong dimension");
  }
  if (!g.allFinite()) {
    throw NumericError("synthetic_response: decoy gradient is not finite");
  }
  return g + sample_noise(source.noise, source.noise_variance, d, rng);
}

Vector separated_start(const Vector& learn_start, double separation) {
  const double delta = separation > 0.0 ? separation : 10.0 * learn_start.norm() + 1.0;
  Vector z = learn_start;
  if (z.size() > 0) {
    z(0) += delta;
  }
  return z;
}

}  // namespace covert
