#pragma once

#include <cstddef>
#include <optional>

#include "covert/oracle.hpp"

namespace covert {

/// Learner and obfuscator estimates of the switched stochastic-gradient pair.
struct DualSgState {
  Vector learn;      // learner estimate
  Vector obfuscate;  // obfuscating estimate
  double step_size = 1.0;
  std::size_t successful_steps = 0;
  // Most recent informative learning gradient, used by mirror synthesis.
  std::optional<Vector> last_gradient;
};

/// Required successful steps and the constant step size that reach
/// E|grad f(x)|^2 <= epsilon.
struct SgBudget {
  double initial_gap = 0.0;  // E f(x0) - f*
  double lipschitz = 0.0;
  double noise_variance = 0.0;
  double epsilon = 0.0;
  std::size_t steps = 0;
  double step_size = 0.0;
};

/// steps = ceil(max(4 F gamma / eps, 8 F gamma sigma^2 / eps^2)),
/// step_size = min(1/gamma, eps / (2 sigma^2 gamma)) (1/gamma when sigma^2 = 0).
SgBudget compute_budget(double initial_gap, double lipschitz, double noise_variance, double epsilon);

/// Applies one step to exactly one of the two estimates: the learner estimate
/// with the oracle gradient when `learn`, otherwise the obfuscating estimate
/// with the synthetic gradient.
DualSgState sg_update(const DualSgState& state, bool learn, const OracleResponse& response,
                      const Vector& synthetic);

/// The query sent to the oracle: learner estimate when learning, obfuscating
/// estimate otherwise.
const Vector& make_query(const DualSgState& state, bool learn);

enum class SyntheticMode { kMirror, kDecoy };

struct SyntheticSource {
  SyntheticMode mode = SyntheticMode::kMirror;
  GradientFn decoy_gradient;  // required for kDecoy
  double noise_variance = 0.0;
  NoiseKind noise = NoiseKind::kGaussian;
};

/// Synthetic response for the obfuscating run. Mirror mode negates the last
/// informative learning gradient; before any exists it returns a uniformly
/// random unit direction. Decoy mode returns a noisy decoy gradient at the
/// obfuscating estimate.
Vector synthetic_response(const DualSgState& state, const SyntheticSource& source, Rng& rng);

/// Obfuscating start placed `separation` away from the learner start along the
/// first coordinate axis. A non-positive separation selects 10 |x0| + 1.
Vector separated_start(const Vector& learn_start, double separation);

}  // namespace covert
