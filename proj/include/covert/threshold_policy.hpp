#pragma once

#include <cstddef>

#include "covert/mdp.hpp"

namespace covert {

/// Stationary threshold table: thresholds(o, u) is the smallest queue value at
/// which action u (or a higher one) becomes active in oracle state o.
struct ThresholdPolicy {
  Matrix thresholds;  // R x |U|, nondecreasing along each row
  double temperature = 0.1;

  std::size_t oracle_states() const { return static_cast<std::size_t>(thresholds.rows()); }
  std::size_t num_actions() const { return static_cast<std::size_t>(thresholds.cols()); }
  std::size_t num_parameters() const { return static_cast<std::size_t>(thresholds.size()); }
  bool is_monotone() const;
  /// Throws ShapeError when empty or DomainError on a decreasing row or a
  /// non-positive temperature.
  void validate() const;
};

/// kDithered rounds the soft count up with probability equal to its
/// fractional part, so the expected action moves smoothly with the thresholds.
enum class ActionMode { kHard, kSmooth, kDithered };

/// Soft action count sum_u sigmoid((b - Y(o,u)) / tau).
double smooth_action_value(const ThresholdPolicy& policy, std::size_t b, std::size_t o);

/// Hard mode: the action u with Y(o,u) <= b < Y(o,u+1); the lowest action when
/// no threshold is reached. Smooth mode: the soft count rounded to the nearest
/// action (1-based count, clamped to [1, |U|]).
/// Dithered mode draws one uniform from `rng` (required in that mode only).
std::size_t stationary_action(const ThresholdPolicy& policy, std::size_t b, std::size_t o, ActionMode mode,
                              Rng* rng = nullptr);

/// Projects each row onto the nondecreasing cone (least squares, pool adjacent
/// violators) and clamps entries into [0, upper].
void project_monotone(ThresholdPolicy& policy, double upper);

/// Threshold table reproducing stage n of a DP policy:
/// Y(o,u) = min{b : u*(n,o,b) >= u}, or M + 1 when no such b exists. Exact for
/// stages whose policy is monotone in b.
ThresholdPolicy thresholds_from_stage(const PolicyTable& policy, std::size_t n, std::size_t num_actions,
                                      double temperature);

}  // namespace covert
