#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "covert/simulator.hpp"

namespace covert {

struct SpsaOptions {
  std::size_t iterations = 3000;  // H
  double step = 0.01;             // phi, constant
  double perturbation = 0.1;      // +/- delta per coordinate
  // Queue units per unit of the search variable; 0 selects M + 1.
  double threshold_unit = 0.0;
  std::uint64_t seed = 1;
};

/// Noisy objective evaluated on a given random stream seed. Both sides of an
/// SPSA pair receive the same seed (common random numbers).
using NoisyCost = std::function<double(const Vector& theta, std::uint64_t stream)>;
using Projection = std::function<void(Vector& theta)>;

struct SpsaTrace {
  Vector theta;
  std::vector<double> cost;  // mean of the plus and minus evaluations
};

/// theta <- P(theta - phi * g), g_j = (C(theta + delta s) - C(theta - delta s)) / (2 delta s_j)
/// with s_j = +/-1 equiprobable.
SpsaTrace spsa_minimize(Vector theta, const NoisyCost& cost, const SpsaOptions& options,
                        const Projection& project = {});

struct SpsaPolicyResult {
  ThresholdPolicy policy;
  std::vector<double> cost;
};

/// SPSA over a threshold table. The search variable is the table divided by
/// `threshold_unit` (M + 1 by default, making the step and perturbation
/// fractions of the queue range).
/// Evaluations use dithered soft actions by default, since nearest rounding
/// makes the cost piecewise constant in the thresholds. After every step each
/// row is projected onto the nondecreasing cone and clamped to [0, M + 1].
SpsaPolicyResult spsa_search(const Environment& env, ThresholdPolicy initial, const SpsaOptions& options,
                             ActionMode mode = ActionMode::kDithered);

/// Thresholds spread evenly over [0, M + 1], a starting point that favours no
/// particular action.
ThresholdPolicy neutral_thresholds(std::size_t oracle_states, std::size_t num_actions, std::size_t queue_capacity,
                                   double temperature);

struct BanditState {
  std::vector<std::size_t> pulls;
  std::vector<double> mean_reward;
  std::size_t t = 0;
  std::vector<double> regret;  // cumulative, one entry per episode

  std::size_t best_arm() const;  // highest empirical mean, lowest index on ties
};

struct UcbOptions {
  std::size_t episodes = 10000;  // T
  double exploration = 1.0;      // c_ucb
  std::uint64_t seed = 1;
};

/// Reward of pulling `arm` on random stream `stream`.
using ArmReward = std::function<double(std::size_t arm, std::uint64_t stream)>;

/// UCB1: one pull of every arm, then argmax of mean + c sqrt(2 ln t / pulls)
/// where t counts pulls so far. Regret is measured against `arm_means` when
/// given (pseudo-regret), otherwise against the final empirical means.
/// Throws DomainError when T is smaller than the number of arms.
BanditState ucb_search(std::size_t arms, const ArmReward& reward, const UcbOptions& options,
                       const std::vector<double>& arm_means = {});

struct GridOptions {
  bool monotone = true;              // keep nondecreasing rows only
  bool pin_first = true;             // Y(o,0) = 0; it never changes the induced policy
  bool shared_across_states = false; // one row reused for every oracle state
  double temperature = 0.1;
};

/// Threshold tables whose entries are drawn from `values`. Without sharing
/// the grid is the R-fold product of the admissible rows.
std::vector<ThresholdPolicy> threshold_grid(std::size_t oracle_states, std::size_t num_actions,
                                            const std::vector<double>& values, const GridOptions& options = {});

/// {0, 1, ..., max_value}.
std::vector<double> integer_values(std::size_t max_value);

/// UCB over a threshold grid with reward = -episode cost (hard actions).
BanditState ucb_policy_search(const Environment& env, const std::vector<ThresholdPolicy>& arms,
                              const UcbOptions& options, const std::vector<double>& arm_means = {});

}  // namespace covert
