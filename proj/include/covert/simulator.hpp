#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "covert/eavesdropper.hpp"
#include "covert/gradient_engine.hpp"
#include "covert/objective.hpp"
#include "covert/policies.hpp"

namespace covert {

/// Everything one covert-optimization episode needs. The oracle's success and
/// transition matrices are taken from `model`; `oracle` adds the noise model.
struct Environment {
  MdpModel model;
  OracleModel oracle;
  Objective objective;
  SyntheticSource synthetic;
  Vector learn_start;
  Vector obfuscate_start;
  double step_size = 1.0;
  QueryLabeler labeler = QueryLabeler::ground_truth();
  std::optional<std::size_t> initial_oracle_state;  // else drawn from the model

  /// Throws ConfigError or ShapeError on inconsistent pieces.
  void validate() const;
};

struct StepRecord {
  std::size_t n = 0;  // queries left, N first
  std::size_t oracle_state = 0;
  std::size_t queue = 0;  // b before the action
  std::size_t action = 0;
  bool learn = false;
  double incentive = 0.0;
  bool success = false;
  double belief = 0.5;          // eavesdropper belief before the query
  double incentive_sum = 0.0;   // incentives paid before the query
  double stage_cost = 0.0;
};

struct EpisodeTrace {
  std::vector<StepRecord> steps;
  std::size_t final_queue = 0;  // b_0
  double terminal_cost = 0.0;
  double stage_cost_sum = 0.0;
  double total_cost = 0.0;  // stage_cost_sum / N + terminal_cost
  double incentive_spend = 0.0;
  EavesdropperBelief belief;
  Trajectory map_choice = Trajectory::kSecond;
  bool map_correct = false;
  double gradient_norm_sq = 0.0;  // |grad f(x_hat)|^2 at the end

  bool completed() const { return final_queue == 0; }
  /// Throws NumericError when b increases, drops without a successful
  /// learning step, or the trace is longer than the horizon.
  void validate(std::size_t horizon, std::size_t queue_capacity) const;
};

/// One run of the stochastic control loop: act, pay the stage cost with the
/// realized incentive sum and belief, query, update the dual SG pair, update
/// the eavesdropper, step the oracle, and finally pay d(b_0). The oracle state
/// moves on every query in independent mode and only on successful learning
/// steps in queue-coupled mode. Errors are rethrown with the step attached.
EpisodeTrace run_episode(const Environment& env, const Policy& policy, Rng& rng);

struct PolicyEvaluation {
  std::size_t episodes = 0;
  double mean_cost = 0.0;
  double stderr_cost = 0.0;
  double completion_rate = 0.0;
  double map_correct_rate = 0.0;
  double mean_spend = 0.0;
  double mean_gradient_norm_sq = 0.0;
  double mean_final_queue = 0.0;
};

/// Episode k runs on the stream split_seed(seed, k), so results depend only on
/// (policy, seed, episodes).
PolicyEvaluation evaluate_policy(const Environment& env, const Policy& policy, std::size_t episodes,
                                 std::uint64_t seed);

/// Mean cost of one episode on stream `episode_seed`.
double episode_cost(const Environment& env, const Policy& policy, std::uint64_t episode_seed);

}  // namespace covert
