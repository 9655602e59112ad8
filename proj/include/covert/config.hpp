#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "covert/search.hpp"
#include "covert/structure.hpp"

namespace covert {

/// Parametric weight over integer arguments x:
///   quadratic: scale * x^2 + offset     linear: scale * x + offset
///   power:     scale * x^exponent + offset
///   constant:  offset                   values: explicit list
struct WeightSpec {
  std::string kind = "quadratic";
  double scale = 1.0;
  double offset = 0.0;
  double exponent = 2.0;
  std::vector<double> values;

  /// Values at x = first, first + 1, ..., first + count - 1.
  std::vector<double> evaluate(std::size_t count, std::size_t first) const;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::size_t episodes = 100;  // N_mc

  // Oracle. Either `transition` or the participation model must be given.
  Matrix success;
  Matrix transition;
  int participation_clients = 0;
  double participation_stay = 0.8;
  std::vector<int> participation_levels;
  double noise_variance = 0.1;
  NoiseKind noise = NoiseKind::kGaussian;
  std::vector<double> initial_oracle;  // empty = stationary
  std::optional<std::size_t> initial_oracle_state;

  // Learning problem.
  std::string objective = "quadratic";
  std::size_t dimension = 10;
  double lipschitz = 1.0;    // gamma
  double initial_gap = 1.0;  // F
  double epsilon = 0.1;
  double ripple_amplitude = 0.0;
  double ripple_frequency = 1.0;
  std::optional<double> step_size;  // default from the budget
  SyntheticMode synthetic = SyntheticMode::kMirror;
  double separation = 0.0;
  std::string labeler = "ground_truth";  // or "bisector"

  // MDP.
  std::optional<std::size_t> queue_capacity;  // default from the budget
  std::size_t horizon = 100;
  std::vector<double> incentives{1.0, 2.0, 3.0};
  WeightSpec queue_weight;
  WeightSpec oracle_weight;
  WeightSpec terminal_cost{"power", 1.0, 0.0, 4.0, {}};
  OracleDynamics dynamics = OracleDynamics::kQueueCoupled;
  double belief_floor = 0.05;
  FixedPointOptions fixed_point;

  // Search.
  SpsaOptions spsa;
  double temperature = 0.5;
  UcbOptions ucb;
  std::size_t ucb_grid_points = 0;  // 0 = integer grid 0..M
  bool ucb_shared_rows = false;
  std::size_t surrogate_episodes = 200;
};

/// Parses the JSON experiment description. Unknown keys are rejected so typos
/// do not silently fall back to defaults. Throws ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// Success-step budget and step size implied by the learning problem.
SgBudget config_budget(const ExperimentConfig& config);

/// Assembles the MDP (M from the budget unless overridden) with a schedule
/// from a uniformly random rule, and reports the structural checks when
/// `report` is given. Invalid weights raise ConfigError naming R1 or R3.
MdpModel derive_model(const ExperimentConfig& config, StructureReport* report = nullptr);

Environment make_environment(const ExperimentConfig& config, const MdpModel& model);

}  // namespace covert
