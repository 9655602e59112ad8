#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "covert/oracle.hpp"

namespace covert {

/// Decoded action: query type and incentive level.
struct Action {
  bool learn = false;
  std::size_t incentive = 0;  // index into MdpModel::incentives
};

/// How the oracle state moves between queries.
///  kQueueCoupled: the oracle state only moves on a successful learning step;
///                 any other outcome keeps (b, o).
///  kIndependent:  the oracle state moves on every query, independently of
///                 the queue (as the episode simulator executes it).
enum class OracleDynamics { kQueueCoupled, kIndependent };

/// Reference values of the path-dependent cost inputs at a stage: the sum of
/// incentives paid so far and the eavesdropper belief.
struct StageReference {
  double incentive_sum = 0.0;
  double belief = 0.5;
};

/// Finite-horizon covert-optimization MDP over states (b, o) with b the number
/// of successful steps still required and o the oracle state.
///
/// Actions are ordered (obfuscate, i_1), ..., (obfuscate, i_K), (learn, i_1),
/// ..., (learn, i_K); action index k decodes to learn = k >= K and incentive
/// k mod K. Stage index n counts queries left (n = N first, n = 0 terminal).
struct MdpModel {
  std::size_t queue_capacity = 1;  // M
  std::size_t horizon = 1;         // N
  std::vector<double> incentives;  // strictly increasing, positive
  Matrix success;                  // R x K
  Matrix transition;               // R x R
  std::vector<double> queue_weight;   // psi1 over b = 0..M
  std::vector<double> oracle_weight;  // psi2 over o = 0..R-1
  std::vector<double> terminal_cost;  // d over b = 0..M
  std::vector<StageReference> schedule;  // index n = 1..N; empty until built
  OracleDynamics dynamics = OracleDynamics::kQueueCoupled;
  double belief_floor = 0.05;
  std::vector<double> initial_oracle;  // empty = stationary distribution

  std::size_t num_oracle_states() const { return static_cast<std::size_t>(success.rows()); }
  std::size_t num_incentives() const { return incentives.size(); }
  std::size_t num_actions() const { return 2 * incentives.size(); }
  std::size_t num_queue_states() const { return queue_capacity + 1; }

  Action action(std::size_t index) const;
  std::size_t action_index(Action a) const;
  std::size_t greedy_action() const { return num_actions() - 1; }
  double incentive_of(std::size_t action_index) const;
  double effective_belief(double belief) const;
  Vector initial_oracle_distribution() const;

  /// Throws ConfigError when a premise of the model is violated; messages
  /// name the assumption (R1 for psi1/psi2, R3 for the terminal cost).
  void validate() const;
};

struct Transition {
  std::size_t queue = 0;
  std::size_t oracle = 0;
  double probability = 0.0;
};

/// Successor distribution of (b, o) under an action. b = 0 is absorbing: any
/// action there keeps the queue at 0.
std::vector<Transition> transition_distribution(const MdpModel& model, std::size_t b, std::size_t o,
                                                std::size_t action);

/// Learning cost of an action at queue b, oracle state o, given the incentive
/// sum I and eavesdropper belief delta:
///   learn:     psi1(b)/psi2(o) * log((I + i/delta) / (I + i))   (>= 0)
///   obfuscate: psi2(o)/psi1(b) * log(I / (I + i))               (<= 0)
/// I = 0 in the obfuscating branch is replaced by the smallest incentive.
/// Throws DomainError for delta outside (0, 1] or I < 0.
double stage_cost(const MdpModel& model, std::size_t b, std::size_t o, std::size_t action,
                  double incentive_sum, double belief);

/// Dense (N+1) x R x (M+1) table indexed by (n, o, b).
template <class T>
class StageTable {
 public:
  StageTable() = default;
  StageTable(std::size_t stages, std::size_t oracle_states, std::size_t queue_states, T init = T{})
      : stages_(stages), oracle_(oracle_states), queue_(queue_states),
        data_(stages * oracle_states * queue_states, init) {}

  T& operator()(std::size_t n, std::size_t o, std::size_t b) { return data_[(n * oracle_ + o) * queue_ + b]; }
  const T& operator()(std::size_t n, std::size_t o, std::size_t b) const {
    return data_[(n * oracle_ + o) * queue_ + b];
  }
  std::size_t stages() const { return stages_; }
  std::size_t oracle_states() const { return oracle_; }
  std::size_t queue_states() const { return queue_; }
  bool operator==(const StageTable&) const = default;

 private:
  std::size_t stages_ = 0;
  std::size_t oracle_ = 0;
  std::size_t queue_ = 0;
  std::vector<T> data_;
};

using ValueTable = StageTable<double>;
using PolicyTable = StageTable<std::size_t>;

struct DpSolution {
  ValueTable value;    // V[n][o][b], V[0] = d
  PolicyTable policy;  // u*[n][o][b] for n >= 1
  // Q[n][o][b] flattened with the action as the fastest index.
  std::vector<double> q;
  std::size_t num_actions = 0;

  double q_value(std::size_t n, std::size_t o, std::size_t b, std::size_t u) const {
    return q[((n * value.oracle_states() + o) * value.queue_states() + b) * num_actions + u];
  }
};

/// Backward induction V_n = min_u [c_n / N + E V_{n-1}] with the model's frozen
/// schedule; argmin ties resolve to the smallest action index. Stage costs are
/// scaled by 1/N so V_N is the per-episode objective (1/N) sum c_n + d(b_0).
DpSolution solve_dp(const MdpModel& model);

/// Decision rule used while simulating cost schedules.
using StageRule = std::function<std::size_t(std::size_t n, std::size_t o, std::size_t b, Rng& rng)>;

/// Monte-Carlo estimate of the mean (incentive sum, belief) seen at each stage
/// when the model's dynamics are driven by `rule`. Beliefs are raw (no floor).
std::vector<StageReference> simulate_schedule(const MdpModel& model, const StageRule& rule,
                                              std::size_t samples, std::uint64_t seed);

/// Schedule generated by a uniformly random decision rule.
std::vector<StageReference> uniform_schedule(const MdpModel& model, std::size_t samples, std::uint64_t seed);

struct FixedPointOptions {
  std::size_t iterations = 3;  // K_fp
  std::size_t samples = 2000;
  std::uint64_t seed = 1;
};

struct FixedPointResult {
  MdpModel model;  // model with the final schedule
  DpSolution solution;
  std::size_t iterations_run = 0;
  bool converged = false;  // last re-solve left the policy unchanged
};

/// Builds a uniform-policy schedule when the model has none, solves, then
/// alternates schedule re-estimation under u* and re-solving, up to
/// `iterations` times or until the policy stops changing.
FixedPointResult solve_dp_fixed_point(MdpModel model, const FixedPointOptions& options = {});

struct MonotoneViolation {
  std::size_t n = 0;
  std::size_t o = 0;
  std::size_t b = 0;  // u*(b) < u*(b - 1)
  std::size_t previous_action = 0;
  std::size_t action = 0;
};

struct ThresholdReport {
  std::vector<MonotoneViolation> violations;
  std::size_t cells_checked = 0;  // (n, o) pairs
  bool passed() const { return violations.empty(); }
};

/// Checks that u*[n][o][.] is nondecreasing in b for every (o, n >= 1).
ThresholdReport verify_threshold_structure(const PolicyTable& policy);

/// CSV with header "n,o,b,V,u*"; the action column is empty at n = 0.
void write_solution_csv(std::ostream& os, const DpSolution& solution);

}  // namespace covert
