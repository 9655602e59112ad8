#include "covert/mdp.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "covert/errors.hpp"
#include "covert/shape.hpp"

namespace covert {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) {
    throw ConfigError(message);
  }
}

void check_weights(const std::vector<double>& w, std::size_t expected, const std::string& what,
                   const std::string& tag) {
  require(w.size() == expected, tag + ": " + what + " needs " + std::to_string(expected) + " entries, got " +
                                    std::to_string(w.size()));
  for (std::size_t k = 0; k < w.size(); ++k) {
    require(std::isfinite(w[k]), tag + ": " + what + " is not finite at " + std::to_string(k));
  }
  const double tol = shape_tolerance(w);
  if (auto k = first_decrease(w, tol)) {
    throw ConfigError(tag + ": " + what + " decreases at index " + std::to_string(*k));
  }
  if (auto k = first_concavity(w, tol)) {
    throw ConfigError(tag + ": " + what + " is not convex at index " + std::to_string(*k));
  }
}

}  // namespace

Action MdpModel::action(std::size_t index) const {
  if (index >= num_actions()) {
    throw IndexError("action index " + std::to_string(index) + " out of range [0, " +
                     std::to_string(num_actions()) + ")");
  }
  return Action{index >= num_incentives(), index % num_incentives()};
}

std::size_t MdpModel::action_index(Action a) const {
  if (a.incentive >= num_incentives()) {
    throw IndexError("incentive index " + std::to_string(a.incentive) + " out of range");
  }
  return (a.learn ? num_incentives() : 0) + a.incentive;
}

double MdpModel::incentive_of(std::size_t index) const { return incentives[action(index).incentive]; }

double MdpModel::effective_belief(double belief) const { return std::clamp(belief, belief_floor, 1.0); }

Vector MdpModel::initial_oracle_distribution() const {
  if (!initial_oracle.empty()) {
    return Eigen::Map<const Vector>(initial_oracle.data(), static_cast<Eigen::Index>(initial_oracle.size()));
  }
  return stationary_distribution(transition);
}

void MdpModel::validate() const {
  require(queue_capacity >= 1, "model: queue capacity M must be at least 1");
  require(horizon >= 1, "model: horizon N must be at least 1");
  require(!incentives.empty(), "model: at least one incentive level is required");
  for (std::size_t k = 0; k < incentives.size(); ++k) {
    require(incentives[k] > 0.0 && std::isfinite(incentives[k]), "model: incentives must be positive");
    require(k == 0 || incentives[k] > incentives[k - 1], "model: incentives must be strictly increasing");
  }
  const auto r = static_cast<Eigen::Index>(success.rows());
  require(r >= 1, "model: at least one oracle state is required");
  require(success.cols() == static_cast<Eigen::Index>(incentives.size()),
          "model: success matrix needs one column per incentive level");
  require(transition.rows() == r && transition.cols() == r, "model: transition matrix must be R x R");
  for (Eigen::Index o = 0; o < r; ++o) {
    for (Eigen::Index i = 0; i < success.cols(); ++i) {
      require(success(o, i) >= 0.0 && success(o, i) <= 1.0, "model: success probabilities must lie in [0,1]");
    }
    require(transition.row(o).minCoeff() >= 0.0, "model: transition probabilities must be nonnegative");
    require(std::abs(transition.row(o).sum() - 1.0) <= 1e-12, "model: transition rows must sum to 1");
  }
  check_weights(queue_weight, num_queue_states(), "queue weight psi1", "R1");
  check_weights(oracle_weight, num_oracle_states(), "oracle weight psi2", "R1");
  for (double w : queue_weight) {
    require(w > 0.0, "R1: queue weight psi1 must be positive");
  }
  for (double w : oracle_weight) {
    require(w > 0.0, "R1: oracle weight psi2 must be positive");
  }
  check_weights(terminal_cost, num_queue_states(), "terminal cost d", "R3");
  require(schedule.empty() || schedule.size() == horizon + 1, "model: schedule needs N + 1 entries");
  require(belief_floor > 0.0 && belief_floor <= 1.0, "model: belief floor must lie in (0, 1]");
  if (!initial_oracle.empty()) {
    require(initial_oracle.size() == num_oracle_states(), "model: initial oracle distribution has wrong size");
  }
}

std::vector<Transition> transition_distribution(const MdpModel& model, std::size_t b, std::size_t o,
                                                std::size_t action) {
  if (b > model.queue_capacity) {
    throw IndexError("queue state " + std::to_string(b) + " out of range");
  }
  if (o >= model.num_oracle_states()) {
    throw IndexError("oracle state " + std::to_string(o) + " out of range");
  }
  const Action a = model.action(action);
  const auto r = model.num_oracle_states();
  const auto oi = static_cast<Eigen::Index>(o);
  std::vector<Transition> out;
  const bool moves = a.learn && b > 0;
  const double g = moves ? model.success(oi, static_cast<Eigen::Index>(a.incentive)) : 0.0;

  if (model.dynamics == OracleDynamics::kQueueCoupled) {
    if (moves) {
      for (std::size_t p = 0; p < r; ++p) {
        out.push_back({b - 1, p, g * model.transition(oi, static_cast<Eigen::Index>(p))});
      }
    }
    out.push_back({b, o, 1.0 - g});
    return out;
  }
  for (std::size_t p = 0; p < r; ++p) {
    const double t = model.transition(oi, static_cast<Eigen::Index>(p));
    if (moves) {
      out.push_back({b - 1, p, g * t});
    }
    out.push_back({b, p, (1.0 - g) * t});
  }
  return out;
}

double stage_cost(const MdpModel& model, std::size_t b, std::size_t o, std::size_t action,
                  double incentive_sum, double belief) {
  if (b > model.queue_capacity || o >= model.num_oracle_states()) {
    throw IndexError("stage_cost: state (" + std::to_string(b) + "," + std::to_string(o) + ") out of range");
  }
  if (!(belief > 0.0 && belief <= 1.0)) {
    throw DomainError("stage_cost: belief must lie in (0, 1], got " + std::to_string(belief));
  }
  if (!(incentive_sum >= 0.0)) {
    throw DomainError("stage_cost: incentive sum must be nonnegative");
  }
  const Action a = model.action(action);
  const double i = model.incentives[a.incentive];
  const double psi1 = model.queue_weight[b];
  const double psi2 = model.oracle_weight[o];
  if (a.learn) {
    return psi1 / psi2 * std::log((incentive_sum + i / belief) / (incentive_sum + i));
  }
  const double base = incentive_sum > 0.0 ? incentive_sum : model.incentives.front();
  return psi2 / psi1 * std::log(base / (base + i));
}

DpSolution solve_dp(const MdpModel& model) {
  model.validate();
  if (model.schedule.size() != model.horizon + 1) {
    throw ConfigError("solve_dp: model has no cost schedule");
  }
  const auto n_stages = model.horizon;
  const auto r = model.num_oracle_states();
  const auto nb = model.num_queue_states();
  const auto na = model.num_actions();
  const double scale = 1.0 / static_cast<double>(n_stages);

  DpSolution sol;
  sol.value = ValueTable(n_stages + 1, r, nb, 0.0);
  sol.policy = PolicyTable(n_stages + 1, r, nb, 0);
  sol.num_actions = na;
  sol.q.assign((n_stages + 1) * r * nb * na, 0.0);

  for (std::size_t o = 0; o < r; ++o) {
    for (std::size_t b = 0; b < nb; ++b) {
      sol.value(0, o, b) = model.terminal_cost[b];
    }
  }

  for (std::size_t n = 1; n <= n_stages; ++n) {
    const auto& ref = model.schedule[n];
    const double belief = model.effective_belief(ref.belief);
    for (std::size_t o = 0; o < r; ++o) {
      for (std::size_t b = 0; b < nb; ++b) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_u = 0;
        for (std::size_t u = 0; u < na; ++u) {
          double q = scale * stage_cost(model, b, o, u, ref.incentive_sum, belief);
          for (const auto& t : transition_distribution(model, b, o, u)) {
            q += t.probability * sol.value(n - 1, t.oracle, t.queue);
          }
          if (!std::isfinite(q)) {
            std::ostringstream os;
            os << "solve_dp: non-finite Q at (n=" << n << ", o=" << o << ", b=" << b << ", u=" << u << ")";
            throw NumericError(os.str());
          }
          sol.q[((n * r + o) * nb + b) * na + u] = q;
          if (u == 0 || q < best - 1e-12 * std::max(1.0, std::abs(best))) {
            best = q;
            best_u = u;
          }
        }
        sol.value(n, o, b) = best;
        sol.policy(n, o, b) = best_u;
      }
    }
  }
  return sol;
}

ThresholdReport verify_threshold_structure(const PolicyTable& policy) {
  ThresholdReport report;
  for (std::size_t n = 1; n < policy.stages(); ++n) {
    for (std::size_t o = 0; o < policy.oracle_states(); ++o) {
      ++report.cells_checked;
      for (std::size_t b = 1; b < policy.queue_states(); ++b) {
        if (policy(n, o, b) < policy(n, o, b - 1)) {
          report.violations.push_back({n, o, b, policy(n, o, b - 1), policy(n, o, b)});
        }
      }
    }
  }
  return report;
}

void write_solution_csv(std::ostream& os, const DpSolution& solution) {
  os << "n,o,b,V,u*\n";
  const auto& v = solution.value;
  os.precision(17);
  for (std::size_t n = 0; n < v.stages(); ++n) {
    for (std::size_t o = 0; o < v.oracle_states(); ++o) {
      for (std::size_t b = 0; b < v.queue_states(); ++b) {
        os << n << ',' << o << ',' << b << ',' << v(n, o, b) << ',';
        if (n > 0) {
          os << solution.policy(n, o, b);
        }
        os << '\n';
      }
    }
  }
}

}  // namespace covert
