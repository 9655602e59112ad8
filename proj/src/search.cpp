#include "covert/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "covert/errors.hpp"

namespace covert {

SpsaTrace spsa_minimize(Vector theta, const NoisyCost& cost, const SpsaOptions& options,
                        const Projection& project) {
  if (options.iterations == 0) {
    throw DomainError("spsa: at least one iteration is required");
  }
  if (!(options.perturbation > 0.0)) {
    throw DomainError("spsa: perturbation must be positive");
  }
  SpsaTrace trace;
  trace.cost.reserve(options.iterations);
  Rng rng(split_seed(options.seed, 0));
  Vector sign(theta.size());
  for (std::size_t k = 0; k < options.iterations; ++k) {
    for (Eigen::Index j = 0; j < sign.size(); ++j) {
      sign(j) = rng.bernoulli(0.5) ? 1.0 : -1.0;
    }
    const std::uint64_t stream = split_seed(options.seed, k + 1);
    const double plus = cost(theta + options.perturbation * sign, stream);
    const double minus = cost(theta - options.perturbation * sign, stream);
    const double diff = (plus - minus) / (2.0 * options.perturbation);
    theta -= options.step * diff * sign.cwiseInverse();
    if (project) {
      project(theta);
    }
    trace.cost.push_back(0.5 * (plus + minus));
  }
  trace.theta = std::move(theta);
  return trace;
}

namespace {

Vector flatten(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unflatten(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

}  // namespace

SpsaPolicyResult spsa_search(const Environment& env, ThresholdPolicy initial, const SpsaOptions& options,
                             ActionMode mode) {
  initial.validate();
  const auto rows = initial.thresholds.rows();
  const auto cols = initial.thresholds.cols();
  const double upper = static_cast<double>(env.model.queue_capacity + 1);
  const double scale = options.threshold_unit > 0.0 ? options.threshold_unit : upper;
  const double tau = initial.temperature;
  auto as_policy = [&](const Vector& theta) {
    return ThresholdPolicy{unflatten(theta, rows, cols) * scale, tau};
  };
  const NoisyCost cost = [&](const Vector& theta, std::uint64_t stream) {
    // Perturbed points may leave the monotone cone; evaluate them as given.
    return episode_cost(env, StationaryThresholdPolicy(as_policy(theta), mode, "spsa", false), stream);
  };
  const Projection project = [&](Vector& theta) {
    ThresholdPolicy p{unflatten(theta, rows, cols), tau};
    project_monotone(p, upper / scale);
    theta = flatten(p.thresholds);
  };
  SpsaTrace trace = spsa_minimize(flatten(initial.thresholds) / scale, cost, options, project);
  return {as_policy(trace.theta), std::move(trace.cost)};
}

ThresholdPolicy neutral_thresholds(std::size_t oracle_states, std::size_t num_actions, std::size_t queue_capacity,
                                   double temperature) {
  ThresholdPolicy p;
  p.temperature = temperature;
  p.thresholds.resize(static_cast<Eigen::Index>(oracle_states), static_cast<Eigen::Index>(num_actions));
  const double top = static_cast<double>(queue_capacity + 1);
  for (Eigen::Index u = 0; u < p.thresholds.cols(); ++u) {
    p.thresholds.col(u).setConstant(top * static_cast<double>(u) / static_cast<double>(num_actions));
  }
  return p;
}

std::size_t BanditState::best_arm() const {
  std::size_t best = 0;
  for (std::size_t a = 1; a < mean_reward.size(); ++a) {
    if (mean_reward[a] > mean_reward[best]) {
      best = a;
    }
  }
  return best;
}

BanditState ucb_search(std::size_t arms, const ArmReward& reward, const UcbOptions& options,
                       const std::vector<double>& arm_means) {
  if (arms == 0) {
    throw DomainError("ucb: no arms");
  }
  if (options.episodes < arms) {
    throw DomainError("ucb: T = " + std::to_string(options.episodes) + " is smaller than the " +
                      std::to_string(arms) + " arms; use a smaller threshold grid");
  }
  if (!arm_means.empty() && arm_means.size() != arms) {
    throw ShapeError("ucb: arm_means must have one entry per arm");
  }
  BanditState s;
  s.pulls.assign(arms, 0);
  s.mean_reward.assign(arms, 0.0);
  s.regret.reserve(options.episodes);
  std::vector<std::size_t> chosen;
  chosen.reserve(options.episodes);
  const double best_mean =
      arm_means.empty() ? 0.0 : *std::max_element(arm_means.begin(), arm_means.end());

  for (std::size_t k = 0; k < options.episodes; ++k) {
    std::size_t arm = 0;
    if (k < arms) {
      arm = k;
    } else {
      const double log_t = std::log(static_cast<double>(s.t));
      double best_index = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < arms; ++a) {
        const double idx = s.mean_reward[a] +
                           options.exploration * std::sqrt(2.0 * log_t / static_cast<double>(s.pulls[a]));
        if (idx > best_index) {
          best_index = idx;
          arm = a;
        }
      }
    }
    const double r = reward(arm, split_seed(options.seed, k));
    ++s.pulls[arm];
    ++s.t;
    s.mean_reward[arm] += (r - s.mean_reward[arm]) / static_cast<double>(s.pulls[arm]);
    chosen.push_back(arm);
    if (!arm_means.empty()) {
      const double prev = s.regret.empty() ? 0.0 : s.regret.back();
      s.regret.push_back(prev + (best_mean - arm_means[arm]));
    }
  }
  if (arm_means.empty()) {
    const double best = s.mean_reward[s.best_arm()];
    double acc = 0.0;
    for (std::size_t arm : chosen) {
      acc += best - s.mean_reward[arm];
      s.regret.push_back(acc);
    }
  }
  return s;
}

std::vector<ThresholdPolicy> threshold_grid(std::size_t oracle_states, std::size_t num_actions,
                                            const std::vector<double>& values, const GridOptions& options) {
  if (oracle_states == 0 || num_actions == 0 || values.empty()) {
    throw DomainError("threshold_grid: empty table or value set");
  }
  const std::size_t free_cols = options.pin_first ? num_actions - 1 : num_actions;
  // Rows as index tuples into `values`, then their product over oracle states.
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> digits(free_cols, 0);
  for (bool more = true; more;) {
    bool keep = true;
    for (std::size_t k = 1; keep && options.monotone && k < free_cols; ++k) {
      keep = values[digits[k]] >= values[digits[k - 1]];
    }
    if (keep) {
      std::vector<double> row;
      if (options.pin_first) {
        row.push_back(0.0);
      }
      for (auto d : digits) {
        row.push_back(values[d]);
      }
      rows.push_back(std::move(row));
    }
    more = false;
    for (std::size_t k = free_cols; k-- > 0;) {
      if (++digits[k] < values.size()) {
        more = true;
        break;
      }
      digits[k] = 0;
    }
  }
  const std::size_t blocks = options.shared_across_states ? 1 : oracle_states;
  std::vector<ThresholdPolicy> grid;
  std::vector<std::size_t> pick(blocks, 0);
  for (bool more = true; more;) {
    ThresholdPolicy p;
    p.temperature = options.temperature;
    p.thresholds.resize(static_cast<Eigen::Index>(oracle_states), static_cast<Eigen::Index>(num_actions));
    for (std::size_t o = 0; o < oracle_states; ++o) {
      const auto& row = rows[pick[options.shared_across_states ? 0 : o]];
      for (std::size_t u = 0; u < num_actions; ++u) {
        p.thresholds(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(u)) = row[u];
      }
    }
    grid.push_back(std::move(p));
    more = false;
    for (std::size_t k = blocks; k-- > 0;) {
      if (++pick[k] < rows.size()) {
        more = true;
        break;
      }
      pick[k] = 0;
    }
  }
  return grid;
}

std::vector<double> integer_values(std::size_t max_value) {
  std::vector<double> v(max_value + 1);
  for (std::size_t k = 0; k <= max_value; ++k) {
    v[k] = static_cast<double>(k);
  }
  return v;
}

BanditState ucb_policy_search(const Environment& env, const std::vector<ThresholdPolicy>& arms,
                              const UcbOptions& options, const std::vector<double>& arm_means) {
  std::vector<StationaryThresholdPolicy> policies;
  policies.reserve(arms.size());
  for (const auto& a : arms) {
    policies.emplace_back(a, ActionMode::kHard);
  }
  const ArmReward reward = [&](std::size_t arm, std::uint64_t stream) {
    return -episode_cost(env, policies[arm], stream);
  };
  return ucb_search(arms.size(), reward, options, arm_means);
}

}  // namespace covert
