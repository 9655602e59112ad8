#include "covert/benchmark.hpp"

#include <cmath>
#include <ostream>

namespace covert {

StationarySurrogate dp_stationary_surrogate(const Environment& env, const PolicyTable& policy,
                                            std::size_t episodes, std::uint64_t seed) {
  const auto na = env.model.num_actions();
  std::vector<std::pair<std::size_t, ThresholdPolicy>> candidates;
  for (std::size_t n = 1; n < policy.stages(); ++n) {
    ThresholdPolicy t = thresholds_from_stage(policy, n, na, 0.1);
    bool seen = false;
    for (const auto& c : candidates) {
      seen = seen || c.second.thresholds == t.thresholds;
    }
    if (!seen) {
      candidates.emplace_back(n, std::move(t));
    }
  }
  StationarySurrogate best;
  bool first = true;
  for (const auto& [n, t] : candidates) {
    const auto ev = evaluate_policy(env, StationaryThresholdPolicy(t, ActionMode::kHard), episodes, seed);
    if (first || ev.mean_cost < best.evaluation.mean_cost) {
      best = {t, n, ev};
      first = false;
    }
  }
  return best;
}

std::vector<ThresholdPolicy> ucb_arm_grid(const ExperimentConfig& config, const MdpModel& model) {
  std::vector<double> values;
  if (config.ucb_grid_points == 0) {
    values = integer_values(model.queue_capacity);
  } else {
    const double top = static_cast<double>(model.queue_capacity + 1);
    const auto k = config.ucb_grid_points;
    for (std::size_t j = 0; j < k; ++j) {
      values.push_back(k == 1 ? 0.0 : std::round(top * static_cast<double>(j) / static_cast<double>(k - 1)));
    }
  }
  GridOptions g;
  g.shared_across_states = config.ucb_shared_rows;
  return threshold_grid(model.num_oracle_states(), model.num_actions(), values, g);
}

BenchmarkResult run_benchmark(const ExperimentConfig& config, const BenchmarkSelection& selection) {
  BenchmarkResult out;
  MdpModel model = derive_model(config, &out.structure);
  FixedPointResult fp = solve_dp_fixed_point(model, config.fixed_point);
  out.model = fp.model;
  out.solution = std::move(fp.solution);
  const Environment env = make_environment(config, out.model);
  const std::uint64_t eval_seed = split_seed(config.seed, 200);

  out.surrogate = dp_stationary_surrogate(env, out.solution.policy, config.surrogate_episodes,
                                          split_seed(config.seed, 201));
  auto add = [&](const Policy& p) {
    out.rows.push_back({p.name(), evaluate_policy(env, p, config.episodes, eval_seed)});
  };
  add(StationaryThresholdPolicy(out.surrogate.policy, ActionMode::kHard, "dp-optimal-stationary"));
  if (selection.spsa) {
    const auto init = neutral_thresholds(model.num_oracle_states(), model.num_actions(), model.queue_capacity,
                                         config.temperature);
    const auto res = spsa_search(env, init, config.spsa);
    add(StationaryThresholdPolicy(res.policy, ActionMode::kHard, "spsa"));
  }
  if (selection.ucb) {
    const auto arms = ucb_arm_grid(config, out.model);
    const auto state = ucb_policy_search(env, arms, config.ucb);
    add(StationaryThresholdPolicy(arms[state.best_arm()], ActionMode::kHard, "ucb"));
  }
  add(*make_greedy_policy(out.model));
  add(RandomPolicy(out.model.num_actions()));
  return out;
}

void write_benchmark_csv(std::ostream& os, const std::vector<BenchmarkRow>& rows) {
  os << "policy,episodes,mean_cost,stderr_cost,completion_rate,map_correct_rate,mean_spend,"
        "mean_gradient_norm_sq,mean_final_queue\n";
  os.precision(10);
  for (const auto& r : rows) {
    const auto& e = r.evaluation;
    os << r.policy << ',' << e.episodes << ',' << e.mean_cost << ',' << e.stderr_cost << ',' << e.completion_rate
       << ',' << e.map_correct_rate << ',' << e.mean_spend << ',' << e.mean_gradient_norm_sq << ','
       << e.mean_final_queue << '\n';
  }
}

}  // namespace covert
