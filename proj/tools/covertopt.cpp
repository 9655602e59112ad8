// Command-line driver: solve, search, simulate, benchmark and check covert
// optimization experiments described by a JSON config.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "covert/benchmark.hpp"
#include "covert/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace covert;

namespace {

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> episodes;
  std::string out_dir = "out";
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "Master seed (overrides the config)");
  cmd->add_option("--episodes", args.episodes, "Monte-Carlo episodes (overrides the config)");
  cmd->add_option("--out-dir", args.out_dir, "Output directory")->capture_default_str();
}

ExperimentConfig load(const CommonArgs& args) {
  ExperimentConfig c = load_config(args.config);
  if (args.seed) {
    c.seed = *args.seed;
    c.fixed_point.seed = split_seed(c.seed, 101);
    c.spsa.seed = split_seed(c.seed, 102);
    c.ucb.seed = split_seed(c.seed, 103);
  }
  if (args.episodes) {
    c.episodes = *args.episodes;
  }
  return c;
}

std::ofstream open_out(const CommonArgs& args, const std::string& name) {
  fs::create_directories(args.out_dir);
  std::ofstream os(fs::path(args.out_dir) / name);
  if (!os) {
    throw ConfigError("cannot write " + (fs::path(args.out_dir) / name).string());
  }
  return os;
}

void write_json(const CommonArgs& args, const std::string& name, const json& j) {
  open_out(args, name) << j.dump(2) << '\n';
}

json to_json(const PolicyEvaluation& e) {
  return {{"episodes", e.episodes},
          {"mean_cost", e.mean_cost},
          {"stderr_cost", e.stderr_cost},
          {"completion_rate", e.completion_rate},
          {"map_correct_rate", e.map_correct_rate},
          {"mean_spend", e.mean_spend},
          {"mean_gradient_norm_sq", e.mean_gradient_norm_sq},
          {"mean_final_queue", e.mean_final_queue}};
}

json to_json(const StructureReport& r) {
  json j = json::object();
  for (const auto& c : r.checks) {
    j[c.name] = {{"passed", c.passed}, {"tuples", c.tuples_checked}, {"failures", c.failures},
                 {"examples", c.examples}};
  }
  return j;
}

json to_json(const ThresholdPolicy& p) {
  json rows = json::array();
  for (Eigen::Index o = 0; o < p.thresholds.rows(); ++o) {
    json row = json::array();
    for (Eigen::Index u = 0; u < p.thresholds.cols(); ++u) {
      row.push_back(p.thresholds(o, u));
    }
    rows.push_back(row);
  }
  return {{"thresholds", rows}, {"temperature", p.temperature}};
}

json model_json(const MdpModel& m) {
  return {{"queue_capacity", m.queue_capacity},
          {"horizon", m.horizon},
          {"oracle_states", m.num_oracle_states()},
          {"actions", m.num_actions()}};
}

int cmd_check(const CommonArgs& args) {
  const ExperimentConfig c = load(args);
  StructureReport report;
  const MdpModel m = derive_model(c, &report);
  std::cout << report.summary();
  write_json(args, "check.json", {{"model", model_json(m)}, {"structure", to_json(report)},
                                  {"all_passed", report.all_passed()}});
  return report.all_passed() ? 0 : 2;
}

int cmd_solve(const CommonArgs& args) {
  const ExperimentConfig c = load(args);
  StructureReport report;
  const MdpModel m = derive_model(c, &report);
  std::cout << report.summary();
  const FixedPointResult fp = solve_dp_fixed_point(m, c.fixed_point);
  const ThresholdReport thr = verify_threshold_structure(fp.solution.policy);
  {
    auto os = open_out(args, "value_policy.csv");
    write_solution_csv(os, fp.solution);
  }
  {
    auto os = open_out(args, "schedule.csv");
    os << "n,incentive_sum,belief\n";
    for (std::size_t n = 1; n < fp.model.schedule.size(); ++n) {
      os << n << ',' << fp.model.schedule[n].incentive_sum << ',' << fp.model.schedule[n].belief << '\n';
    }
  }
  json violations = json::array();
  for (std::size_t k = 0; k < thr.violations.size() && k < 20; ++k) {
    const auto& v = thr.violations[k];
    violations.push_back({{"n", v.n}, {"o", v.o}, {"b", v.b}, {"previous", v.previous_action}, {"action", v.action}});
  }
  const std::size_t o0 = 0;
  const double v_start = fp.solution.value(m.horizon, o0, m.queue_capacity);
  write_json(args, "solve.json",
             {{"model", model_json(fp.model)},
              {"structure", to_json(report)},
              {"fixed_point_iterations", fp.iterations_run},
              {"fixed_point_converged", fp.converged},
              {"threshold_structure", {{"passed", thr.passed()}, {"violations", thr.violations.size()},
                                       {"first_violations", violations}}},
              {"value_at_start_state0", v_start}});
  std::cout << "threshold structure: " << (thr.passed() ? "pass" : "FAIL") << " (" << thr.violations.size()
            << " violations)\n";
  return 0;
}

int cmd_spsa(const CommonArgs& args) {
  const ExperimentConfig c = load(args);
  const MdpModel m = derive_model(c);
  const FixedPointResult fp = solve_dp_fixed_point(m, c.fixed_point);
  const Environment env = make_environment(c, fp.model);
  const auto init = neutral_thresholds(m.num_oracle_states(), m.num_actions(), m.queue_capacity, c.temperature);
  const auto res = spsa_search(env, init, c.spsa);
  {
    auto os = open_out(args, "spsa_trace.csv");
    os << "iteration,cost\n";
    for (std::size_t k = 0; k < res.cost.size(); ++k) {
      os << k + 1 << ',' << res.cost[k] << '\n';
    }
  }
  const std::uint64_t eval_seed = split_seed(c.seed, 200);
  const auto ev = evaluate_policy(env, StationaryThresholdPolicy(res.policy, ActionMode::kHard), c.episodes,
                                  eval_seed);
  write_json(args, "spsa_policy.json", to_json(res.policy));
  write_json(args, "spsa_summary.json", {{"model", model_json(fp.model)},
                                         {"iterations", c.spsa.iterations},
                                         {"step", c.spsa.step},
                                         {"perturbation", c.spsa.perturbation},
                                         {"evaluation", to_json(ev)}});
  std::cout << "spsa policy cost " << ev.mean_cost << " +/- " << ev.stderr_cost << '\n';
  return 0;
}

int cmd_ucb(const CommonArgs& args) {
  const ExperimentConfig c = load(args);
  const MdpModel m = derive_model(c);
  const FixedPointResult fp = solve_dp_fixed_point(m, c.fixed_point);
  const Environment env = make_environment(c, fp.model);
  const auto arms = ucb_arm_grid(c, fp.model);
  const auto state = ucb_policy_search(env, arms, c.ucb);
  {
    auto os = open_out(args, "ucb_trace.csv");
    os << "episode,cumulative_regret\n";
    for (std::size_t k = 0; k < state.regret.size(); ++k) {
      os << k + 1 << ',' << state.regret[k] << '\n';
    }
  }
  {
    auto os = open_out(args, "ucb_arms.csv");
    os << "arm,pulls,mean_reward\n";
    for (std::size_t a = 0; a < arms.size(); ++a) {
      os << a << ',' << state.pulls[a] << ',' << state.mean_reward[a] << '\n';
    }
  }
  const auto best = state.best_arm();
  const auto ev = evaluate_policy(env, StationaryThresholdPolicy(arms[best], ActionMode::kHard), c.episodes,
                                  split_seed(c.seed, 200));
  write_json(args, "ucb_summary.json", {{"model", model_json(fp.model)},
                                        {"arms", arms.size()},
                                        {"episodes", c.ucb.episodes},
                                        {"best_arm", best},
                                        {"best_policy", to_json(arms[best])},
                                        {"final_regret", state.regret.empty() ? 0.0 : state.regret.back()},
                                        {"evaluation", to_json(ev)}});
  std::cout << "ucb best arm " << best << " of " << arms.size() << ", cost " << ev.mean_cost << '\n';
  return 0;
}

int cmd_simulate(const CommonArgs& args, const std::string& policy_name) {
  const ExperimentConfig c = load(args);
  const MdpModel m = derive_model(c);
  const FixedPointResult fp = solve_dp_fixed_point(m, c.fixed_point);
  const Environment env = make_environment(c, fp.model);
  std::unique_ptr<Policy> policy;
  if (policy_name == "dp") {
    policy = std::make_unique<TablePolicy>(fp.solution.policy, "dp");
  } else if (policy_name == "greedy") {
    policy = make_greedy_policy(fp.model);
  } else if (policy_name == "random") {
    policy = std::make_unique<RandomPolicy>(fp.model.num_actions());
  } else if (policy_name == "obfuscate") {
    policy = std::make_unique<FixedActionPolicy>(fp.model.num_incentives() - 1, "obfuscate");
  } else {
    throw ConfigError("unknown policy '" + policy_name + "' (dp, greedy, random, obfuscate)");
  }
  const std::uint64_t seed = split_seed(c.seed, 200);
  auto episodes = open_out(args, "episodes.csv");
  episodes << "episode,total_cost,final_queue,incentive_spend,belief,map_correct,gradient_norm_sq\n";
  episodes.precision(10);
  auto steps = open_out(args, "steps.csv");
  steps << "episode,n,o,b,action,learn,incentive,success,belief,incentive_sum,stage_cost\n";
  steps.precision(10);
  for (std::size_t k = 0; k < c.episodes; ++k) {
    Rng rng(split_seed(seed, k));
    const EpisodeTrace t = run_episode(env, *policy, rng);
    episodes << k << ',' << t.total_cost << ',' << t.final_queue << ',' << t.incentive_spend << ','
             << t.belief.delta << ',' << t.map_correct << ',' << t.gradient_norm_sq << '\n';
    for (const auto& s : t.steps) {
      steps << k << ',' << s.n << ',' << s.oracle_state << ',' << s.queue << ',' << s.action << ',' << s.learn
            << ',' << s.incentive << ',' << s.success << ',' << s.belief << ',' << s.incentive_sum << ','
            << s.stage_cost << '\n';
    }
  }
  const auto ev = evaluate_policy(env, *policy, c.episodes, seed);
  write_json(args, "simulate_summary.json",
             {{"policy", policy->name()}, {"model", model_json(fp.model)}, {"evaluation", to_json(ev)}});
  std::cout << policy->name() << ": cost " << ev.mean_cost << ", completion " << ev.completion_rate << '\n';
  return 0;
}

int cmd_benchmark(const CommonArgs& args, bool skip_spsa, bool skip_ucb) {
  const ExperimentConfig c = load(args);
  const BenchmarkResult res = run_benchmark(c, {!skip_spsa, !skip_ucb});
  {
    auto os = open_out(args, "benchmark.csv");
    write_benchmark_csv(os, res.rows);
  }
  json rows = json::object();
  for (const auto& r : res.rows) {
    rows[r.policy] = to_json(r.evaluation);
  }
  write_json(args, "benchmark_summary.json",
             {{"model", model_json(res.model)},
              {"seed", c.seed},
              {"episodes", c.episodes},
              {"structure", to_json(res.structure)},
              {"threshold_structure_passed", verify_threshold_structure(res.solution.policy).passed()},
              {"surrogate", {{"stage", res.surrogate.stage}, {"policy", to_json(res.surrogate.policy)}}},
              {"policies", rows}});
  write_benchmark_csv(std::cout, res.rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covert stochastic optimization: MDP solving, threshold policy search and simulation"};
  app.require_subcommand(1);
  CommonArgs args;
  std::string policy_name = "dp";
  bool skip_spsa = false;
  bool skip_ucb = false;

  auto* solve = app.add_subcommand("solve", "Solve the MDP by backward induction and report its structure");
  auto* spsa = app.add_subcommand("search-spsa", "Search stationary threshold policies with SPSA");
  auto* ucb = app.add_subcommand("search-ucb", "Search the threshold grid with UCB");
  auto* sim = app.add_subcommand("simulate", "Run control-loop episodes under one policy");
  auto* bench = app.add_subcommand("benchmark", "Compare dp-optimal-stationary, spsa, ucb, greedy and random");
  auto* check = app.add_subcommand("check", "Report the structural assumption checks R1-R6");
  for (auto* cmd : {solve, spsa, ucb, sim, bench, check}) {
    add_common(cmd, args);
  }
  sim->add_option("--policy", policy_name, "dp, greedy, random or obfuscate")->capture_default_str();
  bench->add_flag("--skip-spsa", skip_spsa, "Leave SPSA out");
  bench->add_flag("--skip-ucb", skip_ucb, "Leave UCB out");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*solve) return cmd_solve(args);
    if (*spsa) return cmd_spsa(args);
    if (*ucb) return cmd_ucb(args);
    if (*sim) return cmd_simulate(args, policy_name);
    if (*bench) return cmd_benchmark(args, skip_spsa, skip_ucb);
    if (*check) return cmd_check(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
