#include "covert/mdp.hpp"

#include "covert/errors.hpp"

namespace covert {

std::vector<StageReference> simulate_schedule(const MdpModel& model, const StageRule& rule,
                                              std::size_t samples, std::uint64_t seed) {
  if (samples == 0) {
    throw DomainError("simulate_schedule: at least one sample is required");
  }
  const auto n_stages = model.horizon;
  std::vector<double> incentive_sum(n_stages + 1, 0.0);
  std::vector<double> belief(n_stages + 1, 0.0);
  const Vector start = model.initial_oracle_distribution();

  for (std::size_t s = 0; s < samples; ++s) {
    Rng rng(split_seed(seed, s));
    std::size_t o = sample_categorical(start, rng);
    std::size_t b = model.queue_capacity;
    double total = 0.0;
    double first = 0.0;
    for (std::size_t n = n_stages; n >= 1; --n) {
      incentive_sum[n] += total;
      belief[n] += total > 0.0 ? first / total : 0.5;
      const std::size_t u = rule(n, o, b, rng);
      const Action a = model.action(u);
      const double i = model.incentives[a.incentive];
      total += i;
      if (a.learn) {
        first += i;
      }
      const auto next = transition_distribution(model, b, o, u);
      Vector p(static_cast<Eigen::Index>(next.size()));
      for (std::size_t k = 0; k < next.size(); ++k) {
        p(static_cast<Eigen::Index>(k)) = next[k].probability;
      }
      const auto pick = next[sample_categorical(p, rng)];
      b = pick.queue;
      o = pick.oracle;
    }
  }
  std::vector<StageReference> out(n_stages + 1);
  const double inv = 1.0 / static_cast<double>(samples);
  for (std::size_t n = 1; n <= n_stages; ++n) {
    out[n] = {incentive_sum[n] * inv, belief[n] * inv};
  }
  out[0] = out[1];
  return out;
}

std::vector<StageReference> uniform_schedule(const MdpModel& model, std::size_t samples, std::uint64_t seed) {
  const auto na = model.num_actions();
  return simulate_schedule(
      model, [na](std::size_t, std::size_t, std::size_t, Rng& rng) { return rng.index(na); }, samples, seed);
}

FixedPointResult solve_dp_fixed_point(MdpModel model, const FixedPointOptions& options) {
  if (model.schedule.empty()) {
    model.schedule = uniform_schedule(model, options.samples, options.seed);
  }
  FixedPointResult result;
  result.solution = solve_dp(model);
  for (std::size_t k = 0; k < options.iterations; ++k) {
    const PolicyTable& policy = result.solution.policy;
    model.schedule = simulate_schedule(
        model, [&policy](std::size_t n, std::size_t o, std::size_t b, Rng&) { return policy(n, o, b); },
        options.samples, split_seed(options.seed, k + 1));
    DpSolution next = solve_dp(model);
    ++result.iterations_run;
    const bool unchanged = next.policy == result.solution.policy;
    result.solution = std::move(next);
    if (unchanged) {
      result.converged = true;
      break;
    }
  }
  result.model = std::move(model);
  return result;
}

}  // namespace covert
