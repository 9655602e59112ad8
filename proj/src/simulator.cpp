#include "covert/simulator.hpp"

#include <cmath>
#include <string>

#include "covert/errors.hpp"

namespace covert {

void Environment::validate() const {
  model.validate();
  if (oracle.success != model.success || oracle.transition != model.transition) {
    throw ConfigError("environment: oracle and MDP disagree on success or transition probabilities");
  }
  oracle.validate();
  const auto d = learn_start.size();
  if (d == 0 || obfuscate_start.size() != d || objective.minimizer.size() != d) {
    throw ShapeError("environment: starting points and objective must share a positive dimension");
  }
  if (!(step_size > 0.0)) {
    throw ConfigError("environment: step size must be positive");
  }
  if (initial_oracle_state && *initial_oracle_state >= model.num_oracle_states()) {
    throw ConfigError("environment: initial oracle state out of range");
  }
}

void EpisodeTrace::validate(std::size_t horizon, std::size_t queue_capacity) const {
  if (steps.size() > horizon) {
    throw NumericError("trace: " + std::to_string(steps.size()) + " steps exceed the horizon");
  }
  std::size_t b = queue_capacity;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const auto& s = steps[k];
    if (s.queue != b) {
      throw NumericError("trace: queue changed without a successful learning step before step " +
                         std::to_string(k));
    }
    if (s.learn && s.success && b > 0) {
      --b;
    }
  }
  if (final_queue != b) {
    throw NumericError("trace: terminal queue inconsistent with the steps");
  }
}

namespace {

template <class E>
[[noreturn]] void rethrow_at(const E& e, std::size_t n) {
  throw E("step n=" + std::to_string(n) + ": " + e.what());
}

}  // namespace

EpisodeTrace run_episode(const Environment& env, const Policy& policy, Rng& rng) {
  const auto& model = env.model;
  const auto n_stages = model.horizon;
  EpisodeTrace trace;
  trace.steps.reserve(n_stages);

  DualSgState sg{env.learn_start, env.obfuscate_start, env.step_size, 0, std::nullopt};
  EavesdropperBelief belief;
  std::size_t b = model.queue_capacity;
  std::size_t o = env.initial_oracle_state ? *env.initial_oracle_state
                                           : sample_categorical(model.initial_oracle_distribution(), rng);
  double paid = 0.0;

  for (std::size_t n = n_stages; n >= 1; --n) {
    try {
      StepRecord rec;
      rec.n = n;
      rec.oracle_state = o;
      rec.queue = b;
      rec.action = policy.act(n, o, b, rng);
      const Action a = model.action(rec.action);
      rec.learn = a.learn;
      rec.incentive = model.incentives[a.incentive];
      rec.belief = belief.delta;
      rec.incentive_sum = paid;
      rec.stage_cost = stage_cost(model, b, o, rec.action, paid, model.effective_belief(belief.delta));

      const Vector& query = make_query(sg, a.learn);
      const Trajectory label = env.labeler.classify(query, a.learn);
      OracleResponse reply = respond(env.oracle, query, o, a.incentive, env.objective.gradient, rng);
      rec.success = reply.success;
      Vector synthetic;
      if (!a.learn) {
        synthetic = synthetic_response(sg, env.synthetic, rng);
      }
      sg = sg_update(sg, a.learn, reply, synthetic);

      belief = update_belief(belief, label, rec.incentive);
      paid += rec.incentive;
      const bool progressed = a.learn && reply.success && b > 0;
      if (progressed) {
        --b;
      }
      if (model.dynamics == OracleDynamics::kIndependent || progressed) {
        o = step_oracle_state(env.oracle, o, rng);
      }
      trace.stage_cost_sum += rec.stage_cost;
      trace.steps.push_back(rec);
    } catch (const IndexError& e) {
      rethrow_at(e, n);
    } catch (const ShapeError& e) {
      rethrow_at(e, n);
    } catch (const DomainError& e) {
      rethrow_at(e, n);
    } catch (const NumericError& e) {
      rethrow_at(e, n);
    } catch (const ConfigError& e) {
      rethrow_at(e, n);
    }
  }

  trace.final_queue = b;
  trace.terminal_cost = model.terminal_cost[b];
  trace.total_cost = trace.stage_cost_sum / static_cast<double>(n_stages) + trace.terminal_cost;
  trace.incentive_spend = paid;
  trace.belief = belief;
  trace.map_choice = map_choice(belief);
  trace.map_correct = trace.map_choice == Trajectory::kFirst;
  trace.gradient_norm_sq = env.objective.gradient(sg.learn).squaredNorm();
  if (!std::isfinite(trace.total_cost)) {
    throw NumericError("run_episode: non-finite episode cost");
  }
  trace.validate(n_stages, model.queue_capacity);
  return trace;
}

double episode_cost(const Environment& env, const Policy& policy, std::uint64_t episode_seed) {
  Rng rng(episode_seed);
  return run_episode(env, policy, rng).total_cost;
}

PolicyEvaluation evaluate_policy(const Environment& env, const Policy& policy, std::size_t episodes,
                                 std::uint64_t seed) {
  if (episodes == 0) {
    throw DomainError("evaluate_policy: at least one episode is required");
  }
  PolicyEvaluation ev;
  ev.episodes = episodes;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t k = 0; k < episodes; ++k) {
    Rng rng(split_seed(seed, k));
    const EpisodeTrace t = run_episode(env, policy, rng);
    sum += t.total_cost;
    sum_sq += t.total_cost * t.total_cost;
    ev.completion_rate += t.completed() ? 1.0 : 0.0;
    ev.map_correct_rate += t.map_correct ? 1.0 : 0.0;
    ev.mean_spend += t.incentive_spend;
    ev.mean_gradient_norm_sq += t.gradient_norm_sq;
    ev.mean_final_queue += static_cast<double>(t.final_queue);
  }
  const double m = static_cast<double>(episodes);
  ev.mean_cost = sum / m;
  if (episodes > 1) {
    const double var = std::max(0.0, (sum_sq - m * ev.mean_cost * ev.mean_cost) / (m - 1.0));
    ev.stderr_cost = std::sqrt(var / m);
  }
  ev.completion_rate /= m;
  ev.map_correct_rate /= m;
  ev.mean_spend /= m;
  ev.mean_gradient_norm_sq /= m;
  ev.mean_final_queue /= m;
  return ev;
}

}  // namespace covert
