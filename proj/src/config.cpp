#include "covert/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "covert/errors.hpp"

namespace covert {

using nlohmann::json;

std::vector<double> WeightSpec::evaluate(std::size_t count, std::size_t first) const {
  std::vector<double> out(count);
  if (kind == "values") {
    if (values.size() != count) {
      throw ConfigError("weight: expected " + std::to_string(count) + " values, got " +
                        std::to_string(values.size()));
    }
    return values;
  }
  for (std::size_t k = 0; k < count; ++k) {
    const double x = static_cast<double>(first + k);
    if (kind == "quadratic") {
      out[k] = scale * x * x + offset;
    } else if (kind == "linear") {
      out[k] = scale * x + offset;
    } else if (kind == "power") {
      out[k] = scale * std::pow(x, exponent) + offset;
    } else if (kind == "constant") {
      out[k] = offset;
    } else {
      throw ConfigError("weight: unknown kind '" + kind + "'");
    }
  }
  return out;
}

namespace {

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) {
    throw ConfigError(where + ": expected an object");
  }
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) {
    out = j.at(key).get<T>();
  }
}

Matrix read_matrix(const json& j, const std::string& what) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty() || rows.front().empty()) {
    throw ConfigError(what + ": empty matrix");
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.front().size()) {
      throw ConfigError(what + ": ragged matrix");
    }
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

WeightSpec read_weight(const json& j, const std::string& where, WeightSpec w) {
  reject_unknown(j, where, {"kind", "scale", "offset", "exponent", "values"});
  read(j, "kind", w.kind);
  read(j, "scale", w.scale);
  read(j, "offset", w.offset);
  read(j, "exponent", w.exponent);
  read(j, "values", w.values);
  return w;
}

NoiseKind read_noise(const std::string& s) {
  if (s == "gaussian") return NoiseKind::kGaussian;
  if (s == "uniform") return NoiseKind::kUniform;
  if (s == "none") return NoiseKind::kNone;
  throw ConfigError("oracle.noise: unknown kind '" + s + "'");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  try {
    const json j = json::parse(text);
    reject_unknown(j, "config", {"seed", "episodes", "oracle", "learning", "mdp", "search"});
    read(j, "seed", c.seed);
    read(j, "episodes", c.episodes);

    const json& o = j.at("oracle");
    reject_unknown(o, "oracle", {"success", "transition", "participation", "noise_variance", "noise",
                                 "initial_distribution", "initial_state"});
    c.success = read_matrix(o.at("success"), "oracle.success");
    if (o.contains("transition")) {
      c.transition = read_matrix(o.at("transition"), "oracle.transition");
    } else if (o.contains("participation")) {
      const json& p = o.at("participation");
      reject_unknown(p, "oracle.participation", {"clients", "stay", "levels"});
      c.participation_clients = p.at("clients").get<int>();
      read(p, "stay", c.participation_stay);
      c.participation_levels = p.at("levels").get<std::vector<int>>();
      c.transition = participation_chain(c.participation_clients, c.participation_stay, c.participation_levels);
    } else {
      throw ConfigError("oracle: either 'transition' or 'participation' is required");
    }
    read(o, "noise_variance", c.noise_variance);
    if (o.contains("noise")) {
      c.noise = read_noise(o.at("noise").get<std::string>());
    }
    read(o, "initial_distribution", c.initial_oracle);
    if (o.contains("initial_state")) {
      c.initial_oracle_state = o.at("initial_state").get<std::size_t>();
    }

    if (j.contains("learning")) {
      const json& l = j.at("learning");
      reject_unknown(l, "learning", {"objective", "dimension", "lipschitz", "initial_gap", "epsilon",
                                     "ripple_amplitude", "ripple_frequency", "step_size", "synthetic",
                                     "separation", "labeler"});
      read(l, "objective", c.objective);
      read(l, "dimension", c.dimension);
      read(l, "lipschitz", c.lipschitz);
      read(l, "initial_gap", c.initial_gap);
      read(l, "epsilon", c.epsilon);
      read(l, "ripple_amplitude", c.ripple_amplitude);
      read(l, "ripple_frequency", c.ripple_frequency);
      if (l.contains("step_size")) {
        c.step_size = l.at("step_size").get<double>();
      }
      if (l.contains("synthetic")) {
        const auto s = l.at("synthetic").get<std::string>();
        if (s == "mirror") {
          c.synthetic = SyntheticMode::kMirror;
        } else if (s == "decoy") {
          c.synthetic = SyntheticMode::kDecoy;
        } else {
          throw ConfigError("learning.synthetic: unknown mode '" + s + "'");
        }
      }
      read(l, "separation", c.separation);
      read(l, "labeler", c.labeler);
      if (c.labeler != "ground_truth" && c.labeler != "bisector") {
        throw ConfigError("learning.labeler: unknown labeler '" + c.labeler + "'");
      }
    }

    const json& m = j.at("mdp");
    reject_unknown(m, "mdp", {"queue_capacity", "horizon", "incentives", "queue_weight", "oracle_weight",
                              "terminal_cost", "dynamics", "belief_floor", "fixed_point"});
    if (m.contains("queue_capacity")) {
      c.queue_capacity = m.at("queue_capacity").get<std::size_t>();
    }
    read(m, "horizon", c.horizon);
    read(m, "incentives", c.incentives);
    if (m.contains("queue_weight")) c.queue_weight = read_weight(m.at("queue_weight"), "mdp.queue_weight", c.queue_weight);
    if (m.contains("oracle_weight")) c.oracle_weight = read_weight(m.at("oracle_weight"), "mdp.oracle_weight", c.oracle_weight);
    if (m.contains("terminal_cost")) c.terminal_cost = read_weight(m.at("terminal_cost"), "mdp.terminal_cost", c.terminal_cost);
    if (m.contains("dynamics")) {
      const auto s = m.at("dynamics").get<std::string>();
      if (s == "queue_coupled") {
        c.dynamics = OracleDynamics::kQueueCoupled;
      } else if (s == "independent") {
        c.dynamics = OracleDynamics::kIndependent;
      } else {
        throw ConfigError("mdp.dynamics: unknown mode '" + s + "'");
      }
    }
    read(m, "belief_floor", c.belief_floor);
    if (m.contains("fixed_point")) {
      const json& f = m.at("fixed_point");
      reject_unknown(f, "mdp.fixed_point", {"iterations", "samples"});
      read(f, "iterations", c.fixed_point.iterations);
      read(f, "samples", c.fixed_point.samples);
    }

    if (j.contains("search")) {
      const json& s = j.at("search");
      reject_unknown(s, "search", {"spsa", "ucb", "temperature", "surrogate_episodes"});
      read(s, "temperature", c.temperature);
      read(s, "surrogate_episodes", c.surrogate_episodes);
      if (s.contains("spsa")) {
        const json& p = s.at("spsa");
        reject_unknown(p, "search.spsa", {"iterations", "step", "perturbation", "threshold_unit"});
        read(p, "iterations", c.spsa.iterations);
        read(p, "step", c.spsa.step);
        read(p, "perturbation", c.spsa.perturbation);
        read(p, "threshold_unit", c.spsa.threshold_unit);
      }
      if (s.contains("ucb")) {
        const json& u = s.at("ucb");
        reject_unknown(u, "search.ucb", {"episodes", "exploration", "grid_points", "shared_rows"});
        read(u, "episodes", c.ucb.episodes);
        read(u, "exploration", c.ucb.exploration);
        read(u, "grid_points", c.ucb_grid_points);
        read(u, "shared_rows", c.ucb_shared_rows);
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.fixed_point.seed = split_seed(c.seed, 101);
  c.spsa.seed = split_seed(c.seed, 102);
  c.ucb.seed = split_seed(c.seed, 103);
  if (c.horizon < 1) {
    throw ConfigError("config: horizon N must be at least 1");
  }
  if (c.queue_capacity && *c.queue_capacity < 1) {
    throw ConfigError("config: queue capacity M must be at least 1");
  }
  if (c.dimension < 1) {
    throw ConfigError("config: dimension must be at least 1");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

SgBudget config_budget(const ExperimentConfig& c) {
  const double gamma = c.objective == "nonconvex"
                           ? c.lipschitz + c.ripple_amplitude * c.ripple_frequency * c.ripple_frequency
                           : c.lipschitz;
  return compute_budget(c.initial_gap, gamma, c.noise_variance, c.epsilon);
}

MdpModel derive_model(const ExperimentConfig& c, StructureReport* report) {
  MdpModel m;
  m.queue_capacity = c.queue_capacity ? *c.queue_capacity : config_budget(c).steps;
  m.horizon = c.horizon;
  m.incentives = c.incentives;
  m.success = c.success;
  m.transition = c.transition;
  m.queue_weight = c.queue_weight.evaluate(m.queue_capacity + 1, 0);
  m.oracle_weight = c.oracle_weight.evaluate(static_cast<std::size_t>(c.success.rows()), 1);
  m.terminal_cost = c.terminal_cost.evaluate(m.queue_capacity + 1, 0);
  m.dynamics = c.dynamics;
  m.belief_floor = c.belief_floor;
  m.initial_oracle = c.initial_oracle;
  if (c.initial_oracle_state) {
    m.initial_oracle.assign(static_cast<std::size_t>(c.success.rows()), 0.0);
    m.initial_oracle.at(*c.initial_oracle_state) = 1.0;
  }
  m.validate();
  m.schedule = uniform_schedule(m, c.fixed_point.samples, c.fixed_point.seed);
  if (report) {
    *report = check_structural_assumptions(m);
  }
  return m;
}

Environment make_environment(const ExperimentConfig& c, const MdpModel& model) {
  Environment env;
  env.model = model;
  env.oracle.success = model.success;
  env.oracle.transition = model.transition;
  env.oracle.noise_variance = c.noise_variance;
  env.oracle.noise = c.noise;
  const auto d = static_cast<Eigen::Index>(c.dimension);
  const Vector center = Vector::Zero(d);
  env.objective = c.objective == "nonconvex"
                      ? nonconvex_objective(c.lipschitz, center, c.ripple_amplitude, c.ripple_frequency)
                      : quadratic_objective(c.lipschitz, center);
  // Start on the diagonal at the distance that gives the quadratic part a gap of F.
  const double radius = std::sqrt(2.0 * c.initial_gap / c.lipschitz);
  env.learn_start = Vector::Constant(d, radius / std::sqrt(static_cast<double>(d)));
  env.obfuscate_start = separated_start(env.learn_start, c.separation);
  env.step_size = c.step_size ? *c.step_size : config_budget(c).step_size;
  env.synthetic.mode = c.synthetic;
  env.synthetic.noise_variance = c.noise_variance;
  env.synthetic.noise = c.noise;
  if (c.synthetic == SyntheticMode::kDecoy) {
    // Decoy objective: the same landscape centred at the obfuscating start.
    const Objective decoy = quadratic_objective(c.lipschitz, env.obfuscate_start);
    env.synthetic.decoy_gradient = decoy.gradient;
  }
  if (c.labeler == "bisector") {
    env.labeler = QueryLabeler::bisector(env.learn_start, env.obfuscate_start);
  }
  env.initial_oracle_state = c.initial_oracle_state;
  env.validate();
  return env;
}

}  // namespace covert
