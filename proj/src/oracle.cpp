#include "covert/oracle.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "covert/errors.hpp"

namespace covert {

namespace {

void check_indices(const OracleModel& model, std::size_t o, std::size_t i) {
  if (o >= model.num_states()) {
    throw IndexError("oracle state " + std::to_string(o) + " out of range [0, " +
                     std::to_string(model.num_states()) + ")");
  }
  if (i >= model.num_incentives()) {
    throw IndexError("incentive index " + std::to_string(i) + " out of range [0, " +
                     std::to_string(model.num_incentives()) + ")");
  }
}

// Binomial(n, p) probability mass function over 0..n.
std::vector<double> binomial_pmf(int n, double p) {
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = 0; k <= n; ++k) {
    const double log_coeff = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    const double log_p = (k > 0 ? k * std::log(p) : 0.0) + (n - k > 0 ? (n - k) * std::log1p(-p) : 0.0);
    pmf[static_cast<std::size_t>(k)] = (p == 0.0) ? (k == 0 ? 1.0 : 0.0)
                                       : (p == 1.0) ? (k == n ? 1.0 : 0.0)
                                                    : std::exp(log_coeff + log_p);
  }
  return pmf;
}

}  // namespace

void OracleModel::validate(bool require_positive_transitions) const {
  const auto r = success.rows();
  if (r == 0 || success.cols() == 0) {
    throw ConfigError("oracle: success matrix must be non-empty");
  }
  if (transition.rows() != r || transition.cols() != r) {
    std::ostringstream os;
    os << "oracle: transition matrix must be " << r << "x" << r << ", got " << transition.rows()
       << "x" << transition.cols();
    throw ConfigError(os.str());
  }
  for (Eigen::Index o = 0; o < r; ++o) {
    for (Eigen::Index i = 0; i < success.cols(); ++i) {
      const double g = success(o, i);
      if (!(g >= 0.0 && g <= 1.0)) {
        throw ConfigError("oracle: success probability outside [0,1] at (" + std::to_string(o) +
                          "," + std::to_string(i) + ")");
      }
      if (i > 0 && g < success(o, i - 1)) {
        throw ConfigError("oracle: success probability decreases in the incentive at state " +
                          std::to_string(o));
      }
    }
    double row_sum = 0.0;
    for (Eigen::Index p = 0; p < r; ++p) {
      const double t = transition(o, p);
      if (!(t >= 0.0) || (require_positive_transitions && !(t > 0.0))) {
        throw ConfigError("oracle: invalid transition probability at (" + std::to_string(o) + "," +
                          std::to_string(p) + ")");
      }
      row_sum += t;
    }
    if (std::abs(row_sum - 1.0) > 1e-12) {
      throw ConfigError("oracle: transition row " + std::to_string(o) + " sums to " +
                        std::to_string(row_sum));
    }
  }
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
    throw ConfigError("oracle: noise variance must be a finite nonnegative number");
  }
}

bool sample_success(const OracleModel& model, std::size_t o, std::size_t i, Rng& rng) {
  check_indices(model, o, i);
  return rng.bernoulli(model.success(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(i)));
}

Vector sample_noise(NoiseKind kind, double variance, Eigen::Index dim, Rng& rng) {
  Vector eta = Vector::Zero(dim);
  if (kind == NoiseKind::kNone || variance == 0.0 || dim == 0) {
    return eta;
  }
  const double per_coordinate = variance / static_cast<double>(dim);
  if (kind == NoiseKind::kGaussian) {
    const double sd = std::sqrt(per_coordinate);
    for (Eigen::Index j = 0; j < dim; ++j) {
      eta(j) = sd * rng.normal();
    }
  } else {
    // U(-a, a) has variance a^2 / 3.
    const double a = std::sqrt(3.0 * per_coordinate);
    for (Eigen::Index j = 0; j < dim; ++j) {
      eta(j) = a * (2.0 * rng.uniform() - 1.0);
    }
  }
  return eta;
}

OracleResponse respond(const OracleModel& model, const Vector& query, std::size_t o,
                       std::size_t i, const GradientFn& grad, Rng& rng) {
  OracleResponse out;
  out.success = sample_success(model, o, i, rng);
  if (!out.success) {
    out.gradient = Vector::Zero(query.size());
    return out;
  }
  Vector g = grad(query);
  if (g.size() != query.size()) {
    throw ShapeError("oracle: gradient dimension " + std::to_string(g.size()) +
                     " does not match query dimension " + std::to_string(query.size()));
  }
  if (!g.allFinite()) {
    throw NumericError("oracle: gradient evaluator returned a non-finite value");
  }
  out.gradient = g + sample_noise(model.noise, model.noise_variance, query.size(), rng);
  return out;
}

std::size_t sample_categorical(const Eigen::Ref<const Eigen::VectorXd>& probabilities, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  const auto n = probabilities.size();
  for (Eigen::Index k = 0; k < n; ++k) {
    acc += probabilities(k);
    if (u < acc) {
      return static_cast<std::size_t>(k);
    }
  }
  // Rounding left u above the accumulated mass: take the last positive entry.
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    if (probabilities(k) > 0.0) {
      return static_cast<std::size_t>(k);
    }
  }
  return 0;
}

std::size_t step_oracle_state(const OracleModel& model, std::size_t o, Rng& rng) {
  if (o >= model.num_states()) {
    throw IndexError("oracle state " + std::to_string(o) + " out of range");
  }
  return sample_categorical(model.transition.row(static_cast<Eigen::Index>(o)).transpose(), rng);
}

Matrix participation_chain(int clients, double stay, const std::vector<int>& min_clients) {
  if (clients <= 0 || min_clients.empty()) {
    throw ConfigError("participation chain needs a positive client count and at least one level");
  }
  if (!(stay > 0.0 && stay < 1.0)) {
    throw ConfigError("participation chain stay probability must lie in (0,1)");
  }
  for (std::size_t j = 1; j < min_clients.size(); ++j) {
    if (min_clients[j] <= min_clients[j - 1]) {
      throw ConfigError("participation levels must be strictly increasing");
    }
  }
  const auto n = static_cast<std::size_t>(clients);
  const auto levels = min_clients.size();

  // Count chain: c' = Bin(c, stay) + Bin(n - c, 1 - stay).
  Matrix count_chain = Matrix::Zero(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(n + 1));
  for (std::size_t c = 0; c <= n; ++c) {
    const auto keep = binomial_pmf(static_cast<int>(c), stay);
    const auto join = binomial_pmf(static_cast<int>(n - c), 1.0 - stay);
    for (std::size_t a = 0; a < keep.size(); ++a) {
      for (std::size_t b = 0; b < join.size(); ++b) {
        count_chain(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(a + b)) += keep[a] * join[b];
      }
    }
  }
  // Symmetric flip rates give a Binomial(n, 1/2) stationary count.
  const auto pi = binomial_pmf(static_cast<int>(n), 0.5);

  auto level_of = [&](std::size_t c) {
    std::size_t level = 0;
    for (std::size_t j = 0; j < levels; ++j) {
      if (static_cast<int>(c) >= min_clients[j]) {
        level = j;
      }
    }
    return level;
  };

  Matrix lumped = Matrix::Zero(static_cast<Eigen::Index>(levels), static_cast<Eigen::Index>(levels));
  std::vector<double> mass(levels, 0.0);
  for (std::size_t c = 0; c <= n; ++c) {
    const auto from = level_of(c);
    mass[from] += pi[c];
    for (std::size_t c2 = 0; c2 <= n; ++c2) {
      lumped(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(level_of(c2))) +=
          pi[c] * count_chain(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c2));
    }
  }
  for (std::size_t j = 0; j < levels; ++j) {
    if (mass[j] <= 0.0) {
      throw ConfigError("participation level " + std::to_string(j) + " has zero stationary mass");
    }
    lumped.row(static_cast<Eigen::Index>(j)) /= mass[j];
    lumped.row(static_cast<Eigen::Index>(j)) /= lumped.row(static_cast<Eigen::Index>(j)).sum();
  }
  return lumped;
}

Vector stationary_distribution(const Matrix& transition) {
  const auto r = transition.rows();
  // (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
  Matrix a = transition.transpose() - Matrix::Identity(r, r);
  a.row(r - 1).setOnes();
  Vector rhs = Vector::Zero(r);
  rhs(r - 1) = 1.0;
  Vector pi = a.fullPivLu().solve(rhs);
  for (Eigen::Index k = 0; k < r; ++k) {
    pi(k) = std::max(pi(k), 0.0);
  }
  return pi / pi.sum();
}

}  // namespace covert
