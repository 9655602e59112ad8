#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "covert/rng.hpp"

namespace covert {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using GradientFn = std::function<Vector(const Vector&)>;

enum class NoiseKind { kGaussian, kUniform, kNone };

/// Stochastic gradient oracle with a Markovian state.
///
/// `success(o, i)` is the probability that a query sent while the oracle is
/// in state `o` with incentive index `i` is answered informatively; rows of
/// `transition` are the next-state distributions. Indices are zero-based.
struct OracleModel {
  Matrix success;     // R x n_i
  Matrix transition;  // R x R, row-stochastic
  double noise_variance = 0.0;
  NoiseKind noise = NoiseKind::kGaussian;

  std::size_t num_states() const { return static_cast<std::size_t>(success.rows()); }
  std::size_t num_incentives() const { return static_cast<std::size_t>(success.cols()); }

  /// Throws ConfigError on probabilities outside [0,1], non-stochastic rows,
  /// mismatched shapes, a success matrix that decreases in the incentive, or
  /// (when requested) a non-positive transition entry.
  void validate(bool require_positive_transitions = false) const;
};

struct OracleResponse {
  bool success = false;
  Vector gradient;  // exactly zero when success is false
};

/// One Bernoulli(success(o, i)) draw; consumes exactly one uniform.
bool sample_success(const OracleModel& model, std::size_t o, std::size_t i, Rng& rng);

/// Noisy gradient reply: grad(query) + noise with probability success(o, i),
/// otherwise the non-informative zero vector.
OracleResponse respond(const OracleModel& model, const Vector& query, std::size_t o,
                       std::size_t i, const GradientFn& grad, Rng& rng);

/// Zero-mean noise vector with E|eta|^2 = noise_variance, split evenly over
/// coordinates.
Vector sample_noise(NoiseKind kind, double variance, Eigen::Index dim, Rng& rng);

std::size_t step_oracle_state(const OracleModel& model, std::size_t o, Rng& rng);

/// Draws an index from a discrete distribution with one uniform.
std::size_t sample_categorical(const Eigen::Ref<const Eigen::VectorXd>& probabilities, Rng& rng);

/// Oracle-state chain induced by `clients` independent two-state clients that
/// keep their connected/disconnected status with probability `stay`. State j
/// collects client counts in [min_clients[j], min_clients[j+1]); counts below
/// min_clients[0] fold into state 0. Transitions between states are the
/// count-chain transitions averaged with the stationary count distribution
/// inside each state.
Matrix participation_chain(int clients, double stay, const std::vector<int>& min_clients);

/// Stationary distribution of a row-stochastic matrix (solves pi P = pi,
/// sum pi = 1 by a dense linear solve).
Vector stationary_distribution(const Matrix& transition);

}  // namespace covert
