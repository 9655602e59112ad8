#include <gtest/gtest.h>

#include <cmath>

#include "covert/errors.hpp"
#include "covert/objective.hpp"
#include "covert/oracle.hpp"
#include "oracles.hpp"

using namespace covert;

namespace {

OracleModel three_state_oracle() {
  OracleModel m;
  m.success.resize(3, 3);
  m.success << 0.0, 0.1, 0.2, 0.1, 0.2, 0.6, 0.3, 0.6, 0.9;
  m.transition = Matrix::Constant(3, 3, 1.0 / 3.0);
  m.noise_variance = 1.0;
  return m;
}

double frequency(const OracleModel& m, std::size_t o, std::size_t i, int draws, std::uint64_t seed) {
  Rng rng(seed);
  int hits = 0;
  for (int k = 0; k < draws; ++k) hits += sample_success(m, o, i, rng) ? 1 : 0;
  return static_cast<double>(hits) / draws;
}

}  // namespace

TEST(SampleSuccess, TopCellMatchesProbability) {
  EXPECT_NEAR(frequency(three_state_oracle(), 2, 2, 100000, 1), 0.9, 0.01);
}

TEST(SampleSuccess, ZeroCellNeverSucceeds) {
  EXPECT_EQ(frequency(three_state_oracle(), 0, 0, 10000, 2), 0.0);
}

TEST(SampleSuccess, UnitCellAlwaysSucceeds) {
  OracleModel m = three_state_oracle();
  m.success(1, 1) = 1.0;
  m.success(1, 2) = 1.0;
  EXPECT_EQ(frequency(m, 1, 1, 10000, 3), 1.0);
}

TEST(SampleSuccess, EveryCellWithinBinomialBound) {
  const OracleModel m = three_state_oracle();
  const int draws = 100000;
  for (std::size_t o = 0; o < 3; ++o) {
    double previous = -1.0;
    for (std::size_t i = 0; i < 3; ++i) {
      const double p = m.success(o, i);
      const double f = frequency(m, o, i, draws, 10 + 3 * o + i);
      EXPECT_NEAR(f, p, 4.0 * std::sqrt(p * (1 - p) / draws) + 1e-12) << o << "," << i;
      EXPECT_GE(f, previous);
      previous = f;
    }
  }
}

TEST(Respond, NoiselessQuadraticReturnsGradient) {
  OracleModel m = three_state_oracle();
  m.noise_variance = 0.0;
  m.success(2, 2) = 1.0;
  const Objective f = quadratic_objective(1.0, Vector::Zero(2));
  Rng rng(4);
  const auto r = respond(m, Vector::Unit(2, 0) * 2.0, 2, 2, f.gradient, rng);
  ASSERT_TRUE(r.success);
  EXPECT_DOUBLE_EQ(r.gradient(0), 2.0);
  EXPECT_DOUBLE_EQ(r.gradient(1), 0.0);
}

TEST(Respond, FailureGivesExactZero) {
  const OracleModel m = three_state_oracle();
  const Objective f = quadratic_objective(1.0, Vector::Zero(2));
  Rng rng(5);
  const auto r = respond(m, Vector::Constant(2, 3.0), 0, 0, f.gradient, rng);
  EXPECT_FALSE(r.success);
  EXPECT_TRUE((r.gradient.array() == 0.0).all());
}

TEST(Respond, NoisyGradientIsUnbiased) {
  OracleModel m = three_state_oracle();
  m.success(2, 2) = 1.0;
  const Objective f = quadratic_objective(1.0, Vector::Zero(2));
  const Vector q(Vector::Constant(2, 1.5));
  Rng rng(6);
  const int n = 100000;
  Vector sum = Vector::Zero(2);
  double sq = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto r = respond(m, q, 2, 2, f.gradient, rng);
    const Vector e = r.gradient - f.gradient(q);
    sum += e;
    sq += e.squaredNorm();
  }
  for (int j = 0; j < 2; ++j) {
    EXPECT_LE(std::abs(sum(j) / n), 3.0 * std::sqrt(m.noise_variance) / std::sqrt(static_cast<double>(n)));
  }
  EXPECT_NEAR(sq / n, m.noise_variance, 0.02);
}

TEST(Noise, UniformAndNoneVariance) {
  Rng rng(7);
  double sq = 0.0;
  const int n = 50000;
  for (int k = 0; k < n; ++k) sq += sample_noise(NoiseKind::kUniform, 2.0, 4, rng).squaredNorm();
  EXPECT_NEAR(sq / n, 2.0, 0.03);
  EXPECT_EQ(sample_noise(NoiseKind::kNone, 2.0, 4, rng).squaredNorm(), 0.0);
}

TEST(StepOracleState, IdentityChainStays) {
  OracleModel m = three_state_oracle();
  m.transition = Matrix::Identity(3, 3);
  Rng rng(8);
  for (std::size_t o = 0; o < 3; ++o) {
    for (int k = 0; k < 100; ++k) EXPECT_EQ(step_oracle_state(m, o, rng), o);
  }
}

TEST(StepOracleState, FairRowFrequencies) {
  OracleModel m;
  m.success = Matrix::Constant(2, 1, 0.5);
  m.transition = Matrix::Constant(2, 2, 0.5);
  Rng rng(9);
  int ones = 0;
  for (int k = 0; k < 100000; ++k) ones += step_oracle_state(m, 0, rng) == 1 ? 1 : 0;
  EXPECT_NEAR(ones / 100000.0, 0.5, 0.01);
}

TEST(ParticipationChain, EmpiricalStationaryMatchesPowerIteration) {
  OracleModel m;
  m.transition = participation_chain(10, 0.8, {0, 4, 7});
  m.success = Matrix::Constant(3, 1, 0.5);
  m.validate();
  const Vector pi = oracle::power_iteration(m.transition);
  EXPECT_LT((stationary_distribution(m.transition) - pi).cwiseAbs().maxCoeff(), 1e-9);
  Rng rng(10);
  Vector counts = Vector::Zero(3);
  std::size_t o = 0;
  const int steps = 100000;
  for (int k = 0; k < steps; ++k) {
    o = step_oracle_state(m, o, rng);
    counts(static_cast<Eigen::Index>(o)) += 1.0;
  }
  EXPECT_LT((counts / steps - pi).cwiseAbs().maxCoeff(), 0.02);
}

TEST(OracleValidate, RejectsBadModels) {
  OracleModel m = three_state_oracle();
  m.success(0, 0) = 0.3;  // decreasing in the incentive
  EXPECT_THROW(m.validate(), ConfigError);
  m = three_state_oracle();
  m.transition(0, 0) = 0.5;
  EXPECT_THROW(m.validate(), ConfigError);
  m = three_state_oracle();
  m.success(1, 2) = 1.5;
  EXPECT_THROW(m.validate(), ConfigError);
  m = three_state_oracle();
  m.transition = Matrix::Identity(3, 3);
  EXPECT_NO_THROW(m.validate());
  EXPECT_THROW(m.validate(true), ConfigError);
}

TEST(Categorical, EmpiricalFrequencies) {
  Vector p(3);
  p << 0.2, 0.5, 0.3;
  Rng rng(12);
  Vector counts = Vector::Zero(3);
  for (int k = 0; k < 100000; ++k) counts(static_cast<Eigen::Index>(sample_categorical(p, rng))) += 1;
  EXPECT_LT((counts / 100000.0 - p).cwiseAbs().maxCoeff(), 0.01);
}

TEST(Rng, SplitSeedsAreReproducibleAndDistinct) {
  EXPECT_EQ(split_seed(42, 3), split_seed(42, 3));
  EXPECT_NE(split_seed(42, 3), split_seed(42, 4));
  Rng a(split_seed(1, 0));
  Rng b(split_seed(1, 0));
  for (int k = 0; k < 10; ++k) EXPECT_EQ(a.next_u64(), b.next_u64());
}
