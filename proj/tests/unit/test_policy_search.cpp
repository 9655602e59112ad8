#include <gtest/gtest.h>

#include <cmath>

#include "covert/benchmark.hpp"
#include "covert/config.hpp"
#include "covert/errors.hpp"
#include "covert/search.hpp"
#include "oracles.hpp"

using namespace covert;

namespace {

ThresholdPolicy table(std::initializer_list<std::initializer_list<double>> rows, double tau) {
  ThresholdPolicy p;
  p.temperature = tau;
  p.thresholds.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) p.thresholds(r, c++) = v;
    ++r;
  }
  return p;
}

Environment tiny_env() {
  const auto cfg = load_config(COVERT_CONFIG_DIR "/tiny.json");
  return make_environment(cfg, derive_model(cfg));
}

}  // namespace

TEST(StationaryAction, SigmoidIsHalfAtThreshold) {
  EXPECT_DOUBLE_EQ(smooth_action_value(table({{2.0}}, 0.7), 2, 0), 0.5);
}

TEST(StationaryAction, UnreachedThresholdsGiveLowestAction) {
  const auto p = table({{0.0, 9.0, 9.0, 9.0}}, 0.1);
  for (std::size_t b = 0; b <= 5; ++b) EXPECT_EQ(stationary_action(p, b, 0, ActionMode::kHard), 0u);
  const auto q = table({{7.0, 9.0}}, 0.1);
  EXPECT_EQ(stationary_action(q, 3, 0, ActionMode::kHard), 0u);
}

TEST(StationaryAction, HardIntervals) {
  const auto p = table({{0.0, 2.0, 2.0, 5.0}}, 0.1);
  EXPECT_EQ(stationary_action(p, 0, 0, ActionMode::kHard), 0u);
  EXPECT_EQ(stationary_action(p, 1, 0, ActionMode::kHard), 0u);
  EXPECT_EQ(stationary_action(p, 2, 0, ActionMode::kHard), 2u);
  EXPECT_EQ(stationary_action(p, 4, 0, ActionMode::kHard), 2u);
  EXPECT_EQ(stationary_action(p, 5, 0, ActionMode::kHard), 3u);
}

TEST(StationaryAction, SmoothAgreesWithHardAtLowTemperature) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    ThresholdPolicy p;
    p.temperature = 1e-4;
    p.thresholds.resize(2, 6);
    for (Eigen::Index o = 0; o < 2; ++o) {
      for (Eigen::Index u = 0; u < 6; ++u) p.thresholds(o, u) = 12.0 * rng.uniform();
    }
    project_monotone(p, 12.0);
    for (std::size_t o = 0; o < 2; ++o) {
      for (std::size_t b = 0; b <= 11; ++b) {
        const double gap = (p.thresholds.row(static_cast<Eigen::Index>(o)).array() - static_cast<double>(b))
                               .abs()
                               .minCoeff();
        if (gap < 1.0) continue;
        EXPECT_EQ(stationary_action(p, b, o, ActionMode::kSmooth), stationary_action(p, b, o, ActionMode::kHard));
      }
    }
  }
}

TEST(StationaryAction, DitheredNeedsStreamAndAveragesSoftCount) {
  const auto p = table({{0.0, 3.0}}, 1.0);
  EXPECT_THROW(stationary_action(p, 3, 0, ActionMode::kDithered), DomainError);
  Rng rng(2);
  double mean = 0.0;
  for (int k = 0; k < 20000; ++k) mean += stationary_action(p, 3, 0, ActionMode::kDithered, &rng);
  EXPECT_NEAR(mean / 20000 + 1.0, smooth_action_value(p, 3, 0), 0.02);
}

TEST(Projection, RestoresMonotoneBoxedRows) {
  auto p = table({{5.0, 1.0, 3.0, 20.0}, {-2.0, -1.0, 4.0, 2.0}}, 0.1);
  project_monotone(p, 10.0);
  EXPECT_TRUE(p.is_monotone());
  EXPECT_LE(p.thresholds.maxCoeff(), 10.0);
  EXPECT_GE(p.thresholds.minCoeff(), 0.0);
  EXPECT_DOUBLE_EQ(p.thresholds(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(p.thresholds(1, 2), 3.0);
}

TEST(ThresholdsFromStage, ReproducesMonotoneStage) {
  PolicyTable pt(2, 2, 6, 0);
  const std::size_t row0[] = {0, 0, 1, 3, 3, 5};
  const std::size_t row1[] = {2, 2, 2, 4, 5, 5};
  for (std::size_t b = 0; b < 6; ++b) {
    pt(1, 0, b) = row0[b];
    pt(1, 1, b) = row1[b];
  }
  const auto p = thresholds_from_stage(pt, 1, 6, 0.1);
  EXPECT_TRUE(p.is_monotone());
  for (std::size_t o = 0; o < 2; ++o) {
    for (std::size_t b = 0; b < 6; ++b) EXPECT_EQ(stationary_action(p, b, o, ActionMode::kHard), pt(1, o, b));
  }
}

TEST(Spsa, ZeroStepLeavesParameters) {
  Vector theta(3);
  theta << 1, 2, 3;
  SpsaOptions o{50, 0.0, 0.1, 0.0, 4};
  const auto t = spsa_minimize(theta, [](const Vector& x, std::uint64_t) { return x.squaredNorm(); }, o);
  EXPECT_EQ(t.theta, theta);
  EXPECT_EQ(t.cost.size(), 50u);
}

TEST(Spsa, NoisyQuadraticReachesMinimizer) {
  const double target = 3.0;
  const NoisyCost cost = [&](const Vector& x, std::uint64_t stream) {
    // Noise independent between the two sides of a pair.
    Rng rng(stream ^ std::hash<double>{}(x(0)));
    return (x(0) - target) * (x(0) - target) + 0.5 * rng.normal();
  };
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto t = spsa_minimize(Vector::Zero(1), cost, {2000, 0.01, 0.1, 0.0, seed});
    EXPECT_NEAR(t.theta(0), target, 0.5) << seed;
  }
}

TEST(Spsa, PolicySearchKeepsMonotoneThresholds) {
  const Environment env = tiny_env();
  const auto init = neutral_thresholds(1, 4, 3, 0.5);
  const auto r = spsa_search(env, init, {200, 0.05, 0.1, 0.0, 9});
  EXPECT_TRUE(r.policy.is_monotone());
  EXPECT_GE(r.policy.thresholds.minCoeff(), 0.0);
  EXPECT_LE(r.policy.thresholds.maxCoeff(), 4.0 + 1e-12);
  EXPECT_EQ(r.cost.size(), 200u);
}

TEST(Ucb, DeterministicTwoArms) {
  const ArmReward reward = [](std::size_t a, std::uint64_t) { return a == 0 ? 0.0 : -1.0; };
  // Without an exploration bonus the worse arm is never revisited after the first round.
  const auto s = ucb_search(2, reward, {500, 0.0, 3});
  EXPECT_EQ(s.pulls[0], 499u);
  EXPECT_EQ(s.pulls[1], 1u);
  EXPECT_EQ(s.best_arm(), 0u);
  EXPECT_EQ(s.t, 500u);
  // With the bonus, revisits stay within the 2 ln T / gap^2 budget.
  const auto e = ucb_search(2, reward, {500, 1.0, 3});
  EXPECT_LE(static_cast<double>(e.pulls[1]), 2.0 * std::log(500.0) + 1.0);
  EXPECT_EQ(e.best_arm(), 0u);
}

TEST(Ucb, TooFewEpisodesThrows) {
  EXPECT_THROW(ucb_search(5, [](std::size_t, std::uint64_t) { return 0.0; }, {4, 1.0, 1}), DomainError);
}

TEST(Ucb, GaussianBanditRegretIncrementsShrink) {
  std::vector<double> means(10);
  for (std::size_t a = 0; a < 10; ++a) means[a] = 1.0 - 0.1 * static_cast<double>(a) - (a > 0 ? 0.05 : 0.0);
  const ArmReward reward = [&](std::size_t a, std::uint64_t stream) {
    Rng rng(stream);
    return means[a] + 0.5 * rng.normal();
  };
  const std::size_t horizon = 200000;
  std::vector<double> inc(3, 0.0);
  std::size_t sum_pulls = 0;
  const int seeds = 4;
  for (int s = 0; s < seeds; ++s) {
    const auto st = ucb_search(10, reward, {horizon, 1.0, static_cast<std::uint64_t>(100 + s)}, means);
    sum_pulls = 0;
    for (auto p : st.pulls) sum_pulls += p;
    EXPECT_EQ(sum_pulls, horizon);
    for (std::size_t k = 1; k < st.regret.size(); ++k) ASSERT_GE(st.regret[k], st.regret[k - 1]);
    std::size_t idx = 0;
    for (std::size_t T : {1000u, 10000u, 100000u}) {
      inc[idx++] += (st.regret[2 * T - 1] - st.regret[T - 1]) / seeds;
    }
  }
  EXPECT_GT(inc[0], inc[1]);
  EXPECT_GT(inc[1], inc[2]);
}

TEST(Ucb, SuboptimalPullsGrowLogarithmically) {
  const ArmReward reward = [](std::size_t a, std::uint64_t stream) {
    Rng rng(stream);
    return (a == 0 ? 0.5 : 0.2) + 0.3 * rng.normal();
  };
  const auto st = ucb_search(2, reward, {100000, 1.0, 7});
  // Pulls of the worse arm per decade of T should stay roughly constant.
  std::vector<double> ratio;
  for (std::size_t T : {1000u, 10000u, 100000u}) {
    const auto s = ucb_search(2, reward, {T, 1.0, 7});
    ratio.push_back(static_cast<double>(s.pulls[1]) / std::log(static_cast<double>(T)));
  }
  EXPECT_LT(ratio[2], 2.0 * ratio[0]);
  EXPECT_LT(static_cast<double>(st.pulls[1]), 0.05 * 100000);
}

TEST(Grid, MonotonePinnedRowCount) {
  const auto values = integer_values(3);
  const auto g = threshold_grid(1, 4, values);
  EXPECT_EQ(g.size(), 20u);
  for (const auto& p : g) {
    EXPECT_TRUE(p.is_monotone());
    EXPECT_EQ(p.thresholds(0, 0), 0.0);
  }
  GridOptions full;
  full.monotone = false;
  full.pin_first = false;
  EXPECT_EQ(threshold_grid(1, 2, values, full).size(), 16u);
}

TEST(Evaluate, DeterministicGivenSeed) {
  const Environment env = tiny_env();
  const StationaryThresholdPolicy p(table({{0.0, 1.0, 2.0, 3.0}}, 0.5), ActionMode::kHard);
  const auto a = evaluate_policy(env, p, 300, 5);
  const auto b = evaluate_policy(env, p, 300, 5);
  EXPECT_EQ(a.mean_cost, b.mean_cost);
  EXPECT_EQ(a.completion_rate, b.completion_rate);
}

TEST(Evaluate, MatchesExactExpectation) {
  const Environment env = tiny_env();
  const auto stationary = table({{0.0, 1.0, 1.0, 2.0}}, 0.5);
  const StationaryThresholdPolicy p(stationary, ActionMode::kHard);
  const auto exact = oracle::exact_episode(
      env.model, [&](std::size_t, std::size_t o, std::size_t b) { return stationary_action(stationary, b, o, ActionMode::kHard); },
      0);
  const auto mc = evaluate_policy(env, p, 100000, 6);
  ASSERT_GT(mc.stderr_cost, 0.0);
  EXPECT_NEAR(mc.mean_cost, exact.cost, 3.0 * mc.stderr_cost);
  EXPECT_NEAR(mc.completion_rate, exact.completion, 0.01);
}
