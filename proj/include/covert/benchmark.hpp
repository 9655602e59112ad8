#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "covert/config.hpp"

namespace covert {

/// Best stationary threshold table among those read off the DP policy at each
/// stage, judged by Monte-Carlo cost (distinct tables only).
struct StationarySurrogate {
  ThresholdPolicy policy;
  std::size_t stage = 0;
  PolicyEvaluation evaluation;
};

StationarySurrogate dp_stationary_surrogate(const Environment& env, const PolicyTable& policy,
                                            std::size_t episodes, std::uint64_t seed);

struct BenchmarkRow {
  std::string policy;
  PolicyEvaluation evaluation;
};

struct BenchmarkResult {
  MdpModel model;
  DpSolution solution;
  StructureReport structure;
  StationarySurrogate surrogate;
  std::vector<BenchmarkRow> rows;
};

struct BenchmarkSelection {
  bool spsa = true;
  bool ucb = true;
};

/// Solves the model, builds every requested policy and evaluates each over
/// `config.episodes` runs on one common seed.
BenchmarkResult run_benchmark(const ExperimentConfig& config, const BenchmarkSelection& selection = {});

void write_benchmark_csv(std::ostream& os, const std::vector<BenchmarkRow>& rows);

/// Arm grid used by UCB for a model: integer values 0..M or `points` evenly
/// spaced values over [0, M + 1].
std::vector<ThresholdPolicy> ucb_arm_grid(const ExperimentConfig& config, const MdpModel& model);

}  // namespace covert
