#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "covert/threshold_policy.hpp"

namespace covert {

/// Decision rule mapping (queries left n, oracle state o, queue b) to an
/// action index of the ordered action list.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::size_t act(std::size_t n, std::size_t o, std::size_t b, Rng& rng) const = 0;
  virtual std::string name() const = 0;
};

class StationaryThresholdPolicy final : public Policy {
 public:
  /// `require_monotone = false` admits rows that decrease (SPSA perturbations).
  StationaryThresholdPolicy(ThresholdPolicy table, ActionMode mode, std::string name = "threshold",
                            bool require_monotone = true);
  std::size_t act(std::size_t n, std::size_t o, std::size_t b, Rng& rng) const override;
  std::string name() const override { return name_; }
  const ThresholdPolicy& table() const { return table_; }

 private:
  ThresholdPolicy table_;
  ActionMode mode_;
  std::string name_;
};

/// Non-stationary lookup of a DP policy table.
class TablePolicy final : public Policy {
 public:
  explicit TablePolicy(PolicyTable table, std::string name = "dp-table");
  std::size_t act(std::size_t n, std::size_t o, std::size_t b, Rng& rng) const override;
  std::string name() const override { return name_; }

 private:
  PolicyTable table_;
  std::string name_;
};

/// Always the same action; greedy is the last action (learn, top incentive).
class FixedActionPolicy final : public Policy {
 public:
  FixedActionPolicy(std::size_t action, std::string name);
  std::size_t act(std::size_t, std::size_t, std::size_t, Rng&) const override { return action_; }
  std::string name() const override { return name_; }

 private:
  std::size_t action_;
  std::string name_;
};

/// Uniform over all actions; draws one index per decision.
class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(std::size_t num_actions);
  std::size_t act(std::size_t, std::size_t, std::size_t, Rng& rng) const override;
  std::string name() const override { return "random"; }

 private:
  std::size_t num_actions_;
};

std::unique_ptr<Policy> make_greedy_policy(const MdpModel& model);

}  // namespace covert
