#include "covert/policies.hpp"

#include <utility>

#include "covert/errors.hpp"

namespace covert {

StationaryThresholdPolicy::StationaryThresholdPolicy(ThresholdPolicy table, ActionMode mode, std::string name,
                                                     bool require_monotone)
    : table_(std::move(table)), mode_(mode), name_(std::move(name)) {
  if (require_monotone) {
    table_.validate();
  } else if (table_.thresholds.size() == 0 || !(table_.temperature > 0.0)) {
    throw ShapeError("threshold policy: empty table or non-positive temperature");
  }
}

std::size_t StationaryThresholdPolicy::act(std::size_t, std::size_t o, std::size_t b, Rng& rng) const {
  if (o >= table_.oracle_states()) {
    throw IndexError("threshold policy: oracle state " + std::to_string(o) + " out of range");
  }
  return stationary_action(table_, b, o, mode_, &rng);
}

TablePolicy::TablePolicy(PolicyTable table, std::string name) : table_(std::move(table)), name_(std::move(name)) {}

std::size_t TablePolicy::act(std::size_t n, std::size_t o, std::size_t b, Rng&) const {
  if (n >= table_.stages() || o >= table_.oracle_states() || b >= table_.queue_states()) {
    throw IndexError("table policy: state out of range");
  }
  return table_(n, o, b);
}

FixedActionPolicy::FixedActionPolicy(std::size_t action, std::string name)
    : action_(action), name_(std::move(name)) {}

RandomPolicy::RandomPolicy(std::size_t num_actions) : num_actions_(num_actions) {
  if (num_actions == 0) {
    throw DomainError("random policy: no actions");
  }
}

std::size_t RandomPolicy::act(std::size_t, std::size_t, std::size_t, Rng& rng) const {
  return rng.index(num_actions_);
}

std::unique_ptr<Policy> make_greedy_policy(const MdpModel& model) {
  return std::make_unique<FixedActionPolicy>(model.greedy_action(), "greedy");
}

}  // namespace covert
