#include "covert/eavesdropper.hpp"

#include <utility>

#include "covert/errors.hpp"

namespace covert {

EavesdropperBelief update_belief(const EavesdropperBelief& belief, Trajectory label, double incentive) {
  if (!(incentive > 0.0)) {
    throw DomainError("update_belief: incentive must be positive");
  }
  EavesdropperBelief next = belief;
  next.total_weight += incentive;
  if (label == Trajectory::kFirst) {
    next.weighted_first += incentive;
  }
  next.delta = next.weighted_first / next.total_weight;
  return next;
}

Trajectory map_choice(const EavesdropperBelief& belief) {
  return belief.delta > 0.5 ? Trajectory::kFirst : Trajectory::kSecond;
}

QueryLabeler QueryLabeler::hyperplane(Vector normal, double offset) {
  QueryLabeler l;
  l.ground_truth_ = false;
  l.normal_ = std::move(normal);
  l.offset_ = offset;
  return l;
}

QueryLabeler QueryLabeler::bisector(const Vector& learn_start, const Vector& obfuscate_start) {
  if (learn_start.size() != obfuscate_start.size()) {
    throw ShapeError("bisector: starting points differ in dimension");
  }
  Vector normal = learn_start - obfuscate_start;
  const Vector mid = 0.5 * (learn_start + obfuscate_start);
  return hyperplane(normal, normal.dot(mid));
}

Trajectory QueryLabeler::classify(const Vector& query, bool from_learning) const {
  if (ground_truth_) {
    return from_learning ? Trajectory::kFirst : Trajectory::kSecond;
  }
  if (query.size() != normal_.size()) {
    throw ShapeError("classify: query dimension does not match the hyperplane");
  }
  return normal_.dot(query) - offset_ > 0.0 ? Trajectory::kFirst : Trajectory::kSecond;
}

}  // namespace covert
