#pragma once

#include "covert/oracle.hpp"

namespace covert {

enum class Trajectory { kFirst = 1, kSecond = 2 };

/// Incentive-weighted proportional belief that trajectory 1 is the learning
/// trajectory: delta = (sum of incentives on trajectory-1 queries) / (sum of
/// all incentives), and 1/2 before any query has been observed.
struct EavesdropperBelief {
  double weighted_first = 0.0;
  double total_weight = 0.0;
  double delta = 0.5;
};

EavesdropperBelief update_belief(const EavesdropperBelief& belief, Trajectory label, double incentive);

/// Maximum a posteriori trajectory; a belief of exactly 1/2 resolves to
/// trajectory 2.
Trajectory map_choice(const EavesdropperBelief& belief);

/// Assigns observed queries to one of the two trajectories. Ground-truth mode
/// uses the identity of the run that produced the query (perfect clustering);
/// hyperplane mode labels the positive side of w.q - b0 as trajectory 1.
class QueryLabeler {
 public:
  static QueryLabeler ground_truth() { return QueryLabeler(); }
  static QueryLabeler hyperplane(Vector normal, double offset);
  /// Perpendicular bisector of the two starting points, oriented so the
  /// learner start is on the trajectory-1 side.
  static QueryLabeler bisector(const Vector& learn_start, const Vector& obfuscate_start);

  Trajectory classify(const Vector& query, bool from_learning) const;
  bool is_ground_truth() const { return ground_truth_; }

 private:
  QueryLabeler() = default;
  bool ground_truth_ = true;
  Vector normal_;
  double offset_ = 0.0;
};

}  // namespace covert
