#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "covert/mdp.hpp"

namespace covert {

/// Closed feasible range [lo, hi] for a positive multiplier restricted to
/// (0, 1]; lo = 0 stands for "any positive value".
struct MultiplierRange {
  double lo = 0.0;
  double hi = 1.0;
  bool feasible(double tol = 1e-12) const { return hi > 0.0 && lo <= hi + tol; }
  MultiplierRange intersect(const MultiplierRange& other) const;
};

/// Range of m in (0, 1] satisfying upper_diff <= m * lower_diff.
MultiplierRange difference_ratio_range(double upper_diff, double lower_diff, double tol);

/// Result of one numeric assumption check.
struct AssumptionCheck {
  std::string name;
  bool passed = true;
  std::size_t tuples_checked = 0;
  std::size_t failures = 0;
  std::vector<std::string> examples;  // first few failing tuples
};

struct StructureReport {
  std::array<AssumptionCheck, 6> checks;  // R1..R6
  bool all_passed() const;
  bool passed(std::size_t r) const { return checks.at(r - 1).passed; }
  std::string summary() const;
};

struct StructureOptions {
  double shape_rel_tol = 1e-9;
  double minor_tol = 1e-12;
  std::size_t max_examples = 5;
};

/// Marginal queue transition matrix P(b' | b, o, u) of size (M+1) x (M+1).
Matrix queue_transition_matrix(const MdpModel& model, std::size_t o, std::size_t action);

/// Queue transition vector towards future oracle state o', normalized by the
/// oracle transition probability P(o, o').
Vector queue_transition_vector(const MdpModel& model, std::size_t b, std::size_t o, std::size_t o_next,
                               std::size_t action);

/// Smallest minor of the given order (2 or 3). Minors whose rows or columns
/// fall outside the union of row supports are identically zero and skipped.
double min_minor(const Matrix& m, int order);

/// Numeric verification of the structural assumptions:
///  R1 stage cost nondecreasing and convex in b for each (n, o, u);
///  R2 queue transitions TP2/TP3 with nondecreasing convex conditional mean;
///  R3 terminal cost nondecreasing and convex;
///  R4 cost differences admit alpha in (0,1] with
///     c(b',u+1) - c(b',u) <= alpha (c(b,u+1) - c(b,u)) for all b' > b;
///  R5 transition differences admit beta in (0,1] with
///     f.(T'(u+1) - T'(u)) <= beta f.(T(u+1) - T(u)) for every increasing
///     convex f (checked on the constants and the hinge basis max(0, b - j));
///  R6 the alpha and beta ranges of each tuple intersect.
/// Requires a cost schedule on the model.
StructureReport check_structural_assumptions(const MdpModel& model, const StructureOptions& options = {});

}  // namespace covert
