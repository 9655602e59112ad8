#include "covert/structure.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "covert/errors.hpp"
#include "covert/shape.hpp"

namespace covert {

MultiplierRange MultiplierRange::intersect(const MultiplierRange& other) const {
  return {std::max(lo, other.lo), std::min(hi, other.hi)};
}

MultiplierRange difference_ratio_range(double upper_diff, double lower_diff, double tol) {
  if (std::abs(lower_diff) <= tol) {
    return upper_diff <= tol ? MultiplierRange{} : MultiplierRange{1.0, -1.0};
  }
  const double ratio = upper_diff / lower_diff;
  if (lower_diff > 0.0) {
    return {std::max(0.0, ratio), 1.0};
  }
  return {0.0, std::min(1.0, ratio)};
}

bool StructureReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AssumptionCheck& c) { return c.passed; });
}

std::string StructureReport::summary() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << c.name << ": " << (c.passed ? "pass" : "FAIL") << " (" << c.failures << " of " << c.tuples_checked
       << " tuples failed)\n";
    for (const auto& e : c.examples) {
      os << "    " << e << "\n";
    }
  }
  return os.str();
}

Matrix queue_transition_matrix(const MdpModel& model, std::size_t o, std::size_t action) {
  const auto nb = static_cast<Eigen::Index>(model.num_queue_states());
  Matrix p = Matrix::Zero(nb, nb);
  for (std::size_t b = 0; b < model.num_queue_states(); ++b) {
    for (const auto& t : transition_distribution(model, b, o, action)) {
      p(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(t.queue)) += t.probability;
    }
  }
  return p;
}

Vector queue_transition_vector(const MdpModel& model, std::size_t b, std::size_t o, std::size_t o_next,
                               std::size_t action) {
  const double p_oracle = model.transition(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(o_next));
  Vector v = Vector::Zero(static_cast<Eigen::Index>(model.num_queue_states()));
  if (p_oracle <= 0.0) {
    return v;
  }
  for (const auto& t : transition_distribution(model, b, o, action)) {
    if (t.oracle == o_next) {
      v(static_cast<Eigen::Index>(t.queue)) += t.probability / p_oracle;
    }
  }
  return v;
}

namespace {

// Visits every k-subset of `pool` (k <= 3) in lexicographic order.
template <class F>
void for_each_subset(const std::vector<Eigen::Index>& pool, int k, F&& f) {
  const auto n = pool.size();
  std::array<Eigen::Index, 3> pick{};
  if (k == 2) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        pick = {pool[a], pool[b], 0};
        f(pick);
      }
    }
  } else {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        for (std::size_t c = b + 1; c < n; ++c) {
          pick = {pool[a], pool[b], pool[c]};
          f(pick);
        }
      }
    }
  }
}

double det_of(const Matrix& m, const std::array<Eigen::Index, 3>& r, const std::array<Eigen::Index, 3>& c,
              int k) {
  if (k == 2) {
    return m(r[0], c[0]) * m(r[1], c[1]) - m(r[0], c[1]) * m(r[1], c[0]);
  }
  Eigen::Matrix3d s;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      s(i, j) = m(r[i], c[j]);
    }
  }
  return s.determinant();
}

std::string tuple_text(std::initializer_list<std::pair<const char*, std::size_t>> parts) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, v] : parts) {
    os << (first ? "" : ", ") << k << "=" << v;
    first = false;
  }
  return os.str();
}

void record_failure(AssumptionCheck& c, const StructureOptions& opt, const std::string& what) {
  c.passed = false;
  ++c.failures;
  if (c.examples.size() < opt.max_examples) {
    c.examples.push_back(what);
  }
}

}  // namespace

double min_minor(const Matrix& m, int order) {
  if (order != 2 && order != 3) {
    throw DomainError("min_minor: order must be 2 or 3");
  }
  if (m.rows() < order || m.cols() < order) {
    return 0.0;
  }
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    rows[static_cast<std::size_t>(i)] = i;
  }
  double smallest = std::numeric_limits<double>::infinity();
  for_each_subset(rows, order, [&](const std::array<Eigen::Index, 3>& r) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (int i = 0; i < order; ++i) {
        if (m(r[static_cast<std::size_t>(i)], j) != 0.0) {
          cols.push_back(j);
          break;
        }
      }
    }
    if (static_cast<int>(cols.size()) < order) {
      smallest = std::min(smallest, 0.0);
      return;
    }
    for_each_subset(cols, order, [&](const std::array<Eigen::Index, 3>& c) {
      smallest = std::min(smallest, det_of(m, r, c, order));
    });
  });
  return smallest;
}

StructureReport check_structural_assumptions(const MdpModel& model, const StructureOptions& opt) {
  model.validate();
  if (model.schedule.size() != model.horizon + 1) {
    throw ConfigError("check_structural_assumptions: model has no cost schedule");
  }
  StructureReport report;
  for (std::size_t k = 0; k < 6; ++k) {
    report.checks[k].name = "R" + std::to_string(k + 1);
  }
  auto& r1 = report.checks[0];
  auto& r2 = report.checks[1];
  auto& r3 = report.checks[2];
  auto& r4 = report.checks[3];
  auto& r5 = report.checks[4];
  auto& r6 = report.checks[5];

  const auto n_stages = model.horizon;
  const auto r = model.num_oracle_states();
  const auto nb = model.num_queue_states();
  const auto na = model.num_actions();

  // cost[n][o][u][b]
  std::vector<double> cost((n_stages + 1) * r * na * nb, 0.0);
  auto cost_at = [&](std::size_t n, std::size_t o, std::size_t u, std::size_t b) -> double& {
    return cost[((n * r + o) * na + u) * nb + b];
  };
  for (std::size_t n = 1; n <= n_stages; ++n) {
    const auto& ref = model.schedule[n];
    const double belief = model.effective_belief(ref.belief);
    for (std::size_t o = 0; o < r; ++o) {
      for (std::size_t u = 0; u < na; ++u) {
        for (std::size_t b = 0; b < nb; ++b) {
          cost_at(n, o, u, b) = stage_cost(model, b, o, u, ref.incentive_sum, belief);
        }
      }
    }
  }

  // R1
  for (std::size_t n = 1; n <= n_stages; ++n) {
    for (std::size_t o = 0; o < r; ++o) {
      for (std::size_t u = 0; u < na; ++u) {
        ++r1.tuples_checked;
        std::span<const double> c(&cost_at(n, o, u, 0), nb);
        const double tol = shape_tolerance(c, opt.shape_rel_tol);
        if (auto b = first_decrease(c, tol)) {
          record_failure(r1, opt, "cost decreases: " + tuple_text({{"n", n}, {"o", o}, {"u", u}, {"b", *b}}));
        } else if (auto b2 = first_concavity(c, tol)) {
          record_failure(r1, opt, "cost not convex: " + tuple_text({{"n", n}, {"o", o}, {"u", u}, {"b", *b2}}));
        }
      }
    }
  }

  // R2
  for (std::size_t o = 0; o < r; ++o) {
    for (std::size_t u = 0; u < na; ++u) {
      ++r2.tuples_checked;
      const Matrix p = queue_transition_matrix(model, o, u);
      const double m2 = min_minor(p, 2);
      const double m3 = min_minor(p, 3);
      std::vector<double> mean(nb, 0.0);
      for (std::size_t b = 0; b < nb; ++b) {
        for (std::size_t b2 = 0; b2 < nb; ++b2) {
          mean[b] += static_cast<double>(b2) * p(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b2));
        }
      }
      const double tol = shape_tolerance(mean, opt.shape_rel_tol);
      if (m2 < -opt.minor_tol || m3 < -opt.minor_tol) {
        record_failure(r2, opt, "negative minor: " + tuple_text({{"o", o}, {"u", u}}));
      } else if (!is_nondecreasing(mean, tol) || !is_convex(mean, tol)) {
        record_failure(r2, opt, "conditional mean not increasing/convex: " + tuple_text({{"o", o}, {"u", u}}));
      }
    }
  }

  // R3
  {
    ++r3.tuples_checked;
    const double tol = shape_tolerance(model.terminal_cost, opt.shape_rel_tol);
    if (auto b = first_decrease(model.terminal_cost, tol)) {
      record_failure(r3, opt, "terminal cost decreases at " + tuple_text({{"b", *b}}));
    } else if (auto b2 = first_concavity(model.terminal_cost, tol)) {
      record_failure(r3, opt, "terminal cost not convex at " + tuple_text({{"b", *b2}}));
    }
  }

  // Test functions for R5: +1, -1 and the hinges max(0, x - j), j = 0..M-1.
  const std::size_t nf = 2 + (nb - 1);
  auto basis = [&](std::size_t f, std::size_t x) -> double {
    if (f == 0) return 1.0;
    if (f == 1) return -1.0;
    const auto j = f - 2;
    return x > j ? static_cast<double>(x - j) : 0.0;
  };
  // proj[o][o'][u][b][f] = f . T_{b,o->o'}(u)
  std::vector<double> proj(r * r * na * nb * nf, 0.0);
  std::vector<char> oracle_edge(r * r, 0);
  auto proj_at = [&](std::size_t o, std::size_t p, std::size_t u, std::size_t b, std::size_t f) -> double& {
    return proj[((((o * r + p) * na + u) * nb + b) * nf) + f];
  };
  for (std::size_t o = 0; o < r; ++o) {
    for (std::size_t p = 0; p < r; ++p) {
      oracle_edge[o * r + p] =
          model.transition(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(p)) > 0.0 ? 1 : 0;
      if (!oracle_edge[o * r + p]) continue;
      for (std::size_t u = 0; u < na; ++u) {
        for (std::size_t b = 0; b < nb; ++b) {
          const Vector t = queue_transition_vector(model, b, o, p, u);
          for (std::size_t f = 0; f < nf; ++f) {
            double s = 0.0;
            for (std::size_t x = 0; x < nb; ++x) {
              s += basis(f, x) * t(static_cast<Eigen::Index>(x));
            }
            proj_at(o, p, u, b, f) = s;
          }
        }
      }
    }
  }

  // beta[o][b][b'][u]
  std::vector<MultiplierRange> beta(r * nb * nb * (na > 0 ? na - 1 : 0));
  auto beta_at = [&](std::size_t o, std::size_t b, std::size_t b2, std::size_t u) -> MultiplierRange& {
    return beta[((o * nb + b) * nb + b2) * (na - 1) + u];
  };
  for (std::size_t o = 0; o < r; ++o) {
    for (std::size_t b = 0; b < nb; ++b) {
      for (std::size_t b2 = b + 1; b2 < nb; ++b2) {
        for (std::size_t u = 0; u + 1 < na; ++u) {
          ++r5.tuples_checked;
          MultiplierRange range;
          for (std::size_t p = 0; p < r; ++p) {
            if (!oracle_edge[o * r + p]) continue;
            for (std::size_t f = 0; f < nf; ++f) {
              const double upper = proj_at(o, p, u + 1, b2, f) - proj_at(o, p, u, b2, f);
              const double lower = proj_at(o, p, u + 1, b, f) - proj_at(o, p, u, b, f);
              range = range.intersect(difference_ratio_range(upper, lower, 1e-12));
            }
          }
          beta_at(o, b, b2, u) = range;
          if (!range.feasible()) {
            record_failure(r5, opt, "no convex-dominance multiplier: " +
                                        tuple_text({{"o", o}, {"b", b}, {"b'", b2}, {"u", u}}));
          }
        }
      }
    }
  }

  // R4 and R6
  for (std::size_t n = 1; n <= n_stages; ++n) {
    for (std::size_t o = 0; o < r; ++o) {
      for (std::size_t u = 0; u + 1 < na; ++u) {
        for (std::size_t b = 0; b < nb; ++b) {
          const double lower = cost_at(n, o, u + 1, b) - cost_at(n, o, u, b);
          for (std::size_t b2 = b + 1; b2 < nb; ++b2) {
            const double upper = cost_at(n, o, u + 1, b2) - cost_at(n, o, u, b2);
            const double tol = 1e-12 * std::max({1.0, std::abs(upper), std::abs(lower)});
            const MultiplierRange alpha = difference_ratio_range(upper, lower, tol);
            ++r4.tuples_checked;
            ++r6.tuples_checked;
            if (!alpha.feasible()) {
              record_failure(r4, opt, "no cost multiplier: " +
                                          tuple_text({{"n", n}, {"o", o}, {"b", b}, {"b'", b2}, {"u", u}}));
            }
            if (!alpha.intersect(beta_at(o, b, b2, u)).feasible()) {
              record_failure(r6, opt, "no common multiplier: " +
                                          tuple_text({{"n", n}, {"o", o}, {"b", b}, {"b'", b2}, {"u", u}}));
            }
          }
        }
      }
    }
  }
  return report;
}

}  // namespace covert
