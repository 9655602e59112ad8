#include "covert/threshold_policy.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "covert/errors.hpp"

namespace covert {

bool ThresholdPolicy::is_monotone() const {
  for (Eigen::Index o = 0; o < thresholds.rows(); ++o) {
    for (Eigen::Index u = 1; u < thresholds.cols(); ++u) {
      if (thresholds(o, u) < thresholds(o, u - 1)) {
        return false;
      }
    }
  }
  return true;
}

void ThresholdPolicy::validate() const {
  if (thresholds.size() == 0) {
    throw ShapeError("threshold policy: empty threshold table");
  }
  if (!(temperature > 0.0)) {
    throw DomainError("threshold policy: temperature must be positive");
  }
  if (!is_monotone()) {
    throw DomainError("threshold policy: thresholds must be nondecreasing in the action index");
  }
}

double smooth_action_value(const ThresholdPolicy& policy, std::size_t b, std::size_t o) {
  const auto row = static_cast<Eigen::Index>(o);
  double sum = 0.0;
  for (Eigen::Index u = 0; u < policy.thresholds.cols(); ++u) {
    const double z = (static_cast<double>(b) - policy.thresholds(row, u)) / policy.temperature;
    // Split on the sign so exp never overflows.
    sum += z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  }
  return sum;
}

std::size_t stationary_action(const ThresholdPolicy& policy, std::size_t b, std::size_t o, ActionMode mode,
                              Rng* rng) {
  const auto na = policy.num_actions();
  std::size_t count = 0;
  if (mode == ActionMode::kHard) {
    const double x = static_cast<double>(b);
    for (Eigen::Index u = 0; u < policy.thresholds.cols(); ++u) {
      if (policy.thresholds(static_cast<Eigen::Index>(o), u) <= x) {
        ++count;
      }
    }
  } else if (mode == ActionMode::kSmooth) {
    const double soft = std::round(smooth_action_value(policy, b, o));
    count = soft <= 0.0 ? 0 : static_cast<std::size_t>(soft);
  } else {
    if (rng == nullptr) {
      throw DomainError("stationary_action: dithered mode needs a random stream");
    }
    const double soft = smooth_action_value(policy, b, o);
    const double base = std::floor(soft);
    const double up = rng->uniform() < soft - base ? 1.0 : 0.0;
    count = static_cast<std::size_t>(std::max(0.0, base + up));
  }
  return std::clamp<std::size_t>(count, 1, na) - 1;
}

void project_monotone(ThresholdPolicy& policy, double upper) {
  auto& t = policy.thresholds;
  for (Eigen::Index o = 0; o < t.rows(); ++o) {
    // Blocks of (mean, size) merged while they violate the ordering.
    std::vector<std::pair<double, std::size_t>> blocks;
    for (Eigen::Index u = 0; u < t.cols(); ++u) {
      blocks.emplace_back(t(o, u), 1);
      while (blocks.size() > 1 && blocks[blocks.size() - 2].first > blocks.back().first) {
        const auto [m2, n2] = blocks.back();
        blocks.pop_back();
        auto& [m1, n1] = blocks.back();
        m1 = (m1 * static_cast<double>(n1) + m2 * static_cast<double>(n2)) / static_cast<double>(n1 + n2);
        n1 += n2;
      }
    }
    Eigen::Index u = 0;
    for (const auto& [mean, size] : blocks) {
      for (std::size_t k = 0; k < size; ++k, ++u) {
        t(o, u) = std::clamp(mean, 0.0, upper);
      }
    }
  }
}

ThresholdPolicy thresholds_from_stage(const PolicyTable& policy, std::size_t n, std::size_t num_actions,
                                      double temperature) {
  if (n == 0 || n >= policy.stages()) {
    throw IndexError("thresholds_from_stage: stage " + std::to_string(n) + " out of range");
  }
  const auto r = policy.oracle_states();
  const auto nb = policy.queue_states();
  ThresholdPolicy out;
  out.temperature = temperature;
  out.thresholds = Matrix::Constant(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(num_actions),
                                    static_cast<double>(nb));
  for (std::size_t o = 0; o < r; ++o) {
    for (std::size_t u = 0; u < num_actions; ++u) {
      for (std::size_t b = 0; b < nb; ++b) {
        if (policy(n, o, b) >= u) {
          out.thresholds(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(u)) = static_cast<double>(b);
          break;
        }
      }
    }
  }
  return out;
}

}  // namespace covert
