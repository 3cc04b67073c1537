#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "daaf/delay.hpp"
#include "daaf/errors.hpp"

namespace daaf {

/// K Bernoulli arms sharing one delay distribution, played for a known horizon.
///
/// Rewards are Bernoulli(mu_j). Other [0,1]-supported reward laws would plug in
/// at Environment::draw_reward; only Bernoulli is provided.
class BanditInstance {
 public:
  BanditInstance(std::vector<double> arm_means, DelayModel delay, std::int64_t horizon)
      : means_(std::move(arm_means)), delay_(delay), horizon_(horizon) {
    if (means_.size() < 2) throw ConfigError("a bandit instance needs at least 2 arms");
    for (double mu : means_) {
      if (!(mu >= 0.0 && mu <= 1.0)) throw ConfigError("arm means must lie in [0, 1]");
    }
    if (horizon_ < 1) throw ConfigError("horizon must be positive");
    best_arm_ = static_cast<std::size_t>(
        std::distance(means_.begin(), std::max_element(means_.begin(), means_.end())));
  }

  std::size_t arms() const { return means_.size(); }
  const std::vector<double>& means() const { return means_; }
  double mean(std::size_t arm) const { return means_.at(arm); }
  const DelayModel& delay() const { return delay_; }
  std::int64_t horizon() const { return horizon_; }

  /// Lowest-index optimal arm.
  std::size_t best_arm() const { return best_arm_; }
  double best_mean() const { return means_[best_arm_]; }

  double gap(std::size_t arm) const {
    check_arm(arm);
    return means_[best_arm_] - means_[arm];
  }

  void check_arm(std::size_t arm) const {
    if (arm >= means_.size())
      throw UsageError("arm index " + std::to_string(arm) + " out of range for " +
                       std::to_string(means_.size()) + " arms");
  }

  BanditInstance with_delay(DelayModel delay) const {
    return BanditInstance(means_, delay, horizon_);
  }
  BanditInstance with_horizon(std::int64_t horizon) const {
    return BanditInstance(means_, delay_, horizon);
  }

 private:
  std::vector<double> means_;
  DelayModel delay_;
  std::int64_t horizon_;
  std::size_t best_arm_ = 0;
};

inline double pseudo_regret_increment(const BanditInstance& instance, std::size_t arm) {
  return instance.gap(arm);
}

/// KL(Bernoulli(p) || Bernoulli(q)), with the 0 ln 0 = 0 convention.
inline double bernoulli_kl(double p, double q) {
  auto term = [](double a, double b) {
    if (a == 0.0) return 0.0;
    if (b == 0.0) return HUGE_VAL;
    return a * std::log(a / b);
  };
  return term(p, q) + term(1.0 - p, 1.0 - q);
}

/// Asymptotic log-regret slope sum_{j: gap>0} gap_j / KL(mu_j, mu*).
inline double lai_robbins_constant(const BanditInstance& instance) {
  const double best = instance.best_mean();
  double total = 0.0;
  for (std::size_t j = 0; j < instance.arms(); ++j) {
    const double gap = best - instance.mean(j);
    if (gap <= 0.0) continue;
    if (best >= 1.0)
      throw DomainError("Bernoulli KL to the optimal arm is infinite");
    total += gap / bernoulli_kl(instance.mean(j), best);
  }
  return total;
}

}  // namespace daaf
