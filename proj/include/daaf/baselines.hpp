#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "daaf/environment.hpp"
#include "daaf/errors.hpp"

namespace daaf {

/// UCB1 arm choice at round t: any unplayed arm first (lowest index), otherwise
/// argmax of mean_j + sqrt(2 ln t / count_j) with ties to the lowest index.
inline std::size_t ucb1_select(std::int64_t t, std::span<const std::int64_t> counts,
                               std::span<const double> means) {
  if (t < 1) throw UsageError("UCB1 rounds start at 1");
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] == 0) return j;
  }
  const double log_t = std::log(static_cast<double>(t));
  std::size_t best = 0;
  double best_index = -HUGE_VAL;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    const double index = means[j] + std::sqrt(2.0 * log_t / static_cast<double>(counts[j]));
    if (index > best_index) {
      best_index = index;
      best = j;
    }
  }
  return best;
}

/// UCB1 state driven by explicit (arm, reward) updates. Its clock is the number
/// of updates seen plus one.
class Ucb1 {
 public:
  explicit Ucb1(std::size_t arms) : counts_(arms, 0), sums_(arms, 0.0), means_(arms, 0.0) {}

  std::size_t desired_arm() const { return ucb1_select(updates_ + 1, counts_, means_); }

  void update(std::size_t arm, double reward) {
    ++counts_[arm];
    sums_[arm] += reward;
    means_[arm] = sums_[arm] / static_cast<double>(counts_[arm]);
    ++updates_;
  }

  std::size_t arms() const { return counts_.size(); }
  std::int64_t updates() const { return updates_; }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  const std::vector<double>& means() const { return means_; }

 private:
  std::vector<std::int64_t> counts_;
  std::vector<double> sums_;
  std::vector<double> means_;
  std::int64_t updates_ = 0;
};

/// UCB1 fed with labeled delayed feedback: every arriving reward updates the
/// index of the arm that produced it. With zero delay this is plain UCB1.
class Ucb1Policy {
 public:
  explicit Ucb1Policy(std::size_t arms) : base_(arms) {}

  std::size_t select(std::int64_t /*t*/) { return base_.desired_arm(); }

  void observe_labeled(std::int64_t /*t*/, std::span<const Arrival> arrivals) {
    for (const Arrival& a : arrivals) base_.update(a.arm, a.reward);
  }

  const Ucb1& base() const { return base_; }

 private:
  Ucb1 base_;
};

/// Queued partial monitoring with delays, over a UCB1 base.
///
/// Labeled rewards are parked in per-arm FIFO queues. Before each play the base
/// consumes queued rewards of the arm it wants, one at a time, re-deciding
/// after each; once the wanted arm's queue is empty, that arm is played.
class QpmdPolicy {
 public:
  explicit QpmdPolicy(std::size_t arms) : base_(arms), queues_(arms) {}

  std::size_t select(std::int64_t /*t*/) {
    std::size_t wanted = base_.desired_arm();
    while (!queues_[wanted].empty()) {
      const double reward = queues_[wanted].front();
      queues_[wanted].pop_front();
      base_.update(wanted, reward);
      wanted = base_.desired_arm();
    }
    return wanted;
  }

  void observe_labeled(std::int64_t /*t*/, std::span<const Arrival> arrivals) {
    for (const Arrival& a : arrivals) queues_[a.arm].push_back(a.reward);
  }

  const Ucb1& base() const { return base_; }
  std::size_t queued(std::size_t arm) const { return queues_.at(arm).size(); }

 private:
  Ucb1 base_;
  std::vector<std::deque<double>> queues_;
};

}  // namespace daaf
