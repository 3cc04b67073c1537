#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "daaf/bandit.hpp"
#include "daaf/errors.hpp"
#include "daaf/rng.hpp"

namespace daaf {

/// A reward in flight or delivered, with the arm that generated it.
struct Arrival {
  std::size_t arm = 0;
  double reward = 0.0;

  friend bool operator==(const Arrival&, const Arrival&) = default;
};

/// Pending rewards keyed by absolute arrival round.
///
/// A power-of-two ring of buckets covering rounds [next, next + capacity). A
/// reward scheduled beyond the window grows the ring, so unbounded delays are
/// handled; delivered buckets are cleared in place and keep their storage.
class RewardCalendar {
 public:
  explicit RewardCalendar(std::size_t capacity = 64)
      : buckets_(std::bit_ceil(std::max<std::size_t>(capacity, 1))) {}

  /// Next round that deliver() will hand out.
  std::int64_t next_round() const { return next_; }
  std::size_t in_flight() const { return in_flight_; }
  std::size_t capacity() const { return buckets_.size(); }

  void schedule(std::int64_t round, Arrival arrival) {
    if (round < next_) throw UsageError("cannot schedule a reward in a delivered round");
    const auto offset = static_cast<std::uint64_t>(round - next_);
    if (offset >= buckets_.size()) grow(offset + 1);
    buckets_[slot(round)].push_back(arrival);
    ++in_flight_;
  }

  /// Hands out everything arriving in next_round() and advances by one round.
  /// The returned view stays valid until the following deliver().
  std::span<const Arrival> deliver() {
    delivered_.clear();
    std::swap(delivered_, buckets_[slot(next_)]);
    in_flight_ -= delivered_.size();
    ++next_;
    return delivered_;
  }

  /// Visits every pending (round, arrival) pair. Order is unspecified.
  template <class Fn>
  void for_each_pending(Fn&& fn) const {
    for (std::size_t i = 0; i < buckets_.size(); ++i) {
      const std::int64_t round = round_of(i);
      for (const Arrival& a : buckets_[i]) fn(round, a);
    }
  }

 private:
  std::size_t slot(std::int64_t round) const {
    return static_cast<std::size_t>(static_cast<std::uint64_t>(round) & (buckets_.size() - 1));
  }

  std::int64_t round_of(std::size_t index) const {
    const std::size_t mask = buckets_.size() - 1;
    const std::size_t distance = (index - slot(next_)) & mask;
    return next_ + static_cast<std::int64_t>(distance);
  }

  void grow(std::uint64_t span) {
    std::vector<std::vector<Arrival>> bigger(std::bit_ceil(static_cast<std::size_t>(span)));
    const std::size_t new_mask = bigger.size() - 1;
    for (std::size_t i = 0; i < buckets_.size(); ++i) {
      if (buckets_[i].empty()) continue;
      const auto round = static_cast<std::uint64_t>(round_of(i));
      bigger[round & new_mask] = std::move(buckets_[i]);
    }
    buckets_ = std::move(bigger);
  }

  std::vector<std::vector<Arrival>> buckets_;
  std::vector<Arrival> delivered_;
  std::int64_t next_ = 1;
  std::size_t in_flight_ = 0;
};

/// Simulator for delayed, aggregated anonymous feedback.
///
/// Round t (the clock after the t-th step) plays an arm, draws its reward R and
/// delay tau, and schedules R for round t + tau. The observation of round t is
/// everything scheduled for round t, including a zero-delay reward from this
/// very play. Rewards scheduled past the horizon stay pending forever.
///
/// Rewards are Bernoulli, so reward mass is tracked as integer counts and the
/// conservation identity generated = observed + pending holds exactly.
class Environment {
 public:
  Environment(BanditInstance instance, std::uint64_t seed)
      : instance_(std::move(instance)), rng_(seed) {
    if (auto bound = instance_.delay().bound())
      calendar_ = RewardCalendar(static_cast<std::size_t>(*bound) + 1);
  }

  const BanditInstance& instance() const { return instance_; }
  std::int64_t clock() const { return clock_; }

  std::int64_t generated_total() const { return generated_; }
  std::int64_t observed_total() const { return observed_; }
  /// Reward mass in flight, maintained incrementally.
  std::int64_t pending_total() const { return pending_; }
  /// Reward mass in flight, recomputed by walking the calendar.
  std::int64_t pending_mass_scan() const {
    double mass = 0.0;
    calendar_.for_each_pending([&](std::int64_t, const Arrival& a) { mass += a.reward; });
    return static_cast<std::int64_t>(mass);
  }
  std::size_t in_flight() const { return calendar_.in_flight(); }
  const RewardCalendar& calendar() const { return calendar_; }

  /// Aggregated anonymous observation X_t for playing `arm`.
  double step(std::size_t arm) {
    double total = 0.0;
    for (const Arrival& a : advance(arm)) total += a.reward;
    return total;
  }

  /// Same draws as step(), but the arrivals keep their arm labels. The view is
  /// valid until the next step.
  std::span<const Arrival> step_labeled(std::size_t arm) { return advance(arm); }

 private:
  double draw_reward(std::size_t arm) {
    return std::bernoulli_distribution(instance_.mean(arm))(rng_) ? 1.0 : 0.0;
  }

  std::span<const Arrival> advance(std::size_t arm) {
    instance_.check_arm(arm);
    ++clock_;
    const double reward = draw_reward(arm);
    const std::int64_t delay = instance_.delay().sample(rng_);
    calendar_.schedule(clock_ + delay, Arrival{arm, reward});
    const auto units = static_cast<std::int64_t>(reward);
    generated_ += units;
    pending_ += units;

    std::span<const Arrival> arrived = calendar_.deliver();
    for (const Arrival& a : arrived) {
      const auto got = static_cast<std::int64_t>(a.reward);
      observed_ += got;
      pending_ -= got;
    }
    return arrived;
  }

  BanditInstance instance_;
  Rng rng_;
  RewardCalendar calendar_;
  std::int64_t clock_ = 0;
  std::int64_t generated_ = 0;
  std::int64_t observed_ = 0;
  std::int64_t pending_ = 0;
};

}  // namespace daaf
