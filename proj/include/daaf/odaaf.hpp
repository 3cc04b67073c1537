#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "daaf/errors.hpp"
#include "daaf/schedule.hpp"

namespace daaf {

/// Inclusive range of rounds.
struct RoundInterval {
  std::int64_t first = 0;
  std::int64_t last = 0;

  std::int64_t length() const { return last - first + 1; }
  friend bool operator==(const RoundInterval&, const RoundInterval&) = default;
};

struct ArmBlock {
  std::size_t arm = 0;
  RoundInterval rounds;
};

struct ArmEstimate {
  std::size_t arm = 0;
  double mean = 0.0;
};

/// What happened in one phase: the per-arm blocks [S_ij, U_ij], the bridge that
/// followed it, and the elimination decision taken at its end.
struct PhaseRecord {
  int phase = 0;
  double tolerance = 0.0;
  std::int64_t target = 0;  // n_m
  std::vector<ArmBlock> blocks;
  std::optional<ArmBlock> bridge;
  bool completed = false;
  std::vector<ArmEstimate> estimates;   // X-bar_{m,j} of every arm active in the phase
  std::vector<std::size_t> eliminated;  // ascending

  /// [S_m, U_m], spanning the blocks (not the bridge).
  std::optional<RoundInterval> span() const {
    if (blocks.empty()) return std::nullopt;
    return RoundInterval{blocks.front().rounds.first, blocks.back().rounds.last};
  }
};

struct PhaseTrace {
  std::vector<PhaseRecord> phases;
  /// Rounds spent on the committed arm after the schedule ran out or one arm was left.
  std::optional<ArmBlock> commitment;

  /// Phase in which `arm` was eliminated, if it was.
  std::optional<int> elimination_phase(std::size_t arm) const {
    for (const PhaseRecord& p : phases) {
      for (std::size_t j : p.eliminated) {
        if (j == arm) return p.phase;
      }
    }
    return std::nullopt;
  }
};

/// Arms among `estimates` whose mean plus `tolerance` is strictly below the best
/// mean. The empirical leader is never returned.
inline std::vector<std::size_t> elimination_set(std::span<const ArmEstimate> estimates,
                                                double tolerance) {
  std::vector<std::size_t> out;
  if (estimates.empty()) return out;
  double best = estimates.front().mean;
  for (const ArmEstimate& e : estimates) best = std::max(best, e.mean);
  for (const ArmEstimate& e : estimates) {
    if (e.mean + tolerance < best) out.push_back(e.arm);
  }
  return out;
}

/// Highest estimate, lowest arm index on ties.
inline std::size_t leading_arm(std::span<const ArmEstimate> estimates) {
  std::size_t arm = estimates.front().arm;
  double best = estimates.front().mean;
  for (const ArmEstimate& e : estimates) {
    if (e.mean > best || (e.mean == best && e.arm < arm)) {
      best = e.mean;
      arm = e.arm;
    }
  }
  return arm;
}

/// Phased elimination for delayed, aggregated anonymous feedback.
///
/// Each phase plays every active arm, in ascending index order, as one block
/// until its count of kept observations reaches n_m. The phase end compares
/// the running means over all kept observations, drops arms trailing the
/// leader by more than the tolerance, halves the tolerance and, if enabled,
/// spends n_m - n_{m-1} plays of one surviving arm whose observations are
/// thrown away. With one arm left, or no schedule left, it commits.
///
/// select(t) and observe(t, x) must alternate with t = 1, 2, ...
class OdaafPolicy {
 public:
  OdaafPolicy(OdaafConfig cfg, std::size_t arms) : cfg_(cfg), counts_(arms, 0), sums_(arms, 0.0) {
    cfg_.validate();
    if (arms < 2) throw ConfigError("ODAAF needs at least 2 arms");
    active_.reserve(arms);
    for (std::size_t j = 0; j < arms; ++j) active_.push_back(j);
    begin_phase(1);
  }

  std::size_t select(std::int64_t t) {
    if (t > cfg_.horizon) throw UsageError("ODAAF asked to play past its horizon");
    if (t < 1) throw UsageError("rounds start at 1");
    switch (stage_) {
      case Stage::play: {
        PhaseRecord& rec = trace_.phases.back();
        const std::size_t arm = active_[block_];
        if (!block_open_) {
          rec.blocks.push_back({arm, {t, t}});
          block_open_ = true;
        }
        rec.blocks.back().rounds.last = t;
        current_ = arm;
        break;
      }
      case Stage::bridge: {
        ArmBlock& bridge = *trace_.phases.back().bridge;
        if (bridge.rounds.first == 0) bridge.rounds.first = t;
        bridge.rounds.last = t;
        current_ = bridge.arm;
        break;
      }
      case Stage::commit:
        if (trace_.commitment->rounds.first == 0) trace_.commitment->rounds.first = t;
        trace_.commitment->rounds.last = t;
        current_ = trace_.commitment->arm;
        break;
    }
    return current_;
  }

  void observe(std::int64_t /*t*/, double x) {
    switch (stage_) {
      case Stage::play:
        sums_[current_] += x;
        if (++counts_[current_] >= target_) {
          block_open_ = false;
          if (++block_ == active_.size()) end_phase();
        }
        break;
      case Stage::bridge:
        if (--bridge_left_ == 0) begin_phase(phase_ + 1);
        break;
      case Stage::commit:
        break;
    }
  }

  const OdaafConfig& config() const { return cfg_; }
  int phase() const { return phase_; }
  double tolerance() const { return phase_tolerance(phase_); }
  std::int64_t target() const { return target_; }
  const std::vector<std::size_t>& active_arms() const { return active_; }
  std::int64_t count(std::size_t arm) const { return counts_.at(arm); }
  double observation_sum(std::size_t arm) const { return sums_.at(arm); }
  bool in_bridge() const { return stage_ == Stage::bridge; }
  bool committed() const { return stage_ == Stage::commit; }
  const PhaseTrace& trace() const { return trace_; }

 private:
  enum class Stage { play, bridge, commit };

  void begin_phase(int m) {
    const std::optional<std::int64_t> nm = schedule_nm(cfg_, m);
    if (!nm) {
      commit(leader_of_last_phase());
      return;
    }
    phase_ = m;
    previous_target_ = m == 1 ? 0 : target_;
    target_ = std::max(*nm, previous_target_);
    block_ = 0;
    block_open_ = false;
    stage_ = Stage::play;
    PhaseRecord rec;
    rec.phase = m;
    rec.tolerance = phase_tolerance(m);
    rec.target = target_;
    trace_.phases.push_back(std::move(rec));
    // A non-increasing schedule leaves nothing to play this phase.
    if (target_ == previous_target_) end_phase();
  }

  void end_phase() {
    PhaseRecord& rec = trace_.phases.back();
    rec.completed = true;
    rec.estimates.clear();
    for (std::size_t j : active_) {
      rec.estimates.push_back({j, sums_[j] / static_cast<double>(target_)});
    }
    rec.eliminated = elimination_set(rec.estimates, phase_tolerance(phase_));

    std::vector<std::size_t> survivors;
    std::vector<ArmEstimate> surviving_estimates;
    for (const ArmEstimate& e : rec.estimates) {
      if (std::find(rec.eliminated.begin(), rec.eliminated.end(), e.arm) == rec.eliminated.end()) {
        survivors.push_back(e.arm);
        surviving_estimates.push_back(e);
      }
    }
    active_ = std::move(survivors);
    const std::size_t leader = leading_arm(surviving_estimates);

    if (active_.size() == 1) {
      commit(active_.front());
      return;
    }
    if (!schedule_nm(cfg_, phase_ + 1)) {
      commit(leader);
      return;
    }
    const std::int64_t bridge_plays = target_ - previous_target_;
    if (cfg_.bridge_enabled() && bridge_plays > 0) {
      const std::size_t arm =
          cfg_.bridge_arm == BridgeArmRule::leader ? leader : active_.front();
      rec.bridge = ArmBlock{arm, {0, 0}};
      bridge_left_ = bridge_plays;
      stage_ = Stage::bridge;
      return;
    }
    begin_phase(phase_ + 1);
  }

  std::size_t leader_of_last_phase() const {
    for (auto it = trace_.phases.rbegin(); it != trace_.phases.rend(); ++it) {
      if (!it->completed) continue;
      std::vector<ArmEstimate> kept;
      for (const ArmEstimate& e : it->estimates) {
        if (std::find(active_.begin(), active_.end(), e.arm) != active_.end()) kept.push_back(e);
      }
      return leading_arm(kept);
    }
    return active_.front();
  }

  void commit(std::size_t arm) {
    stage_ = Stage::commit;
    trace_.commitment = ArmBlock{arm, {0, 0}};
  }

  OdaafConfig cfg_;
  std::vector<std::int64_t> counts_;
  std::vector<double> sums_;
  std::vector<std::size_t> active_;
  int phase_ = 1;
  std::int64_t target_ = 0;
  std::int64_t previous_target_ = 0;
  std::size_t block_ = 0;
  bool block_open_ = false;
  std::int64_t bridge_left_ = 0;
  std::size_t current_ = 0;
  Stage stage_ = Stage::play;
  PhaseTrace trace_;
};

}  // namespace daaf
