#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "daaf/bandit.hpp"
#include "daaf/environment.hpp"
#include "daaf/errors.hpp"
#include "daaf/policy.hpp"
#include "daaf/rng.hpp"

namespace daaf {

struct Checkpoint {
  std::int64_t t = 0;
  double regret = 0.0;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

/// Cumulative pseudo-regret of one seeded replication, sampled at checkpoints.
struct RegretTrajectory {
  std::uint64_t seed = 0;
  std::vector<Checkpoint> checkpoints;
  double final_regret = 0.0;

  friend bool operator==(const RegretTrajectory&, const RegretTrajectory&) = default;
};

/// stride, 2 stride, ... up to the horizon, always ending at the horizon.
inline std::vector<std::int64_t> checkpoint_rounds(std::int64_t horizon, std::int64_t stride) {
  if (stride < 1) throw ConfigError("checkpoint stride must be >= 1");
  std::vector<std::int64_t> out;
  for (std::int64_t t = stride; t < horizon; t += stride) out.push_back(t);
  out.push_back(horizon);
  return out;
}

inline std::int64_t default_checkpoint_stride(std::int64_t horizon) {
  return std::max<std::int64_t>(1, horizon / 500);
}

struct NoStepHook {
  void operator()(std::int64_t, std::size_t) const {}
};

/// Plays `policy` against a fresh environment for the instance's horizon.
///
/// Regret at a checkpoint is sum_j plays_j * gap_j over the arms played so far,
/// so it depends only on the arm sequence. `on_step(t, arm)` sees every play.
template <class Policy, class StepHook = NoStepHook>
  requires AnonymousPolicy<Policy> || LabeledPolicy<Policy>
RegretTrajectory run_replication(Policy& policy, const BanditInstance& instance,
                                 std::uint64_t seed, std::int64_t stride,
                                 StepHook&& on_step = {}) {
  const std::int64_t horizon = instance.horizon();
  const std::vector<std::int64_t> rounds = checkpoint_rounds(horizon, stride);
  Environment env(instance, seed);
  std::vector<std::int64_t> plays(instance.arms(), 0);
  auto regret_now = [&] {
    double total = 0.0;
    for (std::size_t j = 0; j < plays.size(); ++j)
      total += static_cast<double>(plays[j]) * instance.gap(j);
    return total;
  };

  RegretTrajectory out;
  out.seed = seed;
  out.checkpoints.reserve(rounds.size());
  std::size_t next = 0;
  for (std::int64_t t = 1; t <= horizon; ++t) {
    const std::size_t arm = policy.select(t);
    instance.check_arm(arm);
    if constexpr (LabeledPolicy<Policy>) {
      policy.observe_labeled(t, env.step_labeled(arm));
    } else {
      policy.observe(t, env.step(arm));
    }
    ++plays[arm];
    on_step(t, arm);
    if (t == rounds[next]) {
      out.checkpoints.push_back({t, regret_now()});
      ++next;
    }
  }
  out.final_regret = out.checkpoints.back().regret;
  return out;
}

template <class StepHook = NoStepHook>
RegretTrajectory run_replication(AnyPolicy& policy, const BanditInstance& instance,
                                 std::uint64_t seed, std::int64_t stride,
                                 StepHook&& on_step = {}) {
  return std::visit(
      [&](auto& p) { return run_replication(p, instance, seed, stride, on_step); }, policy);
}

inline RegretTrajectory run_replication(const PolicySpec& spec, const BanditInstance& instance,
                                        std::uint64_t seed, std::int64_t stride) {
  AnyPolicy policy = make_policy(spec, instance);
  return run_replication(policy, instance, seed, stride);
}

struct ExperimentConfig {
  std::vector<double> arm_means;
  DelayModel delay = DelayModel::constant(0);
  std::int64_t horizon = 0;
  std::int64_t replications = 1;
  std::vector<PolicySpec> policies;
  std::uint64_t master_seed = 0;
  /// 0 selects the default of horizon / 500.
  std::int64_t checkpoint_stride = 0;
  std::string output_dir;
  /// 0 selects std::thread::hardware_concurrency().
  unsigned workers = 0;
  /// (numerator, denominator) policy names. Empty selects every policy against
  /// the first QPM-D policy, if there is one.
  std::vector<std::pair<std::string, std::string>> ratios;

  BanditInstance instance() const { return BanditInstance(arm_means, delay, horizon); }

  std::int64_t stride() const {
    return checkpoint_stride > 0 ? checkpoint_stride : default_checkpoint_stride(horizon);
  }

  unsigned worker_count() const {
    if (workers > 0) return workers;
    return std::max(1u, std::thread::hardware_concurrency());
  }

  std::vector<std::pair<std::string, std::string>> ratio_pairs() const {
    if (!ratios.empty()) return ratios;
    std::vector<std::pair<std::string, std::string>> out;
    auto qpmd = std::find_if(policies.begin(), policies.end(),
                             [](const PolicySpec& p) { return p.type == PolicyType::qpmd; });
    if (qpmd == policies.end()) return out;
    for (const PolicySpec& p : policies) {
      if (p.name != qpmd->name) out.emplace_back(p.name, qpmd->name);
    }
    return out;
  }

  /// Canonical text of everything that determines the results.
  std::string canonical() const {
    std::ostringstream out;
    out.precision(17);
    out << "means=";
    for (double mu : arm_means) out << mu << ';';
    out << "delay=" << delay.describe() << ";T=" << horizon << ";R=" << replications
        << ";seed=" << master_seed << ";stride=" << stride() << ";policies=";
    for (const PolicySpec& p : policies) {
      out << p.name << ':' << to_string(p.type) << ':' << to_string(p.variant) << ':'
          << p.mean_delay.value_or(-1) << ':' << p.delay_bound.value_or(-1) << ':'
          << p.delay_variance.value_or(-1) << ':' << p.use_variance_over_mean << ':'
          << (p.bridge ? static_cast<int>(*p.bridge) : -1) << ':'
          << static_cast<int>(p.bridge_arm) << ';';
    }
    return out.str();
  }
};

/// 64-bit FNV-1a, hex encoded.
inline std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kDigits[h & 0xF];
  return out;
}

struct PolicySummary {
  std::string name;
  std::vector<RegretTrajectory> trajectories;  // indexed by replication
  std::vector<std::int64_t> t;
  std::vector<double> mean;
  std::vector<double> std_error;
  double final_mean = 0.0;
};

struct RatioPoint {
  std::int64_t t = 0;
  double ratio = 0.0;
};

struct RatioSeries {
  std::string numerator;
  std::string denominator;
  std::vector<RatioPoint> points;
};

struct ExperimentSummary {
  std::vector<PolicySummary> policies;
  std::vector<RatioSeries> ratios;
  std::string config_hash;
  double wall_seconds = 0.0;

  const PolicySummary& policy(std::string_view name) const {
    for (const PolicySummary& p : policies) {
      if (p.name == name) return p;
    }
    throw UsageError("no policy named '" + std::string(name) + "'");
  }
};

/// Pointwise a/b over shared checkpoints; points where b <= 0 are skipped.
inline std::vector<RatioPoint> ratio_series(std::span<const std::int64_t> t,
                                            std::span<const double> a,
                                            std::span<const double> b) {
  if (a.size() != t.size() || b.size() != t.size())
    throw UsageError("ratio series needs trajectories on shared checkpoints");
  std::vector<RatioPoint> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (b[i] > 0.0) out.push_back({t[i], a[i] / b[i]});
  }
  return out;
}

/// Mean and standard error over replications at each shared checkpoint.
inline void aggregate(PolicySummary& summary) {
  const auto& reps = summary.trajectories;
  summary.t.clear();
  summary.mean.clear();
  summary.std_error.clear();
  if (reps.empty()) return;
  const std::size_t points = reps.front().checkpoints.size();
  const double r = static_cast<double>(reps.size());
  for (std::size_t i = 0; i < points; ++i) {
    double sum = 0.0;
    for (const RegretTrajectory& tr : reps) sum += tr.checkpoints[i].regret;
    const double mean = sum / r;
    double sq = 0.0;
    for (const RegretTrajectory& tr : reps) {
      const double d = tr.checkpoints[i].regret - mean;
      sq += d * d;
    }
    const double se = reps.size() > 1 ? std::sqrt(sq / (r - 1.0)) / std::sqrt(r) : 0.0;
    summary.t.push_back(reps.front().checkpoints[i].t);
    summary.mean.push_back(mean);
    summary.std_error.push_back(se);
  }
  summary.final_mean = summary.mean.back();
}

namespace detail {

inline void ensure_writable_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
  const fs::path probe = fs::path(dir) / ".daaf_write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw IoError("output directory '" + dir + "' is not writable");
  }
  fs::remove(probe, ec);
}

/// Runs fn(i) for i in [0, n) on `workers` threads. Rethrows the first failure.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

/// R seeded replications of every policy. Replication r uses the same
/// environment seed for every policy; results are merged by index, so the
/// summary does not depend on the worker count.
inline ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  const auto started = std::chrono::steady_clock::now();
  if (cfg.replications < 1) throw ConfigError("replications must be >= 1");
  const BanditInstance instance = cfg.instance();
  std::set<std::string> names;
  for (const PolicySpec& p : cfg.policies) {
    if (p.name.empty()) throw ConfigError("policy names must be non-empty");
    if (!names.insert(p.name).second) throw ConfigError("duplicate policy name '" + p.name + "'");
    make_policy(p, instance);  // validates the configuration up front
  }
  const auto pairs = cfg.ratio_pairs();
  for (const auto& [num, den] : pairs) {
    if (!names.contains(num) || !names.contains(den))
      throw ConfigError("ratio refers to unknown policy '" + (names.contains(num) ? den : num) + "'");
  }
  if (!cfg.output_dir.empty()) detail::ensure_writable_dir(cfg.output_dir);

  const auto reps = static_cast<std::size_t>(cfg.replications);
  const std::int64_t stride = cfg.stride();
  ExperimentSummary summary;
  summary.policies.resize(cfg.policies.size());
  for (std::size_t i = 0; i < cfg.policies.size(); ++i) {
    summary.policies[i].name = cfg.policies[i].name;
    summary.policies[i].trajectories.resize(reps);
  }

  detail::parallel_for(cfg.policies.size() * reps, cfg.worker_count(), [&](std::size_t task) {
    const std::size_t p = task / reps;
    const std::size_t r = task % reps;
    summary.policies[p].trajectories[r] =
        run_replication(cfg.policies[p], instance, replication_seed(cfg.master_seed, r), stride);
  });

  for (PolicySummary& p : summary.policies) aggregate(p);
  for (const auto& [num, den] : pairs) {
    const PolicySummary& a = summary.policy(num);
    const PolicySummary& b = summary.policy(den);
    summary.ratios.push_back({num, den, ratio_series(a.t, a.mean, b.mean)});
  }
  summary.config_hash = fnv1a_hex(cfg.canonical());
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return summary;
}

struct SweepRow {
  std::string policy;
  double location = 0.0;     // the swept delay parameter
  double mean_delay = 0.0;   // E[tau] of the resulting delay model
  double final_mean = 0.0;
  double final_std_error = 0.0;
  double ratio = 0.0;        // final_mean / final_mean at the smallest location
};

struct SweepResult {
  std::vector<SweepRow> rows;  // grouped by policy, in the order of `locations`

  std::vector<SweepRow> for_policy(std::string_view name) const {
    std::vector<SweepRow> out;
    for (const SweepRow& row : rows) {
      if (row.policy == name) out.push_back(row);
    }
    return out;
  }
};

/// Final regret of each policy as the delay family's location moves, relative
/// to the same policy at the smallest listed location.
inline SweepResult mean_delay_sweep(const ExperimentConfig& cfg, std::span<const double> locations) {
  if (locations.empty()) throw ConfigError("sweep needs at least one delay mean");
  std::vector<ExperimentSummary> runs;
  std::vector<double> delay_means;
  for (double location : locations) {
    ExperimentConfig at = cfg;
    at.delay = cfg.delay.relocated(location);
    at.output_dir.clear();
    at.ratios.clear();
    runs.push_back(run_experiment(at));
    delay_means.push_back(at.delay.mean());
  }
  // The smallest location is the baseline: 0 in the usual sweep, and a single
  // location degenerates to ratio 1.
  const std::size_t base_index = static_cast<std::size_t>(
      std::min_element(locations.begin(), locations.end()) - locations.begin());
  const ExperimentSummary& baseline = runs[base_index];

  SweepResult out;
  for (const PolicySpec& spec : cfg.policies) {
    const double base = baseline.policy(spec.name).final_mean;
    for (std::size_t i = 0; i < locations.size(); ++i) {
      const PolicySummary& p = runs[i].policy(spec.name);
      SweepRow row;
      row.policy = spec.name;
      row.location = locations[i];
      row.mean_delay = delay_means[i];
      row.final_mean = p.final_mean;
      row.final_std_error = p.std_error.back();
      row.ratio = base > 0.0 ? p.final_mean / base : std::nan("");
      out.rows.push_back(row);
    }
  }
  return out;
}

}  // namespace daaf
