#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "daaf/bandit.hpp"
#include "daaf/harness.hpp"
#include "daaf/odaaf.hpp"
#include "daaf/rng.hpp"
#include "daaf/schedule.hpp"

namespace daaf {

/// One assertion of a check: pass/fail plus how much room was left.
struct CheckItem {
  std::string label;
  bool passed = true;
  bool inconclusive = false;
  double margin = 0.0;
  nlohmann::json detail = nlohmann::json::object();
};

struct CheckReport {
  std::string name;
  std::vector<CheckItem> items;

  bool passed() const {
    for (const CheckItem& item : items) {
      if (!item.passed) return false;
    }
    return true;
  }

  std::size_t failures() const {
    std::size_t n = 0;
    for (const CheckItem& item : items) n += item.passed ? 0 : 1;
    return n;
  }

  nlohmann::json to_json() const {
    nlohmann::json out;
    out["name"] = name;
    out["passed"] = passed();
    out["items"] = nlohmann::json::array();
    for (const CheckItem& item : items) {
      out["items"].push_back({{"label", item.label},
                              {"passed", item.passed},
                              {"inconclusive", item.inconclusive},
                              {"margin", item.margin},
                              {"detail", item.detail}});
    }
    return out;
  }
};

namespace detail {

inline std::string short_number(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace detail

inline std::string describe(const OdaafConfig& cfg) {
  std::string out = std::string(to_string(cfg.variant)) + " T=" + std::to_string(cfg.horizon) +
                    " E=" + detail::short_number(cfg.mean_delay);
  if (cfg.delay_bound) out += " d=" + std::to_string(*cfg.delay_bound);
  if (cfg.delay_variance) out += " V=" + detail::short_number(*cfg.delay_variance);
  if (cfg.use_variance_over_mean) out += " V/E";
  return out;
}

/// Confidence width w_m implied by n samples per arm at phase m; the schedule
/// n_m is the smallest n making this at most tol_m / 2.
inline double confidence_width(const OdaafConfig& cfg, int m, std::int64_t n) {
  const long double log_term = phase_log_term(cfg.horizon, m);
  const long double nn = static_cast<long double>(n);
  const long double mean = cfg.mean_delay;
  if (cfg.variant == OdaafVariant::naive_bounded) {
    const long double d = static_cast<long double>(cfg.delay_bound.value());
    return static_cast<double>(std::sqrt(log_term / (2.0L * nn)) + m * d / nn);
  }
  const long double common = 4.0L * log_term / (3.0L * nn) + std::sqrt(2.0L * log_term / nn);
  long double delay_term = 0.0L;
  switch (cfg.variant) {
    case OdaafVariant::known_expectation:
      delay_term = 3.0L * m * mean / nn;
      break;
    case OdaafVariant::bounded:
      delay_term = 2.0L * mean / nn;
      break;
    case OdaafVariant::variance:
      delay_term = (2.0L * mean + 4.0L * static_cast<long double>(cfg.effective_variance())) / nn;
      break;
    case OdaafVariant::naive_bounded:
      break;
  }
  return static_cast<double>(common + delay_term);
}

/// w_m(n_m) <= tol_m / 2 for every phase with a defined schedule.
inline CheckReport check_width_inequality(const OdaafConfig& cfg) {
  CheckReport report{"widths " + describe(cfg), {}};
  for (int m = 1; m <= last_feasible_phase(cfg.horizon); ++m) {
    const std::int64_t n = schedule_nm(cfg, m).value();
    const double width = confidence_width(cfg, m, n);
    const double half_tol = phase_tolerance(m) / 2.0;
    CheckItem item;
    item.label = "m=" + std::to_string(m);
    item.margin = half_tol - width;
    item.passed = width <= half_tol;
    item.detail = {{"n_m", n}, {"w_m", width}, {"half_tolerance", half_tol}};
    report.items.push_back(std::move(item));
  }
  return report;
}

/// n_m >= 2 n_{m-1} up to floor(log2(T/4)/2), and n_m - n_{m-1} >= d whenever
/// the bounded schedule's d-branch sets n_m.
inline CheckReport check_schedule_facts(const OdaafConfig& cfg) {
  CheckReport report{"schedule " + describe(cfg), {}};
  const int last = std::min(last_doubling_phase(cfg.horizon), last_feasible_phase(cfg.horizon));
  std::int64_t previous = 0;
  for (int m = 1; m <= last; ++m) {
    const std::int64_t n = schedule_nm(cfg, m).value();
    if (m >= 2) {
      CheckItem item;
      item.label = "doubling m=" + std::to_string(m);
      item.margin = static_cast<double>(n - 2 * previous);
      item.passed = n >= 2 * previous;
      item.detail = {{"n_m", n}, {"n_prev", previous}};
      report.items.push_back(std::move(item));
    }
    if (bounded_delay_branch_binds(cfg, m) && m * *cfg.delay_bound == n) {
      CheckItem item;
      item.label = "block>=d m=" + std::to_string(m);
      item.margin = static_cast<double>(n - previous - *cfg.delay_bound);
      item.passed = n - previous >= *cfg.delay_bound;
      item.detail = {{"nu_m", n - previous}, {"d", *cfg.delay_bound}};
      report.items.push_back(std::move(item));
    }
    previous = n;
  }
  if (report.items.empty()) {
    report.items.push_back({"vacuous (at most one phase in range)", true, false, 0.0,
                            {{"last_phase", last}}});
  }
  return report;
}

/// Runs `reps` replications of ODAAF and returns each one's phase trace.
inline std::vector<PhaseTrace> collect_traces(const BanditInstance& instance, const PolicySpec& spec,
                                              std::int64_t reps, std::uint64_t seed,
                                              unsigned workers) {
  if (spec.type != PolicyType::odaaf) throw ConfigError("validation checks need an ODAAF policy");
  const OdaafConfig cfg = spec.odaaf_config(instance);
  std::vector<PhaseTrace> traces(static_cast<std::size_t>(reps));
  detail::parallel_for(traces.size(), std::max(1u, workers), [&](std::size_t r) {
    OdaafPolicy policy(cfg, instance.arms());
    run_replication(policy, instance, replication_seed(seed, r), instance.horizon());
    traces[r] = policy.trace();
  });
  return traces;
}

/// Mean corruption of phase estimates: for every (phase m, arm j) reached in
/// at least 100 replications, |mean X-bar_{m,j} - mu_j| <= m E[tau] / n_m
/// plus 4 standard errors. Cells with fewer samples are reported inconclusive.
inline CheckReport check_corruption_bound(const BanditInstance& instance, const PolicySpec& spec,
                                          std::int64_t reps, std::uint64_t seed,
                                          unsigned workers = 1) {
  if (reps < 1000) throw ConfigError("corruption check needs at least 1000 replications");
  const OdaafConfig cfg = spec.odaaf_config(instance);
  const double true_mean_delay = instance.delay().mean();
  const auto traces = collect_traces(instance, spec, reps, seed, workers);

  struct Cell {
    std::int64_t n_m = 0;
    std::vector<double> estimates;
  };
  std::map<std::pair<int, std::size_t>, Cell> cells;
  for (const PhaseTrace& trace : traces) {
    for (const PhaseRecord& phase : trace.phases) {
      if (!phase.completed) continue;
      for (const ArmEstimate& e : phase.estimates) {
        Cell& cell = cells[{phase.phase, e.arm}];
        cell.n_m = phase.target;
        cell.estimates.push_back(e.mean);
      }
    }
  }

  CheckReport report{"corruption " + describe(cfg) + " delay=" + instance.delay().describe(), {}};
  for (const auto& [key, cell] : cells) {
    const auto [m, arm] = key;
    CheckItem item;
    item.label = "m=" + std::to_string(m) + " arm=" + std::to_string(arm);
    const auto count = static_cast<double>(cell.estimates.size());
    double sum = 0.0;
    for (double x : cell.estimates) sum += x;
    const double mean = sum / count;
    double sq = 0.0;
    for (double x : cell.estimates) sq += (x - mean) * (x - mean);
    const double std_error = count > 1 ? std::sqrt(sq / (count - 1.0) / count) : 0.0;
    const double bias = mean - instance.mean(arm);
    const double bound = m * true_mean_delay / static_cast<double>(cell.n_m);
    item.detail = {{"samples", cell.estimates.size()}, {"n_m", cell.n_m}, {"bias", bias},
                   {"bound", bound}, {"std_error", std_error}};
    if (cell.estimates.size() < 100) {
      item.inconclusive = true;
      item.passed = true;
    } else {
      item.margin = bound + 4.0 * std_error - std::abs(bias);
      item.passed = item.margin >= 0.0;
    }
    report.items.push_back(std::move(item));
  }
  return report;
}

/// First phase whose tolerance is below gap / 2.
inline int expected_elimination_phase(double gap) {
  if (!(gap > 0.0)) throw DomainError("elimination phase needs a positive gap");
  int m = 1;
  while (!(phase_tolerance(m) < gap / 2.0)) ++m;
  return m;
}

/// Two-arm check: the suboptimal arm is gone by phase m_j in >= 95% of runs
/// and the optimal arm is never eliminated in >= 99% of runs.
inline CheckReport check_elimination_timing(const BanditInstance& instance, const PolicySpec& spec,
                                            std::int64_t reps, std::uint64_t seed,
                                            unsigned workers = 1) {
  if (instance.arms() != 2) throw ConfigError("elimination timing check needs a two-arm instance");
  const std::size_t best = instance.best_arm();
  const std::size_t worst = 1 - best;
  const double gap = instance.gap(worst);
  const int due = expected_elimination_phase(gap);
  const auto traces = collect_traces(instance, spec, reps, seed, workers);

  std::int64_t on_time = 0;
  std::int64_t best_kept = 0;
  std::map<int, std::int64_t> histogram;
  for (const PhaseTrace& trace : traces) {
    const auto phase = trace.elimination_phase(worst);
    histogram[phase.value_or(0)] += 1;
    if (phase && *phase <= due) ++on_time;
    if (!trace.elimination_phase(best)) ++best_kept;
  }
  const double n = static_cast<double>(reps);
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [phase, count] : histogram)
    hist[phase == 0 ? std::string("never") : std::to_string(phase)] = count;

  CheckReport report{"elimination " + describe(spec.odaaf_config(instance)) +
                         " delay=" + instance.delay().describe(),
                     {}};
  CheckItem timely;
  timely.label = "suboptimal arm eliminated by phase " + std::to_string(due);
  timely.margin = on_time / n - 0.95;
  timely.passed = timely.margin >= 0.0;
  timely.detail = {{"fraction", on_time / n}, {"due_phase", due}, {"histogram", hist}};
  report.items.push_back(std::move(timely));

  CheckItem kept;
  kept.label = "optimal arm never eliminated";
  kept.margin = best_kept / n - 0.99;
  kept.passed = kept.margin >= 0.0;
  kept.detail = {{"fraction", best_kept / n}};
  report.items.push_back(std::move(kept));
  return report;
}

}  // namespace daaf
