#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "daaf/bandit.hpp"
#include "daaf/errors.hpp"
#include "daaf/policy.hpp"
#include "daaf/schedule.hpp"
#include "daaf/validation.hpp"

namespace daaf {

/// Knobs of the named validation suites.
struct SuiteOptions {
  std::uint64_t seed = 20180710;
  unsigned workers = 1;
  std::int64_t corruption_reps = 1000;
  std::int64_t corruption_horizon = 250000;
  std::int64_t elimination_reps = 200;
  std::int64_t elimination_horizon = 250000;
};

inline const std::vector<std::string_view>& suite_names() {
  static const std::vector<std::string_view> names = {"widths", "corruption", "elimination",
                                                      "schedule", "all"};
  return names;
}

inline bool is_suite_name(std::string_view name) {
  for (std::string_view s : suite_names()) {
    if (s == name) return true;
  }
  return false;
}

/// Every variant over T in {1e4, 250000}, E[tau] in {0, 5, 50}, d in {0, 100}
/// and V(tau) in {0, 850, 2500}; the variance variant with and without the
/// V/E replacement.
inline std::vector<OdaafConfig> schedule_grid() {
  std::vector<OdaafConfig> grid;
  for (std::int64_t horizon : {std::int64_t{10000}, std::int64_t{250000}}) {
    for (double mean : {0.0, 5.0, 50.0}) {
      OdaafConfig base;
      base.horizon = horizon;
      base.mean_delay = mean;

      OdaafConfig known = base;
      known.variant = OdaafVariant::known_expectation;
      grid.push_back(known);

      for (std::int64_t d : {std::int64_t{0}, std::int64_t{100}}) {
        OdaafConfig bounded = base;
        bounded.variant = OdaafVariant::bounded;
        bounded.delay_bound = d;
        grid.push_back(bounded);
      }
      for (double v : {0.0, 850.0, 2500.0}) {
        for (bool over_mean : {false, true}) {
          OdaafConfig var = base;
          var.variant = OdaafVariant::variance;
          var.delay_variance = v;
          var.use_variance_over_mean = over_mean;
          grid.push_back(var);
        }
      }
    }
    for (std::int64_t d : {std::int64_t{0}, std::int64_t{100}}) {
      OdaafConfig naive;
      naive.variant = OdaafVariant::naive_bounded;
      naive.horizon = horizon;
      naive.delay_bound = d;
      grid.push_back(naive);
    }
  }
  // Bounded schedules where the m * d branch can bind. Much larger bounds
  // (d = 5000 here) break doubling at m = 4, see the schedule tests.
  for (std::int64_t d : {std::int64_t{10}, std::int64_t{1200}}) {
    OdaafConfig bounded;
    bounded.variant = OdaafVariant::bounded;
    bounded.horizon = 250000;
    bounded.mean_delay = 50.0;
    bounded.delay_bound = d;
    grid.push_back(bounded);
  }
  return grid;
}

/// The two-arm Bernoulli instance mu = (0.5, 0.6).
inline BanditInstance reference_instance(DelayModel delay, std::int64_t horizon) {
  return BanditInstance({0.5, 0.6}, delay, horizon);
}

inline std::vector<CheckReport> run_suite(std::string_view name, const SuiteOptions& opt) {
  if (!is_suite_name(name)) throw ConfigError("unknown validation suite '" + std::string(name) + "'");
  const bool all = name == "all";
  std::vector<CheckReport> reports;
  if (all || name == "widths") {
    for (const OdaafConfig& cfg : schedule_grid()) reports.push_back(check_width_inequality(cfg));
  }
  if (all || name == "schedule") {
    for (const OdaafConfig& cfg : schedule_grid()) reports.push_back(check_schedule_facts(cfg));
  }
  if (all || name == "corruption") {
    const PolicySpec odaaf = PolicySpec::odaaf("ODAAF", OdaafVariant::known_expectation);
    reports.push_back(check_corruption_bound(
        reference_instance(DelayModel::uniform_int(100), opt.corruption_horizon), odaaf,
        opt.corruption_reps, opt.seed, opt.workers));
    reports.push_back(check_corruption_bound(
        reference_instance(DelayModel::constant(0), opt.corruption_horizon), odaaf,
        opt.corruption_reps, opt.seed + 1, opt.workers));
  }
  if (all || name == "elimination") {
    const PolicySpec odaaf = PolicySpec::odaaf("ODAAF", OdaafVariant::known_expectation);
    reports.push_back(check_elimination_timing(
        reference_instance(DelayModel::constant(50), opt.elimination_horizon), odaaf,
        opt.elimination_reps, opt.seed, opt.workers));
  }
  return reports;
}

inline nlohmann::json suite_report_json(std::string_view name, const std::vector<CheckReport>& reports) {
  nlohmann::json out;
  out["suite"] = std::string(name);
  bool passed = true;
  out["checks"] = nlohmann::json::array();
  for (const CheckReport& r : reports) {
    passed = passed && r.passed();
    out["checks"].push_back(r.to_json());
  }
  out["passed"] = passed;
  return out;
}

}  // namespace daaf
