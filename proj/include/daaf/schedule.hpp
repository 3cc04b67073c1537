#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "daaf/bandit.hpp"
#include "daaf/errors.hpp"

namespace daaf {

/// Which delay knowledge ODAAF uses to size its phases.
enum class OdaafVariant {
  known_expectation,  // E[tau] only
  bounded,            // E[tau] and a bound d on the delay
  variance,           // E[tau] and V(tau)
  naive_bounded,      // bound d only, Hoeffding plus worst-case leakage
};

inline std::string_view to_string(OdaafVariant v) {
  switch (v) {
    case OdaafVariant::known_expectation: return "known-expectation";
    case OdaafVariant::bounded: return "bounded";
    case OdaafVariant::variance: return "variance";
    case OdaafVariant::naive_bounded: return "naive-bounded";
  }
  return "unknown";
}

inline OdaafVariant parse_odaaf_variant(std::string_view name) {
  for (auto v : {OdaafVariant::known_expectation, OdaafVariant::bounded, OdaafVariant::variance,
                 OdaafVariant::naive_bounded}) {
    if (to_string(v) == name) return v;
  }
  throw ConfigError("unknown ODAAF variant '" + std::string(name) + "'");
}

enum class BridgeArmRule { leader, lowest_index };

struct OdaafConfig {
  OdaafVariant variant = OdaafVariant::known_expectation;
  std::int64_t horizon = 0;
  /// E[tau], or any upper bound on it.
  double mean_delay = 0.0;
  /// d; required by bounded and naive-bounded.
  std::optional<std::int64_t> delay_bound;
  /// V(tau) or an upper bound; required by variance.
  std::optional<double> delay_variance;
  /// Use V(tau)/E[tau] in place of V(tau) when E[tau] >= 1 (variance variant).
  bool use_variance_over_mean = false;
  /// Unset means the variant default: off for known-expectation and naive-bounded.
  std::optional<bool> bridge;
  BridgeArmRule bridge_arm = BridgeArmRule::leader;

  bool bridge_enabled() const {
    if (bridge) return *bridge;
    return variant == OdaafVariant::bounded || variant == OdaafVariant::variance;
  }

  /// Variance term that enters the variance schedule and width.
  double effective_variance() const {
    const double v = delay_variance.value_or(0.0);
    if (use_variance_over_mean && mean_delay >= 1.0) return v / mean_delay;
    return v;
  }

  void validate() const {
    if (horizon < 1) throw ConfigError("ODAAF horizon must be positive");
    if (!(mean_delay >= 0.0) || !std::isfinite(mean_delay))
      throw ConfigError("ODAAF mean delay must be finite and >= 0");
    const bool needs_bound =
        variant == OdaafVariant::bounded || variant == OdaafVariant::naive_bounded;
    if (needs_bound && !delay_bound)
      throw ConfigError(std::string(to_string(variant)) + " ODAAF requires a delay bound");
    if (delay_bound && *delay_bound < 0) throw ConfigError("delay bound must be >= 0");
    if (variant == OdaafVariant::variance && !delay_variance)
      throw ConfigError("variance ODAAF requires the delay variance");
    if (delay_variance && (!(*delay_variance >= 0.0) || !std::isfinite(*delay_variance)))
      throw ConfigError("delay variance must be finite and >= 0");
  }
};

/// Config whose delay knowledge is the exact moments of the instance's delay.
inline OdaafConfig make_odaaf_config(OdaafVariant variant, const BanditInstance& instance) {
  const DelayMoments moments = instance.delay().moments();
  OdaafConfig cfg;
  cfg.variant = variant;
  cfg.horizon = instance.horizon();
  cfg.mean_delay = moments.mean;
  cfg.delay_bound = moments.bound;
  cfg.delay_variance = moments.variance;
  return cfg;
}

/// Tolerance 2^-m after m - 1 halvings of 1/2.
inline double phase_tolerance(int m) { return std::ldexp(1.0, -m); }

/// log(T * tol_m^2), the confidence level term of phase m.
inline double phase_log_term(std::int64_t horizon, int m) {
  const double tol = phase_tolerance(m);
  return std::log(static_cast<double>(horizon) * tol * tol);
}

/// Largest m with T * 4^-m > 1, i.e. the last phase with a defined schedule.
inline int last_feasible_phase(std::int64_t horizon) {
  int m = 0;
  while (static_cast<double>(horizon) * phase_tolerance(m + 1) * phase_tolerance(m + 1) > 1.0) ++m;
  return m;
}

/// floor(log2(T/4) / 2): the range over which n_m >= 2 n_{m-1} is guaranteed.
inline int last_doubling_phase(std::int64_t horizon) {
  if (horizon < 4) return 0;
  return static_cast<int>(std::floor(0.5 * std::log2(static_cast<double>(horizon) / 4.0)));
}

namespace detail {

// ceil( (sqrt(a L) + sqrt(a L + b tol L + extra))^2 / (c tol^2) )
inline std::int64_t ceil_schedule(double log_term, double tol, double a, double b, double c,
                                  double extra) {
  const double lhs = std::sqrt(a * log_term);
  const double rhs = std::sqrt(a * log_term + b * tol * log_term + extra);
  const double value = (lhs + rhs) * (lhs + rhs) / (c * tol * tol);
  return static_cast<std::int64_t>(std::ceil(value));
}

// Expected-delay schedule: the 6 tol m E[tau] form.
inline std::int64_t known_expectation_nm(double log_term, double tol, int m, double mean_delay) {
  return ceil_schedule(log_term, tol, 2.0, 8.0 / 3.0, 1.0, 6.0 * tol * m * mean_delay);
}

}  // namespace detail

/// Cumulative per-arm sample target n_m for phase m >= 1.
///
/// Returns nullopt once T * tol_m^2 <= 1: the phase schedule is exhausted and
/// the caller should commit to its current best arm.
inline std::optional<std::int64_t> schedule_nm(const OdaafConfig& cfg, int m) {
  if (m < 1) throw UsageError("phase index starts at 1");
  const double tol = phase_tolerance(m);
  const double log_term = phase_log_term(cfg.horizon, m);
  if (!(log_term > 0.0)) return std::nullopt;

  switch (cfg.variant) {
    case OdaafVariant::known_expectation:
      return detail::known_expectation_nm(log_term, tol, m, cfg.mean_delay);
    case OdaafVariant::bounded: {
      const std::int64_t general = detail::known_expectation_nm(log_term, tol, m, cfg.mean_delay);
      // m * min{d, general / m} == min{m d, general}
      const std::int64_t delay_branch = std::min<std::int64_t>(m * cfg.delay_bound.value(), general);
      const std::int64_t base =
          detail::ceil_schedule(log_term, tol, 2.0, 8.0 / 3.0, 1.0, 4.0 * tol * cfg.mean_delay);
      return std::max(delay_branch, base);
    }
    case OdaafVariant::variance:
      return detail::ceil_schedule(log_term, tol, 2.0, 8.0 / 3.0, 1.0,
                                   4.0 * tol * (cfg.mean_delay + 2.0 * cfg.effective_variance()));
    case OdaafVariant::naive_bounded:
      return detail::ceil_schedule(log_term, tol, 1.0, 0.0, 2.0,
                                   4.0 * tol * m * static_cast<double>(cfg.delay_bound.value()));
  }
  return std::nullopt;
}

/// True when the bounded schedule's m * d~_m branch sets n_m with d~_m = d.
inline bool bounded_delay_branch_binds(const OdaafConfig& cfg, int m) {
  if (cfg.variant != OdaafVariant::bounded) return false;
  const double tol = phase_tolerance(m);
  const double log_term = phase_log_term(cfg.horizon, m);
  if (!(log_term > 0.0)) return false;
  const std::int64_t general = detail::known_expectation_nm(log_term, tol, m, cfg.mean_delay);
  const std::int64_t base =
      detail::ceil_schedule(log_term, tol, 2.0, 8.0 / 3.0, 1.0, 4.0 * tol * cfg.mean_delay);
  const std::int64_t md = m * cfg.delay_bound.value();
  return md <= general && md >= base;
}

}  // namespace daaf
