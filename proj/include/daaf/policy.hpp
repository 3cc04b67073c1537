#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "daaf/bandit.hpp"
#include "daaf/baselines.hpp"
#include "daaf/environment.hpp"
#include "daaf/odaaf.hpp"
#include "daaf/schedule.hpp"

namespace daaf {

/// Policy that only sees the aggregated anonymous observation X_t.
template <class P>
concept AnonymousPolicy = requires(P p, std::int64_t t, double x) {
  { p.select(t) } -> std::convertible_to<std::size_t>;
  p.observe(t, x);
};

/// Policy that sees each delivered reward together with its arm.
template <class P>
concept LabeledPolicy = requires(P p, std::int64_t t, std::span<const Arrival> arrivals) {
  { p.select(t) } -> std::convertible_to<std::size_t>;
  p.observe_labeled(t, arrivals);
};

enum class PolicyType { odaaf, ucb1, qpmd };

inline std::string_view to_string(PolicyType type) {
  switch (type) {
    case PolicyType::odaaf: return "odaaf";
    case PolicyType::ucb1: return "ucb1";
    case PolicyType::qpmd: return "qpmd";
  }
  return "unknown";
}

inline PolicyType parse_policy_type(std::string_view name) {
  for (auto type : {PolicyType::odaaf, PolicyType::ucb1, PolicyType::qpmd}) {
    if (to_string(type) == name) return type;
  }
  throw ConfigError("unknown policy type '" + std::string(name) + "'");
}

/// A named policy with its settings. ODAAF delay knowledge defaults to the
/// exact moments of the instance's delay; any field set here overrides it
/// (e.g. to run with an upper bound instead of the true value).
struct PolicySpec {
  std::string name;
  PolicyType type = PolicyType::odaaf;
  OdaafVariant variant = OdaafVariant::known_expectation;
  std::optional<double> mean_delay;
  std::optional<std::int64_t> delay_bound;
  std::optional<double> delay_variance;
  bool use_variance_over_mean = false;
  std::optional<bool> bridge;
  BridgeArmRule bridge_arm = BridgeArmRule::leader;

  static PolicySpec odaaf(std::string name, OdaafVariant variant) {
    PolicySpec spec;
    spec.name = std::move(name);
    spec.variant = variant;
    return spec;
  }
  static PolicySpec baseline(std::string name, PolicyType type) {
    PolicySpec spec;
    spec.name = std::move(name);
    spec.type = type;
    return spec;
  }

  OdaafConfig odaaf_config(const BanditInstance& instance) const {
    OdaafConfig cfg = make_odaaf_config(variant, instance);
    if (mean_delay) cfg.mean_delay = *mean_delay;
    if (delay_bound) cfg.delay_bound = *delay_bound;
    if (delay_variance) cfg.delay_variance = *delay_variance;
    cfg.use_variance_over_mean = use_variance_over_mean;
    cfg.bridge = bridge;
    cfg.bridge_arm = bridge_arm;
    cfg.validate();
    return cfg;
  }
};

using AnyPolicy = std::variant<OdaafPolicy, Ucb1Policy, QpmdPolicy>;

inline AnyPolicy make_policy(const PolicySpec& spec, const BanditInstance& instance) {
  switch (spec.type) {
    case PolicyType::odaaf:
      return OdaafPolicy(spec.odaaf_config(instance), instance.arms());
    case PolicyType::ucb1:
      return Ucb1Policy(instance.arms());
    case PolicyType::qpmd:
      return QpmdPolicy(instance.arms());
  }
  throw ConfigError("unknown policy type");
}

}  // namespace daaf
