#include <cmath>
#include <cstdint>

#include <gtest/gtest.h>

#include "daaf/schedule.hpp"

using daaf::OdaafConfig;
using daaf::OdaafVariant;

namespace {

// Direct transcription of the schedule formulas, kept separate from the
// library's shared helper so that both are checked against each other.
std::int64_t oracle_known(double T, int m, double E) {
  const double tol = std::pow(0.5, m);
  const double L = std::log(T * tol * tol);
  const double r = std::sqrt(2 * L) + std::sqrt(2 * L + (8.0 / 3.0) * tol * L + 6 * tol * m * E);
  return static_cast<std::int64_t>(std::ceil(r * r / (tol * tol)));
}

std::int64_t oracle_base(double T, int m, double extra_coef) {
  const double tol = std::pow(0.5, m);
  const double L = std::log(T * tol * tol);
  const double r = std::sqrt(2 * L) + std::sqrt(2 * L + (8.0 / 3.0) * tol * L + 4 * tol * extra_coef);
  return static_cast<std::int64_t>(std::ceil(r * r / (tol * tol)));
}

std::int64_t oracle_bounded(double T, int m, double E, std::int64_t d) {
  const std::int64_t general = oracle_known(T, m, E);
  const double d_tilde = std::min(static_cast<double>(d), static_cast<double>(general) / m);
  return std::max(static_cast<std::int64_t>(std::llround(m * d_tilde)), oracle_base(T, m, E));
}

std::int64_t oracle_naive(double T, int m, double d) {
  const double tol = std::pow(0.5, m);
  const double L = std::log(T * tol * tol);
  const double r = std::sqrt(L) + std::sqrt(L + 4 * tol * m * d);
  return static_cast<std::int64_t>(std::ceil(r * r / (2 * tol * tol)));
}

OdaafConfig config(OdaafVariant v, std::int64_t T, double E) {
  OdaafConfig cfg;
  cfg.variant = v;
  cfg.horizon = T;
  cfg.mean_delay = E;
  return cfg;
}

}  // namespace

TEST(Schedule, KnownExpectationReferenceValues) {
  EXPECT_EQ(daaf::schedule_nm(config(OdaafVariant::known_expectation, 250000, 50), 1), 1350);
  EXPECT_EQ(daaf::schedule_nm(config(OdaafVariant::known_expectation, 250000, 0), 1), 464);
  EXPECT_EQ(oracle_known(250000, 1, 50), 1350);
  EXPECT_EQ(oracle_known(250000, 1, 0), 464);
}

TEST(Schedule, NaiveBoundedReferenceValue) {
  OdaafConfig cfg = config(OdaafVariant::naive_bounded, 250000, 0);
  cfg.delay_bound = 100;
  EXPECT_EQ(daaf::schedule_nm(cfg, 1), 638);
  EXPECT_EQ(oracle_naive(250000, 1, 100), 638);
}

TEST(Schedule, MatchesOracleEverywhere) {
  for (std::int64_t T : {std::int64_t{100}, std::int64_t{10000}, std::int64_t{250000},
                         std::int64_t{10000000}}) {
    for (double E : {0.0, 5.0, 50.0, 120.5}) {
      for (int m = 1; m <= daaf::last_feasible_phase(T); ++m) {
        EXPECT_EQ(daaf::schedule_nm(config(OdaafVariant::known_expectation, T, E), m),
                  oracle_known(T, m, E));
        for (std::int64_t d : {std::int64_t{0}, std::int64_t{100}, std::int64_t{1200}}) {
          OdaafConfig b = config(OdaafVariant::bounded, T, E);
          b.delay_bound = d;
          EXPECT_EQ(daaf::schedule_nm(b, m), oracle_bounded(T, m, E, d)) << "T=" << T << " m=" << m;
          OdaafConfig n = config(OdaafVariant::naive_bounded, T, E);
          n.delay_bound = d;
          EXPECT_EQ(daaf::schedule_nm(n, m), oracle_naive(T, m, d));
        }
        for (double V : {0.0, 850.0, 2500.0}) {
          OdaafConfig v = config(OdaafVariant::variance, T, E);
          v.delay_variance = V;
          EXPECT_EQ(daaf::schedule_nm(v, m), oracle_base(T, m, E + 2 * V));
          v.use_variance_over_mean = true;
          const double eff = E >= 1.0 ? V / E : V;
          EXPECT_EQ(daaf::schedule_nm(v, m), oracle_base(T, m, E + 2 * eff));
        }
      }
    }
  }
}

TEST(Schedule, BoundedWithZeroBoundIsBaseTerm) {
  OdaafConfig b = config(OdaafVariant::bounded, 250000, 50);
  b.delay_bound = 0;
  for (int m = 1; m <= 8; ++m) EXPECT_EQ(daaf::schedule_nm(b, m), oracle_base(250000, m, 50));
}

TEST(Schedule, ExhaustsWhenToleranceTooSmall) {
  const OdaafConfig cfg = config(OdaafVariant::known_expectation, 250000, 50);
  EXPECT_EQ(daaf::last_feasible_phase(250000), 8);  // 250000 / 4^8 = 3.8, / 4^9 < 1
  EXPECT_TRUE(daaf::schedule_nm(cfg, 8).has_value());
  EXPECT_FALSE(daaf::schedule_nm(cfg, 9).has_value());
  EXPECT_EQ(daaf::last_feasible_phase(4), 0);
  EXPECT_FALSE(daaf::schedule_nm(config(OdaafVariant::known_expectation, 4, 0), 1).has_value());
  EXPECT_EQ(daaf::last_doubling_phase(250000), 7);
  EXPECT_EQ(daaf::last_doubling_phase(10000), 5);
}

TEST(Schedule, BoundedDelayBranch) {
  OdaafConfig b = config(OdaafVariant::bounded, 250000, 50);
  b.delay_bound = 1200;
  bool any = false;
  for (int m = 1; m <= daaf::last_feasible_phase(250000); ++m) {
    if (daaf::bounded_delay_branch_binds(b, m)) {
      any = true;
      EXPECT_EQ(daaf::schedule_nm(b, m), m * 1200);
    }
  }
  EXPECT_TRUE(any);
  b.delay_bound = 100;
  for (int m = 1; m <= 8; ++m) EXPECT_FALSE(daaf::bounded_delay_branch_binds(b, m));
}

// A bound far above the expected delay makes the bounded schedule linear in m
// for a while, so doubling is not a property of that variant in general.
TEST(Schedule, BoundedDoublingCounterexample) {
  OdaafConfig b = config(OdaafVariant::bounded, 250000, 50);
  b.delay_bound = 5000;
  EXPECT_EQ(daaf::schedule_nm(b, 3), 15000);
  EXPECT_EQ(daaf::schedule_nm(b, 4), 20491);
  EXPECT_LT(*daaf::schedule_nm(b, 4), 2 * *daaf::schedule_nm(b, 3));
}

TEST(OdaafConfig, Validation) {
  OdaafConfig b = config(OdaafVariant::bounded, 1000, 5);
  EXPECT_THROW(b.validate(), daaf::ConfigError);
  b.delay_bound = -1;
  EXPECT_THROW(b.validate(), daaf::ConfigError);
  OdaafConfig v = config(OdaafVariant::variance, 1000, 5);
  EXPECT_THROW(v.validate(), daaf::ConfigError);
  EXPECT_THROW(config(OdaafVariant::known_expectation, 0, 5).validate(), daaf::ConfigError);
  EXPECT_THROW(config(OdaafVariant::known_expectation, 10, -1).validate(), daaf::ConfigError);
  EXPECT_THROW(daaf::parse_odaaf_variant("fast"), daaf::ConfigError);
  EXPECT_EQ(daaf::parse_odaaf_variant("naive-bounded"), OdaafVariant::naive_bounded);
}

TEST(OdaafConfig, BridgeDefaults) {
  EXPECT_FALSE(config(OdaafVariant::known_expectation, 10, 0).bridge_enabled());
  EXPECT_TRUE(config(OdaafVariant::bounded, 10, 0).bridge_enabled());
  EXPECT_TRUE(config(OdaafVariant::variance, 10, 0).bridge_enabled());
  EXPECT_FALSE(config(OdaafVariant::naive_bounded, 10, 0).bridge_enabled());
  OdaafConfig c = config(OdaafVariant::known_expectation, 10, 0);
  c.bridge = true;
  EXPECT_TRUE(c.bridge_enabled());
}
