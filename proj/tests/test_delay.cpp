#include <cmath>
#include <cstdint>

#include <gtest/gtest.h>

#include "daaf/delay.hpp"
#include "daaf/errors.hpp"
#include "daaf/rng.hpp"

using daaf::DelayKind;
using daaf::DelayModel;

namespace {

// Monte-Carlo mean and variance of n samples.
std::pair<double, double> sample_moments(const DelayModel& model, int n, std::uint64_t seed) {
  daaf::Rng rng(seed);
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(model.sample(rng));
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  return {mean, sq / n - mean * mean};
}

}  // namespace

TEST(DelayMoments, ConstantFifty) {
  const auto m = DelayModel::constant(50).moments();
  EXPECT_EQ(m.mean, 50.0);
  EXPECT_EQ(m.variance, 0.0);
  ASSERT_TRUE(m.bound.has_value());
  EXPECT_EQ(*m.bound, 50);
}

TEST(DelayMoments, UniformHundred) {
  const auto m = DelayModel::uniform_int(100).moments();
  EXPECT_EQ(m.mean, 50.0);
  EXPECT_EQ(m.variance, 850.0);
  EXPECT_EQ(m.bound.value(), 100);
}

TEST(DelayMoments, GeometricClosedForm) {
  const auto m = DelayModel::geometric(0.2).moments();
  EXPECT_NEAR(m.mean, 0.8 / 0.2, 1e-12);
  EXPECT_NEAR(m.variance, 0.8 / 0.04, 1e-12);
  EXPECT_FALSE(m.bound.has_value());
}

// ceil(Exp(rate)) is geometric on {1, 2, ...} with q = exp(-rate).
TEST(DelayMoments, DiscretizedExponentialMatchesGeometricOracle) {
  for (double rate : {0.02, 0.5, 2.0}) {
    const double q = std::exp(-rate);
    const auto m = DelayModel::discretized_exponential(rate).moments();
    EXPECT_NEAR(m.mean, 1.0 / (1.0 - q), 1e-9 * (1.0 / (1.0 - q)));
    EXPECT_NEAR(m.variance, q / ((1.0 - q) * (1.0 - q)), 1e-8 * q / ((1.0 - q) * (1.0 - q)));
  }
}

// Frozen from a 40-digit summation of P(ceil(X) = k | X > 0), X ~ N(mu, 10^2).
TEST(DelayMoments, TruncatedNormalMatchesHighPrecisionSum) {
  struct Case {
    double mu, mean, variance;
  };
  for (const Case& c : {Case{0, 8.485495755000889, 36.31519088019612},
                        Case{25, 25.676525108165802, 95.63536951315577},
                        Case{50, 50.50001487953942, 100.08258873852643},
                        Case{100, 100.5, 100.08333333333333}}) {
    const auto m = DelayModel::discretized_truncated_normal(c.mu, 10).moments();
    EXPECT_NEAR(m.mean, c.mean, 1e-9) << "mu=" << c.mu;
    EXPECT_NEAR(m.variance, c.variance, 1e-7) << "mu=" << c.mu;
  }
}

TEST(DelayMoments, HalfNormalPreset) {
  const auto m = DelayModel::discretized_truncated_normal(0, 62.6657).moments();
  EXPECT_NEAR(m.mean, 50.50105555947756, 1e-8);
  EXPECT_NEAR(m.variance, 1426.9677327613714, 1e-5);
}

TEST(DelaySampling, MonteCarloWithinThreeSigma) {
  const int n = 1'000'000;
  const DelayModel models[] = {DelayModel::constant(7),
                               DelayModel::uniform_int(100),
                               DelayModel::geometric(0.1),
                               DelayModel::discretized_exponential(0.05),
                               DelayModel::discretized_truncated_normal(0, 10),
                               DelayModel::discretized_truncated_normal(50, 10)};
  std::uint64_t seed = 11;
  for (const DelayModel& model : models) {
    const auto exact = model.moments();
    const auto [mean, var] = sample_moments(model, n, seed++);
    const double se = std::sqrt(exact.variance / n);
    EXPECT_LE(std::abs(mean - exact.mean), 3.0 * se + 1e-12) << model.describe();
    // Variance check is looser: its standard error depends on the fourth moment.
    EXPECT_NEAR(var, exact.variance, 0.02 * exact.variance + 1e-12) << model.describe();
  }
}

TEST(DelaySampling, SamplesRespectSupport) {
  daaf::Rng rng(3);
  const auto uniform = DelayModel::uniform_int(5);
  const auto normal = DelayModel::discretized_truncated_normal(-20, 10);
  const auto exponential = DelayModel::discretized_exponential(3.0);
  for (int i = 0; i < 20000; ++i) {
    const auto u = uniform.sample(rng);
    EXPECT_GE(u, 0);
    EXPECT_LE(u, 5);
    EXPECT_GE(normal.sample(rng), 1);
    EXPECT_GE(exponential.sample(rng), 1);
  }
}

TEST(DelaySampling, GeometricWithCertainSuccessIsZero) {
  daaf::Rng rng(5);
  const auto g = DelayModel::geometric(1.0);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(g.sample(rng), 0);
  EXPECT_EQ(g.mean(), 0.0);
}

TEST(DelayDistribution, ProbabilitiesSumToOneAndMatchTail) {
  const DelayModel models[] = {DelayModel::constant(3), DelayModel::uniform_int(10),
                               DelayModel::geometric(0.3),
                               DelayModel::discretized_exponential(0.4),
                               DelayModel::discretized_truncated_normal(5, 2)};
  for (const DelayModel& model : models) {
    double cumulative = 0.0;
    for (std::int64_t k = 0; k <= 200; ++k) {
      cumulative += model.probability(k);
      EXPECT_NEAR(1.0 - cumulative, model.tail(k), 1e-12) << model.describe() << " k=" << k;
    }
    EXPECT_NEAR(cumulative, 1.0, 1e-12) << model.describe();
  }
}

TEST(DelayModelErrors, RejectsInvalidParameters) {
  EXPECT_THROW(DelayModel::constant(-1), daaf::ConfigError);
  EXPECT_THROW(DelayModel::uniform_int(-3), daaf::ConfigError);
  EXPECT_THROW(DelayModel::geometric(0.0), daaf::ConfigError);
  EXPECT_THROW(DelayModel::geometric(1.5), daaf::ConfigError);
  EXPECT_THROW(DelayModel::discretized_exponential(0.0), daaf::ConfigError);
  EXPECT_THROW(DelayModel::discretized_truncated_normal(0, 0), daaf::ConfigError);
  EXPECT_THROW(DelayModel::discretized_truncated_normal(-50, 10), daaf::ConfigError);
  EXPECT_THROW(daaf::parse_delay_kind("poisson"), daaf::ConfigError);
}

TEST(DelayModelNames, RoundTrip) {
  for (DelayKind kind : {DelayKind::constant, DelayKind::uniform_int, DelayKind::geometric,
                         DelayKind::discretized_exponential,
                         DelayKind::discretized_truncated_normal}) {
    EXPECT_EQ(daaf::parse_delay_kind(daaf::to_string(kind)), kind);
  }
}

TEST(DelayRelocation, MovesTheLocationParameter) {
  EXPECT_EQ(DelayModel::constant(3).relocated(40), DelayModel::constant(40));
  EXPECT_EQ(DelayModel::uniform_int(100).relocated(25).mean(), 25.0);
  EXPECT_NEAR(DelayModel::geometric(0.5).relocated(50).mean(), 50.0, 1e-9);
  EXPECT_NEAR(DelayModel::discretized_exponential(1).relocated(50).first_parameter(), 0.02, 1e-15);
  EXPECT_THROW(DelayModel::discretized_exponential(1).relocated(0), daaf::ConfigError);
  const auto n = DelayModel::discretized_truncated_normal(0, 10).relocated(100);
  EXPECT_EQ(n.first_parameter(), 100.0);
  EXPECT_EQ(n.second_parameter(), 10.0);
}
