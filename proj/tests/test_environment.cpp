#include <cstdint>
#include <vector>

#include <gtest/gtest.h>

#include "daaf/environment.hpp"
#include "daaf/errors.hpp"

using daaf::BanditInstance;
using daaf::DelayModel;
using daaf::Environment;

TEST(Environment, FreshState) {
  Environment env(BanditInstance({0.5, 0.6}, DelayModel::constant(0), 100), 7);
  EXPECT_EQ(env.clock(), 0);
  EXPECT_EQ(env.generated_total(), 0);
  EXPECT_EQ(env.observed_total(), 0);
  EXPECT_EQ(env.in_flight(), 0u);
}

TEST(Environment, ZeroDelayCertainReward) {
  Environment env(BanditInstance({0.2, 1.0}, DelayModel::constant(0), 100), 1);
  for (int t = 0; t < 50; ++t) EXPECT_EQ(env.step(1), 1.0);
}

TEST(Environment, ConstantDelayThree) {
  Environment env(BanditInstance({0.2, 1.0}, DelayModel::constant(3), 100), 1);
  EXPECT_EQ(env.step(1), 0.0);
  EXPECT_EQ(env.step(1), 0.0);
  EXPECT_EQ(env.step(1), 0.0);
  EXPECT_EQ(env.step(1), 1.0);
}

TEST(Environment, LabeledArrivals) {
  Environment zero(BanditInstance({0.5, 1.0}, DelayModel::constant(0), 10), 2);
  const auto now = zero.step_labeled(1);
  ASSERT_EQ(now.size(), 1u);
  EXPECT_EQ(now[0].arm, 1u);
  EXPECT_EQ(now[0].reward, 1.0);

  Environment two(BanditInstance({1.0, 0.5}, DelayModel::constant(2), 10), 2);
  EXPECT_TRUE(two.step_labeled(0).empty());
  EXPECT_TRUE(two.step_labeled(1).empty());
  const auto later = two.step_labeled(1);
  ASSERT_GE(later.size(), 1u);
  EXPECT_EQ(later[0].arm, 0u);
  EXPECT_EQ(later[0].reward, 1.0);
}

TEST(Environment, ArmOutOfRange) {
  Environment env(BanditInstance({0.5, 0.6}, DelayModel::constant(0), 10), 2);
  EXPECT_THROW(env.step(2), daaf::UsageError);
}

TEST(Environment, ReplayIsDeterministic) {
  const BanditInstance b({0.5, 0.6}, DelayModel::uniform_int(20), 2000);
  Environment a(b, 99);
  Environment c(b, 99);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t arm = (t * 7 + t / 3) % 2;
    ASSERT_EQ(a.step(arm), c.step(arm));
  }
}

// The anonymous sum of a round equals the labeled arrivals of the same round.
TEST(Environment, AggregatedMatchesLabeled) {
  for (const DelayModel& delay : {DelayModel::uniform_int(30), DelayModel::geometric(0.1),
                                  DelayModel::discretized_truncated_normal(5, 3)}) {
    const BanditInstance b({0.3, 0.5, 0.9}, delay, 5000);
    Environment anon(b, 4);
    Environment labeled(b, 4);
    for (int t = 0; t < 5000; ++t) {
      const std::size_t arm = (t / 5 + t % 3) % 3;
      const double x = anon.step(arm);
      double sum = 0.0;
      for (const daaf::Arrival& a : labeled.step_labeled(arm)) sum += a.reward;
      ASSERT_EQ(x, sum) << delay.describe() << " t=" << t;
    }
  }
}

// Brute-force bookkeeping oracle: replay the same draws with an explicit list
// of (due round, reward) pairs.
TEST(Environment, ConservationAgainstBruteForceReplay) {
  const BanditInstance b({0.5, 0.6}, DelayModel::uniform_int(100), 100000);
  Environment env(b, 21);
  daaf::Rng rng(21);
  std::vector<std::pair<std::int64_t, int>> pending;
  std::int64_t generated = 0;
  std::int64_t observed = 0;
  for (std::int64_t t = 1; t <= 100000; ++t) {
    const std::size_t arm = static_cast<std::size_t>((t * 2654435761u >> 7) % 2);
    const double x = env.step(arm);

    const int reward = std::bernoulli_distribution(b.mean(arm))(rng) ? 1 : 0;
    const std::int64_t due = t + b.delay().sample(rng);
    pending.emplace_back(due, reward);
    generated += reward;
    int arrived = 0;
    std::erase_if(pending, [&](const auto& p) {
      if (p.first != t) return false;
      arrived += p.second;
      return true;
    });
    observed += arrived;

    ASSERT_EQ(x, static_cast<double>(arrived)) << "t=" << t;
    ASSERT_EQ(env.generated_total(), generated);
    ASSERT_EQ(env.observed_total(), observed);
    ASSERT_EQ(env.generated_total(), env.observed_total() + env.pending_total());
  }
  EXPECT_EQ(env.pending_total(), env.pending_mass_scan());
}

TEST(RewardCalendar, GrowsForFarDeadlines) {
  daaf::RewardCalendar cal;
  cal.schedule(1000, {0, 1.0});
  cal.schedule(1, {1, 1.0});
  EXPECT_EQ(cal.in_flight(), 2u);
  EXPECT_GE(cal.capacity(), 1000u);
  EXPECT_EQ(cal.deliver().size(), 1u);
  for (int t = 2; t < 1000; ++t) EXPECT_TRUE(cal.deliver().empty());
  const auto last = cal.deliver();
  ASSERT_EQ(last.size(), 1u);
  EXPECT_EQ(last[0].arm, 0u);
  EXPECT_EQ(cal.in_flight(), 0u);
}
