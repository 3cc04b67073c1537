#include <cmath>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "daaf/output.hpp"

namespace fs = std::filesystem;

namespace {

daaf::ExperimentSummary run_small() {
  daaf::ExperimentConfig cfg;
  cfg.arm_means = {0.5, 0.6};
  cfg.delay = daaf::DelayModel::uniform_int(10);
  cfg.horizon = 3000;
  cfg.replications = 3;
  cfg.master_seed = 5;
  cfg.workers = 1;
  cfg.policies = {daaf::PolicySpec::odaaf("ODAAF, \"known\"", daaf::OdaafVariant::known_expectation),
                  daaf::PolicySpec::baseline("QPM-D", daaf::PolicyType::qpmd)};
  return daaf::run_experiment(cfg);
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("daaf_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Csv, QuotingAndParsing) {
  EXPECT_EQ(daaf::csv::quote("plain"), "plain");
  EXPECT_EQ(daaf::csv::quote("a,b"), "\"a,b\"");
  EXPECT_EQ(daaf::csv::quote("say \"hi\""), "\"say \"\"hi\"\"\"");
  const auto rows = daaf::csv::parse("a,\"b,c\",\"d\"\"e\"\r\n1,,3\r\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"a", "b,c", "d\"e"}));
  EXPECT_EQ(rows[1], (std::vector<std::string>{"1", "", "3"}));
  EXPECT_THROW(daaf::csv::parse("\"open"), daaf::IoError);
  EXPECT_THROW(daaf::csv::parse_double("1.5x"), daaf::IoError);
}

TEST(Csv, DoublesRoundTripExactly) {
  for (double v : {0.1, 1.0 / 3.0, 12345.678901234567, 1e-300, 0.0}) {
    EXPECT_EQ(daaf::csv::parse_double(daaf::csv::format_double(v)), v);
  }
}

TEST(WriteOutputs, SummaryRoundTrip) {
  const auto summary = run_small();
  const fs::path dir = scratch("roundtrip");
  daaf::write_outputs(summary, dir);
  const auto parsed = daaf::parse_summary_csv(daaf::read_text_file(dir / "summary.csv"));
  ASSERT_EQ(parsed.size(), summary.policies.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    EXPECT_EQ(parsed[i].name, summary.policies[i].name);
    ASSERT_EQ(parsed[i].t, summary.policies[i].t);
    for (std::size_t k = 0; k < parsed[i].mean.size(); ++k) {
      EXPECT_NEAR(parsed[i].mean[k], summary.policies[i].mean[k], 1e-12);
      EXPECT_NEAR(parsed[i].std_error[k], summary.policies[i].std_error[k], 1e-12);
    }
  }

  const auto rows = daaf::csv::parse(daaf::read_text_file(dir / "trajectories.csv"));
  EXPECT_EQ(rows[0], (std::vector<std::string>{"policy", "replication", "t", "cum_regret"}));
  std::size_t row = 1;
  for (const auto& p : summary.policies) {
    for (std::size_t r = 0; r < p.trajectories.size(); ++r) {
      for (const auto& c : p.trajectories[r].checkpoints) {
        ASSERT_LT(row, rows.size());
        EXPECT_EQ(rows[row][0], p.name);
        EXPECT_EQ(daaf::csv::parse_int(rows[row][1]), static_cast<std::int64_t>(r));
        EXPECT_EQ(daaf::csv::parse_int(rows[row][2]), c.t);
        EXPECT_NEAR(daaf::csv::parse_double(rows[row][3]), c.regret, 1e-12);
        ++row;
      }
    }
  }
  EXPECT_EQ(row, rows.size());
  fs::remove_all(dir);
}

TEST(WriteOutputs, RatiosHaveOneRowPerCheckpointPerPair) {
  const auto summary = run_small();
  const fs::path dir = scratch("ratios");
  const auto files = daaf::write_outputs(summary, dir);
  for (const char* name : {"trajectories.csv", "summary.csv", "ratios.csv", "plot.svg",
                           "ratio_0.svg", "metadata.json"}) {
    EXPECT_TRUE(fs::exists(dir / name)) << name;
  }
  const auto rows = daaf::csv::parse(daaf::read_text_file(dir / "ratios.csv"));
  EXPECT_EQ(rows[0], (std::vector<std::string>{"numerator", "denominator", "t", "ratio"}));
  std::size_t expected = 0;
  for (const auto& r : summary.ratios) expected += r.points.size();
  EXPECT_EQ(rows.size(), expected + 1);
  EXPECT_EQ(summary.ratios.size(), 1u);
  EXPECT_EQ(summary.ratios[0].points.size(), summary.policies[0].t.size());
  const std::string svg = daaf::read_text_file(dir / "plot.svg");
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("&quot;known&quot;"), std::string::npos);
  fs::remove_all(dir);
}

TEST(WriteOutputs, EmptyPolicyListGivesHeaderOnlyCsv) {
  daaf::ExperimentConfig cfg;
  cfg.arm_means = {0.5, 0.6};
  cfg.horizon = 100;
  const auto summary = daaf::run_experiment(cfg);
  const fs::path dir = scratch("empty");
  daaf::write_outputs(summary, dir);
  EXPECT_EQ(daaf::read_text_file(dir / "trajectories.csv"), "policy,replication,t,cum_regret\r\n");
  EXPECT_EQ(daaf::read_text_file(dir / "summary.csv"), "policy,t,mean,stderr\r\n");
  EXPECT_EQ(daaf::read_text_file(dir / "ratios.csv"), "numerator,denominator,t,ratio\r\n");
  EXPECT_TRUE(daaf::parse_summary_csv(daaf::read_text_file(dir / "summary.csv")).empty());
  fs::remove_all(dir);
}

TEST(WriteOutputs, UnwritableDirectory) {
  const auto summary = run_small();
  EXPECT_THROW(daaf::write_outputs(summary, "/proc/daaf_cannot_write_here"), daaf::IoError);
}

TEST(WriteSweep, CsvSchema) {
  daaf::SweepResult sweep;
  sweep.rows = {{"ODAAF", 0, 8.5, 100, 2, 1.0}, {"ODAAF", 25, 25.7, 150, 3, 1.5}};
  const fs::path dir = scratch("sweep");
  daaf::write_sweep_outputs(sweep, dir);
  const auto rows = daaf::csv::parse(daaf::read_text_file(dir / "sweep.csv"));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"policy", "location", "mean_delay", "final_mean",
                                               "final_stderr", "ratio"}));
  EXPECT_EQ(rows[2][5], "1.5");
  EXPECT_TRUE(fs::exists(dir / "sweep.svg"));
  fs::remove_all(dir);
}
