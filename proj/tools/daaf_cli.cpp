// daaf: run, validate, sweep and plot delayed anonymous feedback bandit
// experiments.
//
// Exit codes: 0 success, 1 a validation assertion failed, 2 bad usage or
// configuration, 3 I/O failure.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "daaf/daaf.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kAssertionFailed = 1;
constexpr int kConfigError = 2;
constexpr int kIoError = 3;

struct CommonOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
};

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("DAAF_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  const std::string text(raw);
  std::uint64_t value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size())
    throw daaf::ConfigError("DAAF_SEED must be a non-negative integer, got '" + text + "'");
  return value;
}

/// Loads the config and applies overrides: --seed beats DAAF_SEED beats the
/// file; --out beats output_dir, which defaults to "out".
daaf::CliConfig load(const CommonOptions& opt) {
  daaf::CliConfig cfg = daaf::load_config(opt.config);
  daaf::ExperimentConfig& e = cfg.experiment;
  if (opt.seed) {
    e.master_seed = *opt.seed;
  } else if (auto s = env_seed()) {
    e.master_seed = *s;
  }
  if (opt.workers) e.workers = *opt.workers;
  if (!opt.out.empty()) e.output_dir = opt.out;
  if (e.output_dir.empty()) e.output_dir = "out";
  return cfg;
}

std::vector<double> parse_means(const std::string& list) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    std::size_t comma = list.find(',', start);
    if (comma == std::string::npos) comma = list.size();
    std::string item = list.substr(start, comma - start);
    while (!item.empty() && item.front() == ' ') item.erase(item.begin());
    while (!item.empty() && item.back() == ' ') item.pop_back();
    double value = 0.0;
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc() || end != item.data() + item.size())
      throw daaf::ConfigError("--means entries must be numbers, got '" + item + "'");
    out.push_back(value);
    start = comma + 1;
  }
  return out;
}

void print_written(const std::vector<fs::path>& files) {
  for (const fs::path& f : files) std::cout << "wrote " << f.string() << "\n";
}

int cmd_run(const CommonOptions& opt) {
  const daaf::CliConfig cfg = load(opt);
  const daaf::ExperimentConfig& e = cfg.experiment;
  std::cout << "running " << e.policies.size() << " policies x " << e.replications
            << " replications, T=" << e.horizon << ", seed " << e.master_seed << "\n";
  daaf::detail::ensure_writable_dir(e.output_dir);
  const daaf::ExperimentSummary summary = daaf::run_experiment(e);
  std::cout << "finished in " << summary.wall_seconds << " s\n";
  print_written(daaf::write_outputs(summary, e.output_dir));
  return kOk;
}

int cmd_sweep(const CommonOptions& opt, const std::string& means_flag) {
  daaf::CliConfig cfg = load(opt);
  std::vector<double> means = means_flag.empty() ? cfg.sweep_means : parse_means(means_flag);
  if (means.empty()) throw daaf::ConfigError("sweep needs --means or sweep.means in the config");
  const daaf::ExperimentConfig& e = cfg.experiment;
  std::cout << "sweeping " << means.size() << " delay locations, " << e.policies.size()
            << " policies x " << e.replications << " replications\n";
  daaf::detail::ensure_writable_dir(e.output_dir);
  const daaf::SweepResult sweep = daaf::mean_delay_sweep(e, means);
  print_written(daaf::write_sweep_outputs(sweep, e.output_dir));
  return kOk;
}

int cmd_validate(const std::string& suite, const std::string& report_path,
                 const std::optional<std::uint64_t>& seed_flag,
                 const std::optional<unsigned>& workers) {
  if (!daaf::is_suite_name(suite)) throw daaf::ConfigError("unknown validation suite '" + suite + "'");
  daaf::SuiteOptions opt;
  if (seed_flag) {
    opt.seed = *seed_flag;
  } else if (auto s = env_seed()) {
    opt.seed = *s;
  }
  opt.workers = workers.value_or(std::max(1u, std::thread::hardware_concurrency()));
  const fs::path report = report_path.empty() ? fs::path("validation-" + suite + ".json")
                                              : fs::path(report_path);
  std::cout << "validating suite '" << suite << "'\n";
  const auto reports = daaf::run_suite(suite, opt);
  std::size_t failed = 0;
  for (const daaf::CheckReport& r : reports) {
    if (!r.passed()) {
      ++failed;
      std::cout << "FAIL " << r.name << " (" << r.failures() << " items)\n";
    }
  }
  std::cout << reports.size() - failed << "/" << reports.size() << " checks passed\n";
  if (report.has_parent_path()) daaf::detail::ensure_writable_dir(report.parent_path().string());
  daaf::write_text_file(report, daaf::suite_report_json(suite, reports).dump(2) + "\n");
  std::cout << "wrote " << report.string() << "\n";
  return failed == 0 ? kOk : kAssertionFailed;
}

int cmd_plot(const std::string& summary_path, const std::string& out_path) {
  const auto policies = daaf::parse_summary_csv(daaf::read_text_file(summary_path));
  const fs::path out = out_path.empty() ? fs::path(summary_path).replace_filename("plot.svg")
                                        : fs::path(out_path);
  daaf::write_text_file(out, daaf::render_line_plot("Mean cumulative pseudo-regret", "round t",
                                                    "regret", daaf::regret_plot_series(policies)));
  std::cout << "wrote " << out.string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delayed, aggregated, anonymous feedback bandit experiments"};
  app.require_subcommand(1);

  CommonOptions run_opt;
  auto* run = app.add_subcommand("run", "Run an experiment and write CSV/SVG outputs");
  run->add_option("--config", run_opt.config, "Experiment JSON")->required();
  run->add_option("--out", run_opt.out, "Output directory (overrides output_dir)");
  run->add_option("--seed", run_opt.seed, "Master seed (overrides DAAF_SEED and the config)");
  run->add_option("--workers", run_opt.workers, "Worker threads, 0 = all cores");

  CommonOptions sweep_opt;
  std::string means;
  auto* sweep = app.add_subcommand("sweep", "Relative final regret across delay locations");
  sweep->add_option("--config", sweep_opt.config, "Experiment JSON")->required();
  sweep->add_option("--means", means, "Comma-separated delay locations, e.g. 0,25,50,100");
  sweep->add_option("--out", sweep_opt.out, "Output directory (overrides output_dir)");
  sweep->add_option("--seed", sweep_opt.seed, "Master seed");
  sweep->add_option("--workers", sweep_opt.workers, "Worker threads, 0 = all cores");

  std::string suite;
  std::string report;
  std::optional<std::uint64_t> validate_seed;
  std::optional<unsigned> validate_workers;
  auto* validate = app.add_subcommand("validate", "Run a validation suite and write a JSON report");
  validate->add_option("--suite", suite, "widths, corruption, elimination, schedule or all")
      ->required();
  validate->add_option("--report", report, "Report path (default validation-<suite>.json)");
  validate->add_option("--seed", validate_seed, "Master seed for Monte-Carlo suites");
  validate->add_option("--workers", validate_workers, "Worker threads");

  std::string summary_path;
  std::string plot_out;
  auto* plot = app.add_subcommand("plot", "Render plot.svg from a summary.csv");
  plot->add_option("--summary", summary_path, "summary.csv written by run")->required();
  plot->add_option("--out", plot_out, "SVG path (default: plot.svg next to the summary)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(run_opt);
    if (sweep->parsed()) return cmd_sweep(sweep_opt, means);
    if (validate->parsed()) return cmd_validate(suite, report, validate_seed, validate_workers);
    if (plot->parsed()) return cmd_plot(summary_path, plot_out);
  } catch (const daaf::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}
