#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "fockprop/errors.hpp"
#include "fockprop/experiment.hpp"
#include "fockprop/parallel.hpp"

namespace fockprop {

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;

/// Reads and parses a config file; reports problems on stderr.
std::optional<nlohmann::json> load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot read config file '" << path << "'\n";
    return std::nullopt;
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "error: " << path << " is not valid JSON: " << e.what() << "\n";
    return std::nullopt;
  }
}

int validate_command(const std::string& path) {
  const auto doc = load_config(path);
  if (!doc) return kExitConfig;
  const Diagnostics diagnostics = validate_config(*doc);
  std::cout << "basis_size: " << diagnostics.basis_size << "\n";
  std::cout << "node_count: " << static_cast<unsigned long long>(diagnostics.node_count) << "\n";
  for (const std::string& w : diagnostics.warnings) std::cout << "warning: " << w << "\n";
  for (const std::string& e : diagnostics.errors) std::cerr << "error: " << e << "\n";
  if (diagnostics.over_budget) return kExitBudget;
  if (!diagnostics.errors.empty()) return kExitConfig;
  std::cout << "ok\n";
  return kExitPass;
}

int run_command(const std::string& path, const RunOptions& options) {
  const auto doc = load_config(path);
  if (!doc) return kExitConfig;
  try {
    const ExperimentConfig config = parse_config(*doc);
    const RunReport report = run_experiment(config, options);
    for (const Check& c : report.checks) {
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "\n";
    }
    if (!report.pass()) {
      // One machine-parseable line listing every failed check.
      std::cerr << nlohmann::json{{"failed_checks", report.failing_checks()}}.dump() << "\n";
      return kExitCheckFailed;
    }
    return kExitPass;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << " (estimate " << e.estimate() << ")\n";
    return kExitBudget;
  } catch (const TruncationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Anti-Wick quantization, Chernoff propagators and Galerkin sweeps on truncated Fock spaces"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker thread cap (0 = hardware concurrency)");

  std::string config_path;
  std::string out_dir = ".";
  std::string cache_dir;

  CLI::App* run = app.add_subcommand("run", "Run an experiment config and write its report");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out-dir", out_dir, "Directory for reports and tables");
  run->add_option("--cache-dir", cache_dir, "Operator cache directory (default: $FOCKPROP_CACHE_DIR)");
  run->add_option("--threads", threads, "Worker thread cap (0 = hardware concurrency)");

  CLI::App* validate = app.add_subcommand("validate", "Check a config and print size estimates");
  validate->add_option("config", config_path, "Experiment config (JSON)")->required();
  validate->add_option("--threads", threads, "Ignored; accepted for symmetry with run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    app.exit(e);
    return kExitConfig;
  }

  set_thread_count(threads);
  try {
    if (validate->parsed()) return validate_command(config_path);
    RunOptions options;
    options.out_dir = out_dir;
    if (!cache_dir.empty()) {
      options.cache_dir = cache_dir;
    } else if (const char* env = std::getenv("FOCKPROP_CACHE_DIR"); env && *env) {
      options.cache_dir = env;
    }
    return run_command(config_path, options);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
}

}  // namespace fockprop
