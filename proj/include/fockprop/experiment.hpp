#pragma once

// Batch experiments behind the `fockprop` command line tool.
//
// A config is a JSON object with "schema": "fockprop-config/1", a "kind", and
// kind-specific fields. Every tolerance has a default and may be overridden
// under "tolerances", so a run is reproducible from its config alone.
// Reports are byte-identical for identical configs unless "record_timings"
// is set, in which case wall times are written as well.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fockprop/fock.hpp"
#include "fockprop/galerkin.hpp"
#include "fockprop/symbol.hpp"

namespace fockprop {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr const char* kConfigSchema = "fockprop-config/1";
inline constexpr std::size_t kDenseBudget = 20000;
inline constexpr double kNodeSoftCap = 1e6;
inline constexpr double kNodeHardCap = 5e7;

/// A schema violation, located by a JSON pointer such as "/probes/0/alpha".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class ExperimentKind { ccr_check, symbol_roundtrip, lower_bound, chernoff_sweep, galerkin_sweep, evolve };

struct Tolerances {
  double ccr = 1e-12;
  double roundtrip = 1e-12;
  double lower_bound = 1e-8;
  double contractivity = 1e-6;
  double ratio_min = 1.6;
  double ratio_max = 2.4;
  double slope_max = -0.8;
  double t_scaling_min = 2.5;
  double t_scaling_max = 6.0;
  double norm_oracle = 1e-8;
  double norm_chernoff = 1e-3;
};

struct ExperimentConfig {
  ExperimentKind kind{};
  std::string kind_name;
  nlohmann::json raw;  // echoed verbatim into the report

  std::optional<PolySymbol> symbol;
  int d = 1;
  int M = 8;
  int Q = 0;  // 0 selects M + 2
  double t = 0.5;
  std::vector<double> t_grid;
  std::vector<int> Ns;
  std::vector<int> flag;
  std::vector<ProbePair> probes;
  std::uint64_t seed = 0;

  // symbol-roundtrip and lower-bound
  int samples = 0;
  int max_degree = 0;
  int terms = 0;
  double grid_step = 0.02;
  int grid_angles = 180;

  // chernoff-sweep
  std::string reference = "oracle";  // or "harmonic-closed-form"
  std::optional<std::pair<int, int>> reduction_pair;  // error(second) <= error(first) / factor
  double reduction_factor = 4.0;
  bool check_halving = true;

  // galerkin-sweep
  std::vector<double> scaling_times;  // consecutive doublings checked against t_scaling window

  // evolve
  int reduced_modes = 0;  // n; 0 selects d
  QuantizationRoute route = QuantizationRoute::wick;
  EvolutionMethod method = EvolutionMethod::oracle;
  int slices = 64;
  std::optional<PhasePoint> initial_coherent;  // unset means vacuum

  Tolerances tolerances;
  bool record_timings = false;
  std::string report_name = "report.json";
  std::string table_name;       // CSV, kind-dependent default
  std::string table_json_name;  // JSON mirror of the table

  int quadrature_order() const { return Q > 0 ? Q : M + 2; }
};

/// Parses and validates a config document. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc);

struct Diagnostics {
  std::vector<std::string> errors;    // "<json pointer>: message"
  std::vector<std::string> warnings;
  std::size_t basis_size = 0;
  double node_count = 0.0;  // Q^(2d), for kinds that use quadrature
  bool over_budget = false;
};

/// Schema and budget diagnostics without executing anything.
Diagnostics validate_config(const nlohmann::json& doc);

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string comparison;  // "<=", ">=", "in [a,b]", ...
};

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::filesystem::path> cache_dir;
};

struct RunReport {
  std::vector<Check> checks;
  nlohmann::json document;  // what was written to the report file
  std::vector<std::filesystem::path> outputs;
  bool pass() const;
  std::vector<std::string> failing_checks() const;
};

/// Executes a validated config and writes its report and tables atomically.
/// Throws BudgetError when the dense or quadrature budget would be exceeded.
RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options);

/// Writes `contents` to `path` through a temporary file and a rename.
void write_atomically(const std::filesystem::path& path, const std::string& contents);

/// Entry point of the command line tool; returns the process exit status:
/// 0 all checks pass, 1 a numerical check failed, 2 config or usage error,
/// 3 budget exceeded.
int run_cli(int argc, char** argv);

}  // namespace fockprop
