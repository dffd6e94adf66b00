#include "fockprop/experiment.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "fockprop/benchmarks.hpp"
#include "fockprop/errors.hpp"
#include "fockprop/matrix_io.hpp"
#include "fockprop/propagator.hpp"
#include "fockprop/quadrature.hpp"
#include "fockprop/quantizer.hpp"
#include "fockprop/symbol_io.hpp"

namespace fockprop {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Field access with JSON-pointer diagnostics

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t index) { return path + "/" + std::to_string(index); }

const json* find(const json& object, const std::string& key) {
  auto it = object.find(key);
  return it == object.end() ? nullptr : &*it;
}

const json& require(const json& object, const std::string& key, const std::string& path) {
  const json* value = find(object, key);
  if (!value) throw ConfigError(child(path, key), "required field is missing");
  return *value;
}

int as_int(const json& value, const std::string& path, int lo, int hi) {
  if (!value.is_number_integer()) throw ConfigError(path, "expected an integer");
  const auto v = value.get<long long>();
  if (v < lo || v > hi) {
    throw ConfigError(path, "value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
  }
  return static_cast<int>(v);
}

double as_double(const json& value, const std::string& path) {
  if (!value.is_number()) throw ConfigError(path, "expected a number");
  const double v = value.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

bool as_bool(const json& value, const std::string& path) {
  if (!value.is_boolean()) throw ConfigError(path, "expected true or false");
  return value.get<bool>();
}

std::string as_string(const json& value, const std::string& path) {
  if (!value.is_string()) throw ConfigError(path, "expected a string");
  return value.get<std::string>();
}

void read_int(const json& doc, const std::string& key, int& out, int lo, int hi) {
  if (const json* v = find(doc, key)) out = as_int(*v, "/" + key, lo, hi);
}

void read_double(const json& doc, const std::string& key, double& out) {
  if (const json* v = find(doc, key)) out = as_double(*v, "/" + key);
}

/// A complex number is either a real number or a [re, im] pair.
Complex as_complex(const json& value, const std::string& path) {
  if (value.is_number()) return as_double(value, path);
  if (!value.is_array() || value.size() != 2) throw ConfigError(path, "expected a number or [re, im]");
  return {as_double(value[0], child(path, 0)), as_double(value[1], child(path, 1))};
}

PhasePoint as_point(const json& value, const std::string& path, int d) {
  if (!value.is_array()) throw ConfigError(path, "expected an array of complex numbers");
  if (static_cast<int>(value.size()) != d) {
    throw ConfigError(path, "expected " + std::to_string(d) + " components, got " + std::to_string(value.size()));
  }
  PhasePoint point;
  for (std::size_t i = 0; i < value.size(); ++i) point.push_back(as_complex(value[i], child(path, i)));
  return point;
}

std::vector<double> as_doubles(const json& value, const std::string& path) {
  if (!value.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < value.size(); ++i) out.push_back(as_double(value[i], child(path, i)));
  return out;
}

std::vector<int> as_ints(const json& value, const std::string& path, int lo, int hi) {
  if (!value.is_array()) throw ConfigError(path, "expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < value.size(); ++i) out.push_back(as_int(value[i], child(path, i), lo, hi));
  return out;
}

void require_strictly_ascending(const std::vector<int>& values, const std::string& path) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] <= values[i - 1]) throw ConfigError(child(path, i), "values must be strictly increasing");
  }
}

struct KindEntry {
  const char* name;
  ExperimentKind kind;
  const char* table;  // default CSV name; empty when the kind writes no table
};

constexpr KindEntry kKinds[] = {
    {"ccr-check", ExperimentKind::ccr_check, ""},
    {"symbol-roundtrip", ExperimentKind::symbol_roundtrip, ""},
    {"lower-bound", ExperimentKind::lower_bound, "lower_bound.csv"},
    {"chernoff-sweep", ExperimentKind::chernoff_sweep, "chernoff.csv"},
    {"galerkin-sweep", ExperimentKind::galerkin_sweep, "galerkin.csv"},
    {"evolve", ExperimentKind::evolve, "evolve.csv"},
};

bool uses_quadrature(const ExperimentConfig& c) {
  return c.kind == ExperimentKind::lower_bound || c.kind == ExperimentKind::chernoff_sweep ||
         (c.kind == ExperimentKind::evolve && c.method == EvolutionMethod::chernoff);
}

/// Modes of the dense reference each kind diagonalizes or quantizes.
int dense_modes(const ExperimentConfig& c) { return c.d; }

PolySymbol parse_symbol(const json& value, const std::string& path, int d) {
  if (value.is_array()) {
    try {
      return symbol_from_json(value, static_cast<std::size_t>(d));
    } catch (const std::exception& e) {
      throw ConfigError(path, e.what());
    }
  }
  if (!value.is_object()) throw ConfigError(path, "expected a symbol literal or a benchmark object");
  const std::string name = as_string(require(value, "benchmark", path), child(path, "benchmark"));
  if (name == "quartic-oscillator") {
    if (d != 1) throw ConfigError(child(path, "benchmark"), "the quartic oscillator lives on d = 1");
    double coupling = 0.1;
    if (const json* v = find(value, "coupling")) coupling = as_double(*v, child(path, "coupling"));
    return quartic_oscillator(coupling);
  }
  if (name == "galerkin") {
    double lambda = 0.02;
    double omega = 1.0;
    if (const json* v = find(value, "lambda")) lambda = as_double(*v, child(path, "lambda"));
    if (const json* v = find(value, "omega")) omega = as_double(*v, child(path, "omega"));
    return galerkin_benchmark(static_cast<std::size_t>(d), lambda, omega);
  }
  throw ConfigError(child(path, "benchmark"), "unknown benchmark '" + name + "'");
}

void parse_tolerances(const json& doc, Tolerances& tol) {
  const json* block = find(doc, "tolerances");
  if (!block) return;
  if (!block->is_object()) throw ConfigError("/tolerances", "expected an object");
  const std::pair<const char*, double*> fields[] = {
      {"ccr", &tol.ccr},
      {"roundtrip", &tol.roundtrip},
      {"lower_bound", &tol.lower_bound},
      {"contractivity", &tol.contractivity},
      {"ratio_min", &tol.ratio_min},
      {"ratio_max", &tol.ratio_max},
      {"slope_max", &tol.slope_max},
      {"t_scaling_min", &tol.t_scaling_min},
      {"t_scaling_max", &tol.t_scaling_max},
      {"norm_oracle", &tol.norm_oracle},
      {"norm_chernoff", &tol.norm_chernoff},
  };
  for (const auto& [key, value] : block->items()) {
    auto it = std::find_if(std::begin(fields), std::end(fields), [&](const auto& f) { return key == f.first; });
    if (it == std::end(fields)) throw ConfigError("/tolerances/" + key, "unknown tolerance");
    *it->second = as_double(value, "/tolerances/" + key);
  }
}

// ---------------------------------------------------------------------------
// Formatting

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

/// Compact form for labels, e.g. "0.075".
std::string format_label(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.6g", x);
  return buffer;
}

/// JSON has no NaN; record it as null.
json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json point_to_json(const PhasePoint& p) {
  json out = json::array();
  for (Complex z : p) out.push_back(complex_to_json(z));
  return out;
}

struct Context {
  const ExperimentConfig& config;
  const RunOptions& options;
  RunReport report;
  json metrics = json::object();
  json wall_times = json::object();

  void check(std::string name, bool pass, double value, double tolerance, std::string comparison) {
    for (const Check& c : report.checks) {
      if (c.name == name) throw std::logic_error("check '" + name + "' declared twice");
    }
    report.checks.push_back({std::move(name), pass, value, tolerance, std::move(comparison)});
  }

  void check_le(std::string name, double value, double bound) {
    check(std::move(name), value <= bound, value, bound, "<=");
  }

  void check_ge(std::string name, double value, double bound) {
    check(std::move(name), value >= bound, value, bound, ">=");
  }

  void check_window(std::string name, double value, double lo, double hi) {
    check(std::move(name), value >= lo && value <= hi, value, lo,
          "in [" + format_double(lo) + ", " + format_double(hi) + "]");
  }

  void emit(const std::string& name, const std::string& contents) {
    const fs::path path = options.out_dir / name;
    write_atomically(path, contents);
    report.outputs.push_back(path);
  }

  template <class F>
  auto timed(const std::string& label, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    auto result = body();
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    wall_times[label] = elapsed.count();
    return result;
  }
};

json run_metadata(const ExperimentConfig& c) {
  json meta = {{"kind", c.kind_name}, {"d", c.d}, {"M", c.M}, {"library_version", kLibraryVersion}};
  if (uses_quadrature(c)) meta["Q"] = c.quadrature_order();
  if (c.symbol) {
    meta["symbol_hash"] = symbol_hash_hex(*c.symbol);
    meta["symbol_degree"] = c.symbol->degree();
  }
  return meta;
}

// ---------------------------------------------------------------------------
// Kinds

void run_ccr(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const BasisPtr basis = enumerate_basis(c.d, c.M);
  double worst = 0.0;
  double worst_boundary = 0.0;
  for (int i = 0; i < c.d; ++i) {
    for (int j = 0; j < c.d; ++j) {
      const CcrDefect defect = ccr_defect(basis, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      ctx.check_le("ccr[" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "]", defect.protected_subspace,
                   c.tolerances.ccr);
      worst = std::max(worst, defect.protected_subspace);
      worst_boundary = std::max(worst_boundary, defect.unrestricted);
    }
  }
  ctx.metrics["basis_size"] = basis->size();
  ctx.metrics["max_protected_defect"] = worst;
  ctx.metrics["max_unrestricted_defect"] = worst_boundary;
}

void run_roundtrip(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  std::mt19937_64 rng(c.seed);
  double worst = 0.0;
  int degree_violations = 0;
  int reality_violations = 0;
  for (int s = 0; s < c.samples; ++s) {
    const auto modes = static_cast<std::size_t>(1 + s % c.d);
    const PolySymbol a = random_symbol(rng, modes, c.max_degree, c.terms);
    const PolySymbol w = wick_from_antinormal(a);
    worst = std::max(worst, antinormal_from_wick(w).max_coefficient_distance(a));
    worst = std::max(worst, wick_from_antinormal(antinormal_from_wick(a)).max_coefficient_distance(a));
    const PolySymbol difference = w - a;
    const bool law = w.degree() == a.degree() && (difference.is_zero() || difference.degree() <= a.degree() - 2);
    if (!law) ++degree_violations;
    const PolySymbol real = a + conjugate(a);
    if (!is_real(wick_from_antinormal(real)) || !is_real(antinormal_from_wick(real))) ++reality_violations;
  }
  ctx.check_le("roundtrip", worst, c.tolerances.roundtrip);
  ctx.check_le("degree-law-violations", degree_violations, 0);
  ctx.check_le("reality-violations", reality_violations, 0);
  ctx.metrics["samples"] = c.samples;
  ctx.metrics["max_coefficient_deviation"] = worst;
}

PolarGrid grid_for(const ExperimentConfig& c, const PolySymbol& s) {
  PolarGrid grid;
  grid.radius = containment_radius(s);
  grid.radial_count = static_cast<int>(std::ceil(grid.radius / c.grid_step)) + 1;
  grid.angular_count = c.grid_angles;
  return grid;
}

void run_lower_bound(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const BasisPtr basis = enumerate_basis(c.d, c.M);
  const QuadratureRule rule(static_cast<std::size_t>(c.d), c.quadrature_order());
  std::mt19937_64 rng(c.seed);

  std::vector<PolySymbol> symbols;
  if (c.symbol) {
    symbols.push_back(*c.symbol);
  } else {
    for (int s = 0; s < c.samples; ++s) {
      symbols.push_back(random_bounded_real_symbol(rng, static_cast<std::size_t>(c.d), c.max_degree, c.terms));
    }
  }

  std::ostringstream table;
  table << "sample,grid_infimum,min_eigenvalue,exact_min_eigenvalue\n";
  double worst = std::numeric_limits<double>::infinity();
  double worst_exact = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < symbols.size(); ++s) {
    const PolySymbol& a = symbols[s];
    if (!is_real(a)) throw ConfigError("/symbol", "lower-bound needs a real symbol");
    const double infimum = infimum_estimate(a, grid_for(c, a));
    const PolySymbol shifted = a - PolySymbol::constant(a.modes(), infimum);
    const OperatorMatrix quadrature = antiwick_quantize_function(basis, shifted, rule);
    const OperatorMatrix exact = antiwick_quantize_poly(basis, shifted);
    auto min_eigenvalue = [](const OperatorMatrix& op) {
      const Eigen::MatrixXcd symmetric = 0.5 * (op.entries() + op.entries().adjoint());
      return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(symmetric, Eigen::EigenvaluesOnly).eigenvalues()(0);
    };
    const double lambda = min_eigenvalue(quadrature);
    const double lambda_exact = min_eigenvalue(exact);
    worst = std::min(worst, lambda);
    worst_exact = std::min(worst_exact, lambda_exact);
    table << s << ',' << format_double(infimum) << ',' << format_double(lambda) << ','
          << format_double(lambda_exact) << '\n';
  }
  ctx.check_ge("min-eigenvalue", worst, -c.tolerances.lower_bound);
  ctx.metrics["samples"] = symbols.size();
  ctx.metrics["min_eigenvalue"] = worst;
  // The exact route may dip below the bound by the Wick correction; reported only.
  ctx.metrics["exact_route_min_eigenvalue"] = worst_exact;
  ctx.emit(c.table_name, table.str());
}

/// Hamiltonian of the anti-Wick route, read from or written to the cache.
OperatorMatrix cached_hamiltonian(const Context& ctx, const PolySymbol& a, const BasisPtr& basis) {
  if (!ctx.options.cache_dir) return antiwick_quantize_poly(basis, a);
  const fs::path path = *ctx.options.cache_dir / ("antiwick-d" + std::to_string(basis->modes()) + "-M" +
                                                  std::to_string(basis->max_quanta()) + "-" + symbol_hash_hex(a) +
                                                  ".json");
  if (fs::exists(path)) {
    try {
      std::ifstream in(path);
      const json doc = json::parse(in);
      const PolySymbol stored = symbol_from_json(doc.at("symbol"), a.modes());
      if (stored.max_coefficient_distance(a) == 0.0) return operator_from_json(doc.at("operator"), basis);
    } catch (const std::exception&) {
      // Unreadable or foreign entry: recompute and overwrite.
    }
  }
  OperatorMatrix h = antiwick_quantize_poly(basis, a);
  json doc = {{"symbol", symbol_to_json(a)}, {"operator", operator_to_json(h)}};
  write_atomically(path, doc.dump());
  return h;
}

/// exp(-i t Ĥ) coherent element for a = c + sum_i w_i |alpha_i|^2 (anti-Wick),
/// whose quantization is sum_i w_i N_i + c + sum_i w_i.
Complex harmonic_closed_form(const PolySymbol& a, double t, const ProbePair& probe) {
  const std::size_t d = a.modes();
  std::vector<double> omega(d, 0.0);
  double shift = 0.0;
  for (const auto& [index, value] : a.terms()) {
    const int degree = index.degree();
    if (degree == 0) {
      shift += value.real();
      continue;
    }
    for (std::size_t i = 0; i < d; ++i) {
      if (index.kstar[i] == 1 && index.k[i] == 1) omega[i] += value.real();
    }
  }
  Complex exponent = Complex(0.0, -t * shift);
  for (std::size_t i = 0; i < d; ++i) {
    exponent += Complex(0.0, -t * omega[i]);
    exponent += std::conj(probe.alpha[i]) * std::exp(Complex(0.0, -t * omega[i])) * probe.beta[i];
  }
  return std::exp(exponent);
}

bool is_diagonal_quadratic(const PolySymbol& a) {
  if (!is_real(a)) return false;
  for (const auto& [index, value] : a.terms()) {
    if (index.degree() == 0) continue;
    if (index.degree() != 2 || index.kstar != index.k) return false;
  }
  return true;
}

void run_chernoff(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const PolySymbol& a = *c.symbol;
  const BasisPtr basis = enumerate_basis(c.d, c.M);
  const QuadratureRule rule(static_cast<std::size_t>(c.d), c.quadrature_order());
  const ProbePair& probe = c.probes.front();

  const OperatorMatrix h = cached_hamiltonian(ctx, a, basis);
  std::vector<double> norms;
  std::vector<ConvergenceRecord> records = ctx.timed("table", [&] {
    return feynman_convergence_table(a, c.t, c.Ns, probe, basis, rule, {&h, &norms});
  });

  Complex reference;
  if (c.reference == "harmonic-closed-form") {
    reference = harmonic_closed_form(a, c.t, probe);
    for (ConvergenceRecord& r : records) r.abs_error = std::abs(r.value - reference);
  } else {
    reference = coherent_matrix_element(exact_evolution(h, c.t), probe.alpha, probe.beta);
  }

  std::ostringstream table;
  table << "N,re,im,abs_error,seconds\n";
  json rows = json::array();
  for (const ConvergenceRecord& r : records) {
    const double seconds = c.record_timings ? r.seconds : 0.0;
    table << r.parameter << ',' << format_double(r.value.real()) << ',' << format_double(r.value.imag()) << ','
          << format_double(r.abs_error) << ',' << format_double(seconds) << '\n';
    rows.push_back({{"N", r.parameter}, {"re", r.value.real()}, {"im", r.value.imag()},
                    {"abs_error", r.abs_error}, {"seconds", seconds}});
  }

  double max_norm = 0.0;
  for (double n : norms) max_norm = std::max(max_norm, n);
  ctx.check_le("contractivity", max_norm, 1.0 + c.tolerances.contractivity);

  if (c.check_halving) {
    for (std::size_t i = 1; i < records.size(); ++i) {
      if (records[i].parameter != 2 * records[i - 1].parameter) continue;
      const double ratio = records[i - 1].abs_error / records[i].abs_error;
      ctx.check_window("halving-ratio[N=" + std::to_string(records[i - 1].parameter) + "]", ratio,
                       c.tolerances.ratio_min, c.tolerances.ratio_max);
    }
  }
  if (c.reduction_pair) {
    auto error_at = [&](int n) {
      for (const ConvergenceRecord& r : records) {
        if (r.parameter == n) return r.abs_error;
      }
      throw std::logic_error("reduction pair not in Ns");
    };
    const auto [from, to] = *c.reduction_pair;
    const double ratio = error_at(from) / error_at(to);
    ctx.check_ge("error-reduction[N=" + std::to_string(from) + "->" + std::to_string(to) + "]", ratio,
                 c.reduction_factor);
  }

  ctx.metrics["reference"] = complex_to_json(reference);
  ctx.metrics["max_product_norm"] = max_norm;
  ctx.metrics["node_count"] = rule.node_count();

  json mirror = {{"metadata", run_metadata(c)},
                 {"t", c.t},
                 {"reference_kind", c.reference},
                 {"reference", complex_to_json(reference)},
                 {"probe", {{"alpha", point_to_json(probe.alpha)}, {"beta", point_to_json(probe.beta)}}},
                 {"rows", rows}};
  ctx.emit(c.table_name, table.str());
  ctx.emit(c.table_json_name, mirror.dump(2) + "\n");
}

SweepResult sweep_at(const ExperimentConfig& c, double t) {
  SweepOptions options;
  options.t = t;
  options.probe = c.probes.front();
  options.max_quanta = c.M;
  options.route = c.route;
  options.slope_threshold = c.tolerances.slope_max;
  options.max_dimension = kDenseBudget;
  return galerkin_sweep(*c.symbol, Flag(static_cast<std::size_t>(c.d), c.flag), options);
}

void run_galerkin(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const SweepResult sweep = ctx.timed("sweep", [&] { return sweep_at(c, c.t); });

  int increases = 0;
  for (std::size_t i = 1; i < sweep.records.size(); ++i) {
    if (!(sweep.records[i].abs_error < sweep.records[i - 1].abs_error)) ++increases;
  }
  if (!sweep.fit.exact) ctx.check_le("errors-strictly-decreasing", increases, 0);
  if (sweep.fit.exact) {
    ctx.check("rate-slope", true, 0.0, c.tolerances.slope_max, "exact");
  } else {
    ctx.check("rate-slope", sweep.slope_pass, sweep.fit.fitted ? sweep.fit.slope : std::nan(""),
              c.tolerances.slope_max, "<=");
  }

  std::ostringstream table;
  table << "n,re,im,abs_error,slope_running\n";
  json rows = json::array();
  for (std::size_t i = 0; i < sweep.records.size(); ++i) {
    const ConvergenceRecord& r = sweep.records[i];
    table << r.parameter << ',' << format_double(r.value.real()) << ',' << format_double(r.value.imag()) << ','
          << format_double(r.abs_error) << ',' << format_double(sweep.running_slopes[i]) << '\n';
    rows.push_back({{"n", r.parameter}, {"re", r.value.real()}, {"im", r.value.imag()},
                    {"abs_error", r.abs_error}, {"slope_running", number_or_null(sweep.running_slopes[i])}});
  }

  json scaling = json::array();
  if (!c.scaling_times.empty()) {
    std::vector<SweepResult> sweeps(c.scaling_times.size());
    ctx.timed("t-scaling", [&] {
      for (std::size_t k = 0; k < c.scaling_times.size(); ++k) {
        sweeps[k] = c.scaling_times[k] == c.t ? sweep : sweep_at(c, c.scaling_times[k]);
      }
      return 0;
    });
    for (std::size_t k = 1; k < sweeps.size(); ++k) {
      for (std::size_t i = 0; i < sweeps[k].records.size(); ++i) {
        const double ratio = sweeps[k].records[i].abs_error / sweeps[k - 1].records[i].abs_error;
        const std::string name = "t-scaling[n=" + std::to_string(c.flag[i]) + ",t=" +
                                 format_label(c.scaling_times[k - 1]) + "->" + format_label(c.scaling_times[k]) +
                                 "]";
        ctx.check_window(name, ratio, c.tolerances.t_scaling_min, c.tolerances.t_scaling_max);
        scaling.push_back({{"n", c.flag[i]}, {"t_from", c.scaling_times[k - 1]}, {"t_to", c.scaling_times[k]},
                           {"ratio", number_or_null(ratio)}});
      }
    }
  }

  const json fit = {{"slope", number_or_null(sweep.fit.fitted ? sweep.fit.slope : std::nan(""))},
                    {"intercept", number_or_null(sweep.fit.fitted ? sweep.fit.intercept : std::nan(""))},
                    {"residual", number_or_null(sweep.fit.fitted ? sweep.fit.residual : std::nan(""))},
                    {"exact", sweep.fit.exact},
                    {"pass", sweep.slope_pass}};
  ctx.metrics["reference"] = complex_to_json(sweep.reference);
  ctx.metrics["fit"] = fit;
  json mirror = {{"metadata", run_metadata(c)},
                 {"t", c.t},
                 {"flag", c.flag},
                 {"route", c.route == QuantizationRoute::wick ? "wick" : "antiwick"},
                 {"reference", complex_to_json(sweep.reference)},
                 {"rows", rows},
                 {"fit", fit},
                 {"t_scaling", scaling}};
  ctx.emit(c.table_name, table.str());
  ctx.emit(c.table_json_name, mirror.dump(2) + "\n");
}

void run_evolve(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const int n = c.reduced_modes > 0 ? c.reduced_modes : c.d;
  const BasisPtr basis = enumerate_basis(n, c.M);
  Eigen::VectorXcd initial = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size()));
  if (c.initial_coherent) {
    initial = coherent_vector(basis, project_point(*c.initial_coherent, static_cast<std::size_t>(n))).components;
    initial.normalize();
  } else {
    initial(0) = 1.0;
  }
  EvolveOptions options;
  options.max_quanta = c.M;
  options.route = c.route;
  options.method = c.method;
  options.slices = c.slices;
  options.quadrature_order = c.quadrature_order();
  const EvolveResult result = ctx.timed("evolve", [&] {
    return schrodinger_evolve(*c.symbol, static_cast<std::size_t>(n), initial, c.t_grid, options);
  });

  std::ostringstream table;
  table << "t,norm_defect,re_overlap,im_overlap\n";
  double worst = 0.0;
  for (std::size_t k = 0; k < c.t_grid.size(); ++k) {
    const Complex overlap = initial.dot(result.states[k]);
    worst = std::max(worst, result.norm_defects[k]);
    table << format_double(c.t_grid[k]) << ',' << format_double(result.norm_defects[k]) << ','
          << format_double(overlap.real()) << ',' << format_double(overlap.imag()) << '\n';
  }
  const double bound = c.method == EvolutionMethod::oracle ? c.tolerances.norm_oracle : c.tolerances.norm_chernoff;
  ctx.check_le("norm-conservation", worst, bound);
  ctx.metrics["max_norm_defect"] = worst;
  ctx.metrics["reduced_modes"] = n;
  ctx.emit(c.table_name, table.str());
}

double integer_power(double base, int exponent) {
  double result = 1.0;
  for (int e = 0; e < exponent; ++e) result *= base;
  return result;
}

/// Raises BudgetError for configs whose dense or quadrature objects are too large.
void enforce_budget(const ExperimentConfig& c) {
  const std::size_t size = basis_size(static_cast<std::size_t>(dense_modes(c)), c.M);
  if (size > kDenseBudget) {
    throw BudgetError("basis size binomial(M+d,d) = " + std::to_string(size) + " exceeds the dense budget of " +
                          std::to_string(kDenseBudget),
                      size);
  }
  if (uses_quadrature(c)) {
    const double nodes = quadrature_node_estimate(static_cast<std::size_t>(c.d), c.quadrature_order());
    if (nodes > kNodeHardCap) {
      throw BudgetError("quadrature node count Q^(2d) = " + format_double(nodes) + " exceeds the hard cap of " +
                            format_double(kNodeHardCap),
                        static_cast<std::size_t>(std::min(nodes, 1e18)));
    }
  }
  if (c.kind == ExperimentKind::lower_bound) {
    // Tensor polar grid used for the sampled infimum, per symbol.
    const double points = integer_power(1.0 + 500.0 * c.grid_angles, c.d);
    if (points > kNodeHardCap * 10) {
      throw BudgetError("infimum grid of about " + format_double(points) + " points is too large",
                        static_cast<std::size_t>(std::min(points, 1e18)));
    }
  }
}

json check_to_json(const Check& c) {
  return {{"name", c.name},
          {"pass", c.pass},
          {"value", number_or_null(c.value)},
          {"tolerance", c.tolerance},
          {"comparison", c.comparison}};
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
  ExperimentConfig c;
  c.raw = doc;

  const std::string schema = as_string(require(doc, "schema", ""), "/schema");
  if (schema != kConfigSchema) {
    throw ConfigError("/schema", "unsupported schema '" + schema + "', expected '" + kConfigSchema + "'");
  }
  c.kind_name = as_string(require(doc, "kind", ""), "/kind");
  const auto kind = std::find_if(std::begin(kKinds), std::end(kKinds),
                                 [&](const KindEntry& e) { return c.kind_name == e.name; });
  if (kind == std::end(kKinds)) throw ConfigError("/kind", "unknown experiment kind '" + c.kind_name + "'");
  c.kind = kind->kind;
  c.table_name = kind->table;

  c.d = as_int(require(doc, "d", ""), "/d", 1, 64);
  read_int(doc, "M", c.M, 1, 200);
  read_int(doc, "Q", c.Q, 0, 200);
  read_double(doc, "t", c.t);
  if (const json* v = find(doc, "seed")) {
    if (!v->is_number_integer() || (!v->is_number_unsigned() && v->get<long long>() < 0)) {
      throw ConfigError("/seed", "expected a non-negative integer");
    }
    c.seed = v->get<std::uint64_t>();
  }
  if (const json* v = find(doc, "record_timings")) c.record_timings = as_bool(*v, "/record_timings");
  parse_tolerances(doc, c.tolerances);

  if (const json* v = find(doc, "symbol")) c.symbol = parse_symbol(*v, "/symbol", c.d);
  if (const json* v = find(doc, "probes")) {
    if (!v->is_array() || v->empty()) throw ConfigError("/probes", "expected a non-empty array");
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string path = child("/probes", i);
      const json& probe = (*v)[i];
      if (!probe.is_object()) throw ConfigError(path, "expected {\"alpha\": [...], \"beta\": [...]}");
      c.probes.push_back({as_point(require(probe, "alpha", path), child(path, "alpha"), c.d),
                          as_point(require(probe, "beta", path), child(path, "beta"), c.d)});
    }
  }
  if (const json* v = find(doc, "route")) {
    const std::string route = as_string(*v, "/route");
    if (route == "wick") {
      c.route = QuantizationRoute::wick;
    } else if (route == "antiwick") {
      c.route = QuantizationRoute::antiwick;
    } else {
      throw ConfigError("/route", "expected \"wick\" or \"antiwick\"");
    }
  }

  if (const json* v = find(doc, "outputs")) {
    if (!v->is_object()) throw ConfigError("/outputs", "expected an object");
    auto name = [&](const char* key, std::string& out) {
      if (const json* f = find(*v, key)) {
        out = as_string(*f, std::string("/outputs/") + key);
        if (out.empty() || fs::path(out).has_parent_path() || out == "." || out == "..") {
          throw ConfigError(std::string("/outputs/") + key, "expected a plain file name");
        }
      }
    };
    name("report", c.report_name);
    name("table", c.table_name);
    name("table_json", c.table_json_name);
  }
  if (c.table_json_name.empty() && !c.table_name.empty()) {
    c.table_json_name = fs::path(c.table_name).replace_extension(".json").string();
  }

  auto require_symbol = [&] {
    if (!c.symbol) throw ConfigError("/symbol", "required field is missing");
    if (!is_real(*c.symbol)) throw ConfigError("/symbol", "the Hamiltonian symbol must be real");
  };
  auto require_probes = [&] {
    if (c.probes.empty()) throw ConfigError("/probes", "required field is missing");
  };

  switch (c.kind) {
    case ExperimentKind::ccr_check:
      break;
    case ExperimentKind::symbol_roundtrip:
      if (c.d > 3) throw ConfigError("/d", "symbol-roundtrip samples d <= 3 modes");
      c.samples = 200;
      c.max_degree = 8;
      c.terms = 10;
      read_int(doc, "samples", c.samples, 1, 100000);
      read_int(doc, "max_degree", c.max_degree, 0, 16);
      read_int(doc, "terms", c.terms, 1, 1000);
      break;
    case ExperimentKind::lower_bound:
      c.samples = 50;
      c.max_degree = 4;
      c.terms = 6;
      read_int(doc, "samples", c.samples, 1, 10000);
      read_int(doc, "max_degree", c.max_degree, 2, 12);
      read_int(doc, "terms", c.terms, 0, 1000);
      read_double(doc, "grid_step", c.grid_step);
      read_int(doc, "grid_angles", c.grid_angles, 4, 100000);
      if (c.max_degree % 2 != 0) throw ConfigError("/max_degree", "bounded-below samples need an even degree");
      if (c.grid_step <= 0.0) throw ConfigError("/grid_step", "must be positive");
      if (c.symbol && !is_real(*c.symbol)) throw ConfigError("/symbol", "lower-bound needs a real symbol");
      if (c.quadrature_order() < c.M + 1) throw ConfigError("/Q", "quadrature order must be at least M + 1");
      break;
    case ExperimentKind::chernoff_sweep: {
      require_symbol();
      require_probes();
      c.Ns = as_ints(require(doc, "Ns", ""), "/Ns", 1, 1 << 20);
      if (c.Ns.empty()) throw ConfigError("/Ns", "expected at least one slice count");
      require_strictly_ascending(c.Ns, "/Ns");
      if (c.quadrature_order() < c.M + 1) throw ConfigError("/Q", "quadrature order must be at least M + 1");
      if (const json* v = find(doc, "reference")) c.reference = as_string(*v, "/reference");
      if (c.reference != "oracle" && c.reference != "harmonic-closed-form") {
        throw ConfigError("/reference", "expected \"oracle\" or \"harmonic-closed-form\"");
      }
      if (c.reference == "harmonic-closed-form" && !is_diagonal_quadratic(*c.symbol)) {
        throw ConfigError("/reference", "the closed form needs a diagonal quadratic symbol");
      }
      if (const json* checks = find(doc, "checks")) {
        if (!checks->is_object()) throw ConfigError("/checks", "expected an object");
        if (const json* v = find(*checks, "halving_ratio")) c.check_halving = as_bool(*v, "/checks/halving_ratio");
        if (const json* v = find(*checks, "reduction")) {
          const std::string path = "/checks/reduction";
          if (!v->is_object()) throw ConfigError(path, "expected {\"from\", \"to\", \"factor\"}");
          const int from = as_int(require(*v, "from", path), path + "/from", 1, 1 << 20);
          const int to = as_int(require(*v, "to", path), path + "/to", 1, 1 << 20);
          for (auto [value, key] : {std::pair{from, "from"}, std::pair{to, "to"}}) {
            if (std::find(c.Ns.begin(), c.Ns.end(), value) == c.Ns.end()) {
              throw ConfigError(path + "/" + key, "slice count not listed in /Ns");
            }
          }
          c.reduction_pair = {from, to};
          if (const json* f = find(*v, "factor")) c.reduction_factor = as_double(*f, path + "/factor");
        }
      }
      break;
    }
    case ExperimentKind::galerkin_sweep: {
      require_symbol();
      require_probes();
      c.flag = as_ints(require(doc, "flag", ""), "/flag", 1, c.d);
      if (c.flag.empty()) throw ConfigError("/flag", "expected at least one member");
      require_strictly_ascending(c.flag, "/flag");
      if (const json* v = find(doc, "scaling_times")) {
        c.scaling_times = as_doubles(*v, "/scaling_times");
        for (std::size_t i = 0; i < c.scaling_times.size(); ++i) {
          if (c.scaling_times[i] <= 0.0) throw ConfigError(child("/scaling_times", i), "times must be positive");
          if (i > 0 && std::abs(c.scaling_times[i] - 2.0 * c.scaling_times[i - 1]) > 1e-12 * c.scaling_times[i]) {
            throw ConfigError(child("/scaling_times", i), "each time must double the previous one");
          }
        }
      }
      break;
    }
    case ExperimentKind::evolve: {
      require_symbol();
      const json& grid = require(doc, "t_grid", "");
      c.t_grid = as_doubles(grid, "/t_grid");
      if (c.t_grid.empty()) throw ConfigError("/t_grid", "expected at least one time");
      read_int(doc, "n", c.reduced_modes, 1, c.d);
      read_int(doc, "slices", c.slices, 1, 1 << 20);
      if (const json* v = find(doc, "method")) {
        const std::string method = as_string(*v, "/method");
        if (method == "oracle") {
          c.method = EvolutionMethod::oracle;
        } else if (method == "chernoff") {
          c.method = EvolutionMethod::chernoff;
        } else {
          throw ConfigError("/method", "expected \"oracle\" or \"chernoff\"");
        }
      }
      if (c.method == EvolutionMethod::chernoff && c.quadrature_order() < c.M + 1) {
        throw ConfigError("/Q", "quadrature order must be at least M + 1");
      }
      if (const json* v = find(doc, "initial")) {
        if (v->is_string() && v->get<std::string>() == "vacuum") {
          // default
        } else if (v->is_object()) {
          c.initial_coherent = as_point(require(*v, "coherent", "/initial"), "/initial/coherent", c.d);
        } else {
          throw ConfigError("/initial", "expected \"vacuum\" or {\"coherent\": [...]}");
        }
      }
      break;
    }
  }
  return c;
}

Diagnostics validate_config(const json& doc) {
  Diagnostics diagnostics;
  std::optional<ExperimentConfig> config;
  try {
    config = parse_config(doc);
  } catch (const ConfigError& e) {
    diagnostics.errors.push_back(e.what());
  }

  // Size estimates come from the raw fields so they are reported even for
  // configs with schema errors elsewhere.
  int d = config ? config->d : 0;
  int M = config ? config->M : 8;
  int Q = config ? config->quadrature_order() : 0;
  if (!config && doc.is_object()) {
    if (doc.contains("d") && doc["d"].is_number_integer()) d = doc["d"].get<int>();
    if (doc.contains("M") && doc["M"].is_number_integer()) M = doc["M"].get<int>();
    Q = (doc.contains("Q") && doc["Q"].is_number_integer() && doc["Q"].get<int>() > 0) ? doc["Q"].get<int>() : M + 2;
  }
  if (d >= 1 && M >= 0) {
    diagnostics.basis_size = basis_size(static_cast<std::size_t>(d), M);
    diagnostics.node_count = quadrature_node_estimate(static_cast<std::size_t>(d), Q);
    if (diagnostics.basis_size > kDenseBudget) {
      diagnostics.over_budget = true;
      diagnostics.errors.push_back("/M: basis size " + std::to_string(diagnostics.basis_size) +
                                   " exceeds the dense budget of " + std::to_string(kDenseBudget));
    }
    if (diagnostics.node_count > kNodeSoftCap) {
      diagnostics.warnings.push_back("/Q: quadrature node count " + format_double(diagnostics.node_count) +
                                     " exceeds the soft cap of " + format_double(kNodeSoftCap));
    }
  }
  if (config) {
    try {
      enforce_budget(*config);
    } catch (const BudgetError& e) {
      if (!diagnostics.over_budget) diagnostics.errors.push_back(std::string("budget: ") + e.what());
      diagnostics.over_budget = true;
    }
  }
  return diagnostics;
}

bool RunReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::vector<std::string> RunReport::failing_checks() const {
  std::vector<std::string> names;
  for (const Check& c : checks) {
    if (!c.pass) names.push_back(c.name);
  }
  return names;
}

RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  enforce_budget(config);
  Context ctx{config, options, {}};
  const auto start = std::chrono::steady_clock::now();
  switch (config.kind) {
    case ExperimentKind::ccr_check: run_ccr(ctx); break;
    case ExperimentKind::symbol_roundtrip: run_roundtrip(ctx); break;
    case ExperimentKind::lower_bound: run_lower_bound(ctx); break;
    case ExperimentKind::chernoff_sweep: run_chernoff(ctx); break;
    case ExperimentKind::galerkin_sweep: run_galerkin(ctx); break;
    case ExperimentKind::evolve: run_evolve(ctx); break;
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  ctx.wall_times["total"] = elapsed.count();

  json checks = json::array();
  for (const Check& c : ctx.report.checks) checks.push_back(check_to_json(c));
  json outputs = json::array();
  for (const fs::path& p : ctx.report.outputs) outputs.push_back(p.filename().string());

  json& doc = ctx.report.document;
  doc["schema"] = "fockprop-report/1";
  doc["library_version"] = kLibraryVersion;
  doc["kind"] = config.kind_name;
  doc["config"] = config.raw;
  doc["checks"] = checks;
  doc["metrics"] = ctx.metrics;
  doc["outputs"] = outputs;
  doc["pass"] = ctx.report.pass();
  doc["failing_checks"] = ctx.report.failing_checks();
  if (config.record_timings) doc["wall_times"] = ctx.wall_times;

  const fs::path report_path = options.out_dir / config.report_name;
  write_atomically(report_path, doc.dump(2) + "\n");
  ctx.report.outputs.push_back(report_path);
  return std::move(ctx.report);
}

void write_atomically(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path temporary = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(temporary, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + temporary.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(temporary);
      throw std::runtime_error("failed to write " + temporary.string());
    }
  }
  std::error_code ec;
  fs::rename(temporary, path, ec);
  if (ec) {
    fs::remove(temporary);
    throw std::runtime_error("cannot rename into " + path.string() + ": " + ec.message());
  }
}

}  // namespace fockprop
