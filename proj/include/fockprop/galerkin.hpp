#pragma once

// Quantized Galerkin reduction: restrict a Hamiltonian symbol to the first n
// modes of a flag, quantize it on the n-mode truncated basis, and measure how
// the reduced evolutions approach the full one.

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fockprop/fock.hpp"
#include "fockprop/propagator.hpp"
#include "fockprop/symbol.hpp"

namespace fockprop {

enum class QuantizationRoute { wick, antiwick };

/// Strictly increasing mode counts n_1 < n_2 < ... <= d_max.
class Flag {
 public:
  Flag(std::size_t d_max, std::vector<int> members);
  std::size_t d_max() const { return d_max_; }
  const std::vector<int>& members() const { return members_; }

 private:
  std::size_t d_max_;
  std::vector<int> members_;
};

/// Least squares of log(error) against log(n), over samples with error > 1e-12.
struct RateFit {
  std::vector<std::pair<int, double>> samples;
  bool fitted = false;  // needs >= 3 usable samples
  bool exact = false;   // every error <= 1e-10; nothing to fit
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of the log-space residuals
};
RateFit fit_rate(std::span<const std::pair<int, double>> samples);

/// Quantizes restrict_symbol(w, n), re-declared over n modes, on basis_n.
OperatorMatrix reduce_hamiltonian(const PolySymbol& w, std::size_t n, const BasisPtr& basis_n,
                                  QuantizationRoute route = QuantizationRoute::wick);

/// First n components of a phase point (the action of the mode projector).
PhasePoint project_point(std::span<const Complex> alpha, std::size_t n);
/// P_n on states: keeps amplitudes of occupations that vanish beyond mode n
/// and re-indexes them into the reduced basis.
Eigen::VectorXcd project_state(const BasisPtr& full, const Eigen::VectorXcd& state, const BasisPtr& reduced);

struct SweepOptions {
  double t = 0.3;
  ProbePair probe;
  int max_quanta = 8;
  QuantizationRoute route = QuantizationRoute::wick;
  double slope_threshold = -0.8;
  std::size_t max_dimension = 6000;
};

struct SweepResult {
  Complex reference;                   // coherent element at d_max
  std::vector<ConvergenceRecord> records;  // one per flag member, by n
  std::vector<double> running_slopes;  // fit slope over records[0..i]; NaN below two points
  RateFit fit;
  bool slope_pass = false;  // fitted slope <= threshold, or exact
};

/// Coherent element of exp(-i H_n t) at the projected probe for every flag
/// member, compared against the d_max reference at the same cutoff.
/// Throws BudgetError when the d_max basis exceeds max_dimension.
SweepResult galerkin_sweep(const PolySymbol& w, const Flag& flag, const SweepOptions& options);

enum class EvolutionMethod { oracle, chernoff };

struct EvolveOptions {
  int max_quanta = 8;
  QuantizationRoute route = QuantizationRoute::wick;
  EvolutionMethod method = EvolutionMethod::oracle;
  int slices = 64;            // Chernoff only
  int quadrature_order = 0;   // Chernoff only; 0 selects M + 2
};

struct EvolveResult {
  BasisPtr basis;
  std::vector<Eigen::VectorXcd> states;  // one per requested time
  std::vector<double> norm_defects;      // | ||F_n(t)|| - 1 |
};

/// Solves i dF/dt = H_n F on the n-mode basis from a normalized initial state.
/// The oracle method diagonalizes H_n. The Chernoff method slices the
/// anti-Wick symbol of H_n (for the Wick route that is exp(-Delta) of w).
EvolveResult schrodinger_evolve(const PolySymbol& w, std::size_t n, const Eigen::VectorXcd& initial,
                                std::span<const double> t_grid, const EvolveOptions& options);

}  // namespace fockprop
