#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fockprop/fock.hpp"
#include "fockprop/quadrature.hpp"
#include "fockprop/symbol.hpp"

namespace fockprop {

/// N equal slices of a total time t. tau is stored and total_time() is
/// tau * N, so the invariant tau * N == t holds for the stored values.
class SliceSchedule {
 public:
  SliceSchedule(double total_time, int slices);
  double total_time() const { return tau_ * slices_; }
  int slices() const { return slices_; }
  double tau() const { return tau_; }

 private:
  int slices_;
  double tau_;
};

/// Eigendecomposition of a Hermitian operator, reused for any number of
/// evolution times.
class SpectralPropagator {
 public:
  /// Throws std::domain_error unless h carries the Hermitian certificate.
  explicit SpectralPropagator(const OperatorMatrix& h);

  /// exp(-i h t)
  OperatorMatrix evolve(double t) const;
  Eigen::VectorXcd apply(double t, const Eigen::VectorXcd& state) const;
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const BasisPtr& basis() const { return basis_; }

 private:
  BasisPtr basis_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXcd eigenvectors_;
};

OperatorMatrix exact_evolution(const OperatorMatrix& h, double t);

/// max |U^H U - I|
double unitarity_defect(const OperatorMatrix& u);
/// Largest singular value.
double spectral_norm(const OperatorMatrix& op);

/// One slice O(tau) = quadrature anti-Wick operator of exp(-i a tau).
OperatorMatrix chernoff_slice(const PolySymbol& a, double tau, const BasisPtr& basis,
                              const QuadratureRule& rule);

/// [O(tau)]^N with tau = t/N. Requires a real symbol and Q >= M + 1.
OperatorMatrix chernoff_propagator(const PolySymbol& a, const SliceSchedule& schedule,
                                   const BasisPtr& basis, const QuadratureRule& rule);

/// Integer power by repeated squaring.
OperatorMatrix matrix_power(const OperatorMatrix& op, int exponent);

/// <F_alpha, Op F_beta> with unnormalized coherent vectors, so the identity
/// gives exp(conj(alpha).beta). Throws TruncationError, carrying the cutoff
/// that would suffice, when either point has a tail bound above tail_tol.
Complex coherent_matrix_element(const OperatorMatrix& op, std::span<const Complex> alpha,
                                std::span<const Complex> beta, double tail_tol = 1e-10);

struct ConvergenceRecord {
  int parameter;           // N for Chernoff tables, n for Galerkin sweeps
  std::string observable;  // e.g. "coherent(alpha,beta)"
  Complex value;
  double abs_error;
  double seconds;
};

struct FeynmanTableExtras {
  /// Precomputed antiwick_quantize_poly(a) (e.g. from a cache).
  const OperatorMatrix* hamiltonian = nullptr;
  /// Receives the spectral norm of each Chernoff product, by N.
  std::vector<double>* product_norms = nullptr;
};

/// For each N, the coherent element of chernoff_propagator(a, t/N) and its
/// distance to exact_evolution(antiwick_quantize_poly(a), t). Ns must be
/// ascending; entries are computed concurrently and merged in order of N.
std::vector<ConvergenceRecord> feynman_convergence_table(const PolySymbol& a, double t,
                                                         std::span<const int> Ns,
                                                         const ProbePair& probe,
                                                         const BasisPtr& basis,
                                                         const QuadratureRule& rule,
                                                         const FeynmanTableExtras& extras = {});

/// error(N_k) / error(N_{k+1}) for consecutive records.
std::vector<double> halving_ratios(std::span<const ConvergenceRecord> records);

}  // namespace fockprop
