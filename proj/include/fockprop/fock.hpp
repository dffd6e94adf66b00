#pragma once

// Doubly truncated bosonic Fock space: d modes, total quanta <= M.
// Mode indices in this API are 0-based.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "fockprop/symbol.hpp"

namespace fockprop {

using Occupation = std::vector<int>;

class FockBasis {
 public:
  /// States ordered by total quanta, and within a grade by descending
  /// lexicographic occupation, e.g. (0,0),(1,0),(0,1) for d=2, M=1.
  FockBasis(std::size_t modes, int max_quanta);

  std::size_t modes() const { return modes_; }
  int max_quanta() const { return max_quanta_; }
  std::size_t size() const { return states_.size(); }
  const std::vector<Occupation>& states() const { return states_; }
  const Occupation& state(std::size_t i) const { return states_[i]; }
  int total_quanta(std::size_t i) const { return totals_[i]; }
  std::optional<std::size_t> index_of(std::span<const int> occupation) const;

 private:
  std::size_t modes_;
  int max_quanta_;
  std::vector<Occupation> states_;
  std::vector<int> totals_;
  std::unordered_multimap<std::uint64_t, std::size_t> lookup_;
  std::uint64_t key(std::span<const int> occupation) const;
};

using BasisPtr = std::shared_ptr<const FockBasis>;

/// binomial(M+d, d), saturating at SIZE_MAX.
std::size_t basis_size(std::size_t modes, int max_quanta);
BasisPtr enumerate_basis(int modes, int max_quanta);

/// Dense complex matrix tied to a basis. The Hermitian flag is certified at
/// construction: max |A - A^H| <= 1e-12 * max(1, max |A|).
class OperatorMatrix {
 public:
  OperatorMatrix(BasisPtr basis, Eigen::MatrixXcd entries);

  const BasisPtr& basis() const { return basis_; }
  const Eigen::MatrixXcd& entries() const { return entries_; }
  std::size_t dimension() const { return static_cast<std::size_t>(entries_.rows()); }
  bool hermitian() const { return hermitian_; }
  double hermitian_defect() const;

  OperatorMatrix adjoint() const;
  OperatorMatrix operator*(const OperatorMatrix& rhs) const;
  OperatorMatrix operator+(const OperatorMatrix& rhs) const;
  OperatorMatrix operator-(const OperatorMatrix& rhs) const;

 private:
  void check_same_basis(const OperatorMatrix& rhs) const;
  BasisPtr basis_;
  Eigen::MatrixXcd entries_;
  bool hermitian_;
};

OperatorMatrix identity(const BasisPtr& basis);
OperatorMatrix annihilator(const BasisPtr& basis, std::size_t mode);
OperatorMatrix creator(const BasisPtr& basis, std::size_t mode);
OperatorMatrix number_operator(const BasisPtr& basis);

struct CcrDefect {
  /// max |([a_i, a_j^+] - delta_ij I)| over states with total quanta <= M-1.
  double protected_subspace;
  /// The same over the whole truncated space; nonzero at the cutoff layer.
  double unrestricted;
};
CcrDefect ccr_defect(const BasisPtr& basis, std::size_t mode_i, std::size_t mode_j);

/// Segal functor of a diagonal one-particle operator: prod_i lambda_i^{n_i}.
OperatorMatrix gamma_diag(const BasisPtr& basis, std::span<const Complex> lambdas);
/// Segal functor of a general d x d one-particle operator. Implemented by
/// substituting a_i^+ -> sum_k o_ki a_k^+ in each occupation monomial.
OperatorMatrix gamma(const BasisPtr& basis, const Eigen::MatrixXcd& one_particle);
/// Tangential functor sum_ij o_ij a_i^+ a_j.
OperatorMatrix dgamma(const BasisPtr& basis, const Eigen::MatrixXcd& one_particle);

/// Truncated unnormalized Bargmann coherent vector:
/// component prod_i alpha_i^{n_i} / sqrt(n_i!) at occupation n.
struct CoherentVector {
  BasisPtr basis;
  PhasePoint alpha;
  Eigen::VectorXcd components;
};
CoherentVector coherent_vector(const BasisPtr& basis, std::span<const Complex> alpha);

/// A pair of coherent labels (alpha, beta) for the matrix element <F_alpha, Op F_beta>.
struct ProbePair {
  PhasePoint alpha;
  PhasePoint beta;
};

/// <F_alpha, F_beta> in the truncated space (approximates exp(conj(alpha).beta)).
Complex overlap(const CoherentVector& lhs, const CoherentVector& rhs);

/// sum_{k > M} x^k / k!, the tail of exp(x) past the cutoff.
double exponential_tail(double x, int max_quanta);
/// Bound on |<F_alpha,F_beta>_truncated - exp(conj(alpha).beta)|.
double overlap_tail_bound(std::span<const Complex> alpha, std::span<const Complex> beta,
                          int max_quanta);
/// Smallest M with overlap_tail_bound(alpha, alpha, M) <= tol.
int required_quanta(std::span<const Complex> alpha, double tol);

}  // namespace fockprop
