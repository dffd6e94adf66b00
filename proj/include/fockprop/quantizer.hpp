#pragma once

// Symbol -> operator maps on a truncated Fock basis.
//
// Wick quantization places every creator to the left. Anti-Wick quantization
// has two routes: the exact polynomial route through exp(Delta), and the
// quadrature route sum_q w_q f(phi_q) |F_phi_q)(F_phi_q| that also accepts
// non-polynomial functions such as exp(-i A tau). The second route matches the
// first on the sub-block with quanta <= M - deg(A) once Q >= M + 1, and on the
// whole space once 2Q - 1 >= 2M + deg(A).

#include <functional>
#include <span>
#include <vector>

#include "fockprop/fock.hpp"
#include "fockprop/quadrature.hpp"
#include "fockprop/symbol.hpp"

namespace fockprop {

/// Phase-space function f(phi). Must be pure: it is called concurrently.
using PhaseFunction = std::function<Complex(std::span<const Complex>)>;

/// sum c prod (a_i^+)^{kstar_i} prod (a_j)^{k_j}, built entry by entry so that a
/// real symbol yields an exactly Hermitian matrix.
OperatorMatrix wick_quantize(const BasisPtr& basis, const PolySymbol& w);

/// wick_quantize(wick_from_antinormal(a)). No quadrature involved.
OperatorMatrix antiwick_quantize_poly(const BasisPtr& basis, const PolySymbol& a);

/// sum_q w_q f(phi_q) |F_phi_q)(F_phi_q| with unnormalized coherent vectors;
/// the Gaussian exp(-|phi|^2) lives in the weights. Partial sums are formed
/// on a fixed partition, so the result does not depend on the thread count.
/// Throws if f is not finite at a node.
OperatorMatrix antiwick_quantize_function(const BasisPtr& basis, const PhaseFunction& f,
                                          const QuadratureRule& rule);

/// Quadrature anti-Wick operator of a polynomial symbol.
OperatorMatrix antiwick_quantize_function(const BasisPtr& basis, const PolySymbol& a,
                                          const QuadratureRule& rule);

struct WickSymbolCheck {
  /// max over probes of |<F_a, Op F_b> e^{-conj(a).b} - W(conj(a), b)| / max(1, |W|)
  double max_relative_deviation = 0.0;
  /// largest coherent tail bound seen among probe points
  double max_tail_bound = 0.0;
};

/// Verification oracle for the coherent-matrix identity
/// <F_alpha, Op F_beta> = W(conj(alpha), beta) exp(conj(alpha).beta).
/// Throws TruncationError when a probe point has a tail bound above tail_tol.
WickSymbolCheck wick_symbol_of(const OperatorMatrix& op, const PolySymbol& candidate,
                               std::span<const ProbePair> probes, double tail_tol = 1e-10);

/// Maximum entry difference restricted to rows and columns with total
/// quanta <= max_quanta (the block untouched by truncation).
double subblock_max_difference(const OperatorMatrix& lhs, const OperatorMatrix& rhs, int max_quanta);

}  // namespace fockprop
