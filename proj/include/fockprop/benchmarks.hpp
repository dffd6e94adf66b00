#pragma once

#include <random>
#include <vector>

#include "fockprop/symbol.hpp"

namespace fockprop {

/// (sum_i c_i (conj(alpha_i) + alpha_i))^4 expanded over `weights.size()` modes.
PolySymbol quartic_coupling(const std::vector<double>& weights);

/// Single-mode anharmonic benchmark conj(a) a + coupling (conj(a) + a)^4.
PolySymbol quartic_oscillator(double coupling = 0.1);

/// sum_i omega_i conj(a_i) a_i + lambda (sum_i (conj(a_i) + a_i) / i)^4 over
/// d_max modes with omega_i = omega. The 1/i weights make the coupling to
/// high modes decay, so the Galerkin error depends on n.
PolySymbol galerkin_benchmark(std::size_t d_max = 4, double lambda = 0.02, double omega = 1.0);

/// Random symbol with `terms` monomials of total degree <= max_degree and
/// complex coefficients uniform in [-1, 1]^2.
PolySymbol random_symbol(std::mt19937_64& rng, std::size_t modes, int max_degree, int terms);

/// Random real single- or multi-mode symbol that is bounded below: a leading
/// c (sum_i |alpha_i|^2)^(max_degree/2) with c in [0.5, 1.5] plus conjugate-
/// paired lower-order terms with coefficients scaled by `spread`.
PolySymbol random_bounded_real_symbol(std::mt19937_64& rng, std::size_t modes, int max_degree,
                                      int extra_terms, double spread = 0.5);

/// Radius outside which a bounded_real symbol exceeds its value at the
/// origin: 2 + 2 S / c, with S the sum of lower-order |coefficients| and c the
/// smallest top-degree coefficient.
double containment_radius(const PolySymbol& s);

}  // namespace fockprop
