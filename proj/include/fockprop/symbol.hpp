#pragma once

// Polynomial phase-space symbols in (conj(alpha), alpha) over d bosonic modes,
// together with the Gross Laplacian and the exact Wick <-> anti-Wick
// conversion pair W = exp(Delta) A, A = exp(-Delta) W.

#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace fockprop {

using Complex = std::complex<double>;

/// Exponents of conj(alpha_i) (kstar) and alpha_i (k) of one monomial.
struct MultiIndexPair {
  std::vector<int> kstar;
  std::vector<int> k;

  std::size_t modes() const { return k.size(); }
  int degree() const;
  /// (k, kstar): the index of the complex-conjugate monomial.
  MultiIndexPair conjugate() const { return {k, kstar}; }
  bool touches_mode_at_or_above(std::size_t n) const;

  friend bool operator==(const MultiIndexPair&, const MultiIndexPair&) = default;
};

/// Graded lexicographic order on the concatenation (kstar, k).
struct GradedLexLess {
  bool operator()(const MultiIndexPair& lhs, const MultiIndexPair& rhs) const;
};

/// A point alpha in C^d. conj(alpha) is implied.
using PhasePoint = std::vector<Complex>;

/// Immutable polynomial symbol. Zero coefficients are never stored and the
/// term map is kept in GradedLexLess order.
class PolySymbol {
 public:
  using TermMap = std::map<MultiIndexPair, Complex, GradedLexLess>;

  explicit PolySymbol(std::size_t modes);
  /// Terms with equal multi-index are merged; exact zeros are dropped.
  PolySymbol(std::size_t modes, const std::vector<std::pair<MultiIndexPair, Complex>>& terms);

  static PolySymbol constant(std::size_t modes, Complex value);
  static PolySymbol monomial(std::size_t modes, std::vector<int> kstar, std::vector<int> k,
                             Complex coefficient = 1.0);
  /// conj(alpha_i) for 0-based mode i.
  static PolySymbol alpha_star(std::size_t modes, std::size_t mode);
  /// alpha_i for 0-based mode i.
  static PolySymbol alpha(std::size_t modes, std::size_t mode);

  std::size_t modes() const { return modes_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  /// Maximum |kstar|+|k| over terms; -1 for the zero symbol.
  int degree() const;
  Complex coefficient(const MultiIndexPair& index) const;

  PolySymbol operator+(const PolySymbol& other) const;
  PolySymbol operator-(const PolySymbol& other) const;
  PolySymbol operator*(const PolySymbol& other) const;
  PolySymbol operator*(Complex scale) const;
  PolySymbol pow(int exponent) const;

  /// Largest absolute coefficient difference over the union of supports.
  double max_coefficient_distance(const PolySymbol& other) const;

 private:
  void check_same_modes(const PolySymbol& other) const;
  std::size_t modes_;
  TermMap terms_;
};

inline PolySymbol operator*(Complex scale, const PolySymbol& s) { return s * scale; }

/// Sum c * prod conj(z_i)^kstar_i z_i^k_i.
Complex eval(const PolySymbol& s, std::span<const Complex> z);
/// Coherent-matrix form W(conj(left), right): conj(left) carries kstar, right carries k.
Complex eval_mixed(const PolySymbol& s, std::span<const Complex> left,
                   std::span<const Complex> right);

/// Complex conjugate symbol: c(kstar,k) -> conj(c) at (k,kstar).
PolySymbol conjugate(const PolySymbol& s);

/// True iff every coefficient c(kstar,k) equals conj(c(k,kstar)) within tol.
bool is_real(const PolySymbol& s, double tol = 1e-12);

/// Sum_i d^2/(d conj(alpha_i) d alpha_i), applied term by term.
PolySymbol gross_laplacian(const PolySymbol& s);
/// exp(Delta) A as the finite series sum_m Delta^m A / m!.
PolySymbol wick_from_antinormal(const PolySymbol& a);
/// exp(-Delta) W, the exact inverse of wick_from_antinormal.
PolySymbol antinormal_from_wick(const PolySymbol& w);

/// Drops every term touching a mode with 0-based index >= n. The result is
/// still declared over s.modes() modes. Requires n <= s.modes().
PolySymbol restrict_symbol(const PolySymbol& s, std::size_t n);
/// Re-declares a symbol over its first n modes. Every term must already
/// avoid modes >= n (use restrict_symbol first).
PolySymbol truncate_modes(const PolySymbol& s, std::size_t n);

/// Uniform polar sampling of each mode: radial_count radii evenly spaced on
/// [0, radius] (both ends included) times angular_count angles.
struct PolarGrid {
  double radius = 3.0;
  int radial_count = 31;
  int angular_count = 48;
};

/// Minimum of Re eval(s, .) over the tensor polar grid. This is a heuristic
/// and only an upper bound on the true infimum. Throws if s is not real.
double infimum_estimate(const PolySymbol& s, const PolarGrid& grid);

}  // namespace fockprop
