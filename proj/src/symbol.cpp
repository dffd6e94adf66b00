#include "fockprop/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fockprop/errors.hpp"

namespace fockprop {

namespace {

int sum_of(const std::vector<int>& v) {
  int total = 0;
  for (int e : v) total += e;
  return total;
}

Complex ipow(Complex base, int exponent) {
  Complex result = 1.0;
  for (int e = 0; e < exponent; ++e) result *= base;
  return result;
}

void check_index(const MultiIndexPair& index, std::size_t modes) {
  if (index.kstar.size() != modes || index.k.size() != modes) {
    throw DimensionError("multi-index length " + std::to_string(index.k.size()) + "/" +
                         std::to_string(index.kstar.size()) + " does not match " +
                         std::to_string(modes) + " modes");
  }
  for (std::size_t i = 0; i < modes; ++i) {
    if (index.kstar[i] < 0 || index.k[i] < 0) {
      throw std::invalid_argument("multi-index exponents must be non-negative");
    }
  }
}

void accumulate(PolySymbol::TermMap& terms, const MultiIndexPair& index, Complex value) {
  auto [it, inserted] = terms.try_emplace(index, value);
  if (!inserted) it->second += value;
  if (it->second == Complex(0.0)) terms.erase(it);
}

}  // namespace

int MultiIndexPair::degree() const { return sum_of(kstar) + sum_of(k); }

bool MultiIndexPair::touches_mode_at_or_above(std::size_t n) const {
  for (std::size_t i = n; i < k.size(); ++i) {
    if (k[i] != 0 || kstar[i] != 0) return true;
  }
  return false;
}

bool GradedLexLess::operator()(const MultiIndexPair& lhs, const MultiIndexPair& rhs) const {
  const int dl = lhs.degree();
  const int dr = rhs.degree();
  if (dl != dr) return dl < dr;
  if (lhs.kstar != rhs.kstar) return lhs.kstar < rhs.kstar;
  return lhs.k < rhs.k;
}

PolySymbol::PolySymbol(std::size_t modes) : modes_(modes) {
  if (modes == 0) throw std::invalid_argument("symbol needs at least one mode");
}

PolySymbol::PolySymbol(std::size_t modes,
                       const std::vector<std::pair<MultiIndexPair, Complex>>& terms)
    : PolySymbol(modes) {
  for (const auto& [index, value] : terms) {
    check_index(index, modes_);
    accumulate(terms_, index, value);
  }
}

PolySymbol PolySymbol::constant(std::size_t modes, Complex value) {
  std::vector<int> zero(modes, 0);
  return PolySymbol(modes, {{{zero, zero}, value}});
}

PolySymbol PolySymbol::monomial(std::size_t modes, std::vector<int> kstar, std::vector<int> k,
                                Complex coefficient) {
  return PolySymbol(modes, {{{std::move(kstar), std::move(k)}, coefficient}});
}

PolySymbol PolySymbol::alpha_star(std::size_t modes, std::size_t mode) {
  if (mode >= modes) throw DimensionError("mode index out of range");
  std::vector<int> kstar(modes, 0);
  kstar[mode] = 1;
  return monomial(modes, std::move(kstar), std::vector<int>(modes, 0));
}

PolySymbol PolySymbol::alpha(std::size_t modes, std::size_t mode) {
  if (mode >= modes) throw DimensionError("mode index out of range");
  std::vector<int> k(modes, 0);
  k[mode] = 1;
  return monomial(modes, std::vector<int>(modes, 0), std::move(k));
}

int PolySymbol::degree() const {
  // The map is graded, so the last key carries the maximal degree.
  return terms_.empty() ? -1 : terms_.rbegin()->first.degree();
}

Complex PolySymbol::coefficient(const MultiIndexPair& index) const {
  auto it = terms_.find(index);
  return it == terms_.end() ? Complex(0.0) : it->second;
}

void PolySymbol::check_same_modes(const PolySymbol& other) const {
  if (other.modes_ != modes_) {
    throw DimensionError("symbols over " + std::to_string(modes_) + " and " +
                         std::to_string(other.modes_) + " modes cannot be combined");
  }
}

PolySymbol PolySymbol::operator+(const PolySymbol& other) const {
  check_same_modes(other);
  PolySymbol result = *this;
  for (const auto& [index, value] : other.terms_) accumulate(result.terms_, index, value);
  return result;
}

PolySymbol PolySymbol::operator-(const PolySymbol& other) const { return *this + other * -1.0; }

PolySymbol PolySymbol::operator*(Complex scale) const {
  PolySymbol result(modes_);
  if (scale == Complex(0.0)) return result;
  for (const auto& [index, value] : terms_) accumulate(result.terms_, index, value * scale);
  return result;
}

PolySymbol PolySymbol::operator*(const PolySymbol& other) const {
  check_same_modes(other);
  PolySymbol result(modes_);
  MultiIndexPair product{std::vector<int>(modes_), std::vector<int>(modes_)};
  for (const auto& [li, lv] : terms_) {
    for (const auto& [ri, rv] : other.terms_) {
      for (std::size_t i = 0; i < modes_; ++i) {
        product.kstar[i] = li.kstar[i] + ri.kstar[i];
        product.k[i] = li.k[i] + ri.k[i];
      }
      accumulate(result.terms_, product, lv * rv);
    }
  }
  return result;
}

PolySymbol PolySymbol::pow(int exponent) const {
  if (exponent < 0) throw std::invalid_argument("negative symbol power");
  PolySymbol result = constant(modes_, 1.0);
  for (int e = 0; e < exponent; ++e) result = result * *this;
  return result;
}

double PolySymbol::max_coefficient_distance(const PolySymbol& other) const {
  check_same_modes(other);
  double distance = 0.0;
  for (const auto& [index, value] : terms_) {
    distance = std::max(distance, std::abs(value - other.coefficient(index)));
  }
  for (const auto& [index, value] : other.terms_) {
    if (!terms_.contains(index)) distance = std::max(distance, std::abs(value));
  }
  return distance;
}

Complex eval_mixed(const PolySymbol& s, std::span<const Complex> left,
                   std::span<const Complex> right) {
  if (left.size() != s.modes() || right.size() != s.modes()) {
    throw DimensionError("phase point has " + std::to_string(left.size()) +
                         " components, symbol has " + std::to_string(s.modes()) + " modes");
  }
  Complex total = 0.0;
  for (const auto& [index, value] : s.terms()) {
    Complex term = value;
    for (std::size_t i = 0; i < s.modes(); ++i) {
      term *= ipow(std::conj(left[i]), index.kstar[i]) * ipow(right[i], index.k[i]);
    }
    total += term;
  }
  return total;
}

Complex eval(const PolySymbol& s, std::span<const Complex> z) { return eval_mixed(s, z, z); }

PolySymbol conjugate(const PolySymbol& s) {
  std::vector<std::pair<MultiIndexPair, Complex>> out;
  for (const auto& [index, value] : s.terms()) out.emplace_back(index.conjugate(), std::conj(value));
  return PolySymbol(s.modes(), out);
}

bool is_real(const PolySymbol& s, double tol) {
  for (const auto& [index, value] : s.terms()) {
    if (std::abs(value - std::conj(s.coefficient(index.conjugate()))) > tol) return false;
  }
  return true;
}

PolySymbol gross_laplacian(const PolySymbol& s) {
  std::vector<std::pair<MultiIndexPair, Complex>> out;
  for (const auto& [index, value] : s.terms()) {
    for (std::size_t i = 0; i < s.modes(); ++i) {
      if (index.kstar[i] == 0 || index.k[i] == 0) continue;
      MultiIndexPair lowered = index;
      --lowered.kstar[i];
      --lowered.k[i];
      out.emplace_back(std::move(lowered),
                       value * static_cast<double>(index.kstar[i] * index.k[i]));
    }
  }
  return PolySymbol(s.modes(), out);
}

namespace {

PolySymbol heat_series(const PolySymbol& s, double sign) {
  PolySymbol result = s;
  PolySymbol power = s;
  double factor = 1.0;
  for (int m = 1;; ++m) {
    power = gross_laplacian(power);
    if (power.is_zero()) break;
    factor *= sign / m;
    result = result + power * factor;
  }
  return result;
}

}  // namespace

PolySymbol wick_from_antinormal(const PolySymbol& a) { return heat_series(a, 1.0); }

PolySymbol antinormal_from_wick(const PolySymbol& w) { return heat_series(w, -1.0); }

PolySymbol restrict_symbol(const PolySymbol& s, std::size_t n) {
  if (n > s.modes()) {
    throw std::out_of_range("restriction to " + std::to_string(n) + " of " +
                            std::to_string(s.modes()) + " modes");
  }
  std::vector<std::pair<MultiIndexPair, Complex>> kept;
  for (const auto& [index, value] : s.terms()) {
    if (!index.touches_mode_at_or_above(n)) kept.emplace_back(index, value);
  }
  return PolySymbol(s.modes(), kept);
}

PolySymbol truncate_modes(const PolySymbol& s, std::size_t n) {
  if (n == 0 || n > s.modes()) throw std::out_of_range("cannot re-declare symbol over that many modes");
  std::vector<std::pair<MultiIndexPair, Complex>> kept;
  for (const auto& [index, value] : s.terms()) {
    if (index.touches_mode_at_or_above(n)) {
      throw DimensionError("symbol term touches a mode beyond the first " + std::to_string(n));
    }
    kept.push_back({{std::vector<int>(index.kstar.begin(), index.kstar.begin() + n),
                     std::vector<int>(index.k.begin(), index.k.begin() + n)},
                    value});
  }
  return PolySymbol(n, kept);
}

double infimum_estimate(const PolySymbol& s, const PolarGrid& grid) {
  if (!is_real(s)) throw std::domain_error("infimum_estimate requires a real symbol");
  if (grid.radius < 0.0 || grid.radial_count < 1 || grid.angular_count < 1) {
    throw std::invalid_argument("invalid polar grid");
  }

  // Per-mode samples: the origin once, then each non-zero radius at every angle.
  std::vector<Complex> samples{Complex(0.0)};
  for (int r = 1; r < grid.radial_count; ++r) {
    const double radius = grid.radius * r / (grid.radial_count - 1);
    for (int a = 0; a < grid.angular_count; ++a) {
      samples.push_back(std::polar(radius, 2.0 * std::numbers::pi * a / grid.angular_count));
    }
  }

  const std::size_t d = s.modes();
  std::vector<std::size_t> digit(d, 0);
  PhasePoint z(d, samples[0]);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    best = std::min(best, eval(s, z).real());
    std::size_t i = 0;
    for (; i < d; ++i) {
      if (++digit[i] < samples.size()) {
        z[i] = samples[digit[i]];
        break;
      }
      digit[i] = 0;
      z[i] = samples[0];
    }
    if (i == d) break;
  }
  return best;
}

}  // namespace fockprop
