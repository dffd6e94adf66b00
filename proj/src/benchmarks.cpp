#include "fockprop/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fockprop {

namespace {

// Random exponent pair with total degree exactly `degree`.
MultiIndexPair random_index(std::mt19937_64& rng, std::size_t modes, int degree) {
  MultiIndexPair index{std::vector<int>(modes, 0), std::vector<int>(modes, 0)};
  std::uniform_int_distribution<std::size_t> slot(0, 2 * modes - 1);
  for (int e = 0; e < degree; ++e) {
    const std::size_t s = slot(rng);
    if (s < modes) {
      ++index.kstar[s];
    } else {
      ++index.k[s - modes];
    }
  }
  return index;
}

}  // namespace

PolySymbol quartic_coupling(const std::vector<double>& weights) {
  const std::size_t d = weights.size();
  PolySymbol field(d);
  for (std::size_t i = 0; i < d; ++i) {
    field = field + (PolySymbol::alpha_star(d, i) + PolySymbol::alpha(d, i)) * weights[i];
  }
  return field.pow(4);
}

PolySymbol quartic_oscillator(double coupling) {
  return PolySymbol::monomial(1, {1}, {1}) + quartic_coupling({1.0}) * coupling;
}

PolySymbol galerkin_benchmark(std::size_t d_max, double lambda, double omega) {
  std::vector<double> weights(d_max);
  PolySymbol free(d_max);
  for (std::size_t i = 0; i < d_max; ++i) {
    weights[i] = 1.0 / static_cast<double>(i + 1);
    free = free + PolySymbol::alpha_star(d_max, i) * PolySymbol::alpha(d_max, i) * omega;
  }
  return free + quartic_coupling(weights) * lambda;
}

PolySymbol random_symbol(std::mt19937_64& rng, std::size_t modes, int max_degree, int terms) {
  std::uniform_int_distribution<int> degree(0, max_degree);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::vector<std::pair<MultiIndexPair, Complex>> out;
  for (int t = 0; t < terms; ++t) {
    MultiIndexPair index = random_index(rng, modes, degree(rng));
    const double re = coeff(rng);
    const double im = coeff(rng);
    out.emplace_back(std::move(index), Complex(re, im));
  }
  return PolySymbol(modes, out);
}

PolySymbol random_bounded_real_symbol(std::mt19937_64& rng, std::size_t modes, int max_degree,
                                      int extra_terms, double spread) {
  if (max_degree < 2 || max_degree % 2 != 0) {
    throw std::invalid_argument("bounded real symbols need an even degree >= 2");
  }
  std::uniform_real_distribution<double> lead(0.5, 1.5);
  std::uniform_int_distribution<int> degree(0, max_degree - 1);
  std::uniform_real_distribution<double> coeff(-spread, spread);

  PolySymbol radius_squared(modes);
  for (std::size_t i = 0; i < modes; ++i) {
    radius_squared = radius_squared + PolySymbol::alpha_star(modes, i) * PolySymbol::alpha(modes, i);
  }
  PolySymbol s = radius_squared.pow(max_degree / 2) * lead(rng);
  for (int t = 0; t < extra_terms; ++t) {
    MultiIndexPair index = random_index(rng, modes, degree(rng));
    const double re = coeff(rng);
    const double im = coeff(rng);
    const Complex c(re, im);
    if (index == index.conjugate()) {
      s = s + PolySymbol(modes, {{index, Complex(2.0 * c.real())}});
    } else {
      s = s + PolySymbol(modes, {{index.conjugate(), std::conj(c)}, {index, c}});
    }
  }
  return s;
}

double containment_radius(const PolySymbol& s) {
  const int top = s.degree();
  double lower = 0.0;
  for (const auto& [index, value] : s.terms()) {
    if (index.degree() < top) lower += std::abs(value);
  }
  std::vector<int> corner(s.modes(), 0);
  corner[0] = top / 2;
  const double lead = std::abs(s.coefficient({corner, corner}));
  if (lead == 0.0) throw std::invalid_argument("symbol has no leading |alpha_1|^deg term");
  return 2.0 + 2.0 * lower / lead;
}

}  // namespace fockprop
