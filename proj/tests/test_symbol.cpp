#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

#include "fockprop/benchmarks.hpp"
#include "fockprop/errors.hpp"
#include "fockprop/symbol.hpp"

using namespace fockprop;

namespace {

// |alpha|^{2p} on one mode: conj(alpha)^p alpha^p.
PolySymbol radial(int p, Complex c = 1.0) { return PolySymbol::monomial(1, {p}, {p}, c); }

PolySymbol two_mode(std::vector<int> kstar, std::vector<int> k, Complex c = 1.0) {
  return PolySymbol::monomial(2, std::move(kstar), std::move(k), c);
}

}  // namespace

TEST(PolySymbol, EvalConstantIsConstant) {
  const PolySymbol one = PolySymbol::constant(1, 1.0);
  const std::array<Complex, 1> z{Complex(0.7, -3.0)};
  EXPECT_EQ(eval(one, z), Complex(1.0));
}

TEST(PolySymbol, EvalNumberSymbolAtTwo) {
  const std::array<Complex, 1> z{Complex(2.0, 0.0)};
  EXPECT_EQ(eval(radial(1), z), Complex(4.0));
}

TEST(PolySymbol, EvalQuarticAtOnePlusI) {
  const std::array<Complex, 1> z{Complex(1.0, 1.0)};
  const Complex value = eval(radial(2), z);
  EXPECT_NEAR(value.real(), 4.0, 1e-15);
  EXPECT_NEAR(value.imag(), 0.0, 1e-15);
}

TEST(PolySymbol, EvalRejectsWrongPointLength) {
  const std::array<Complex, 2> z{Complex(1.0), Complex(2.0)};
  EXPECT_THROW(eval(radial(1), z), DimensionError);
}

TEST(PolySymbol, ConstructionMergesAndDropsZeros) {
  const MultiIndexPair index{{1}, {0}};
  const PolySymbol s(1, {{index, 2.0}, {index, -2.0}, {{{0}, {1}}, 3.0}});
  EXPECT_EQ(s.size(), 1u);
  EXPECT_EQ(s.coefficient({{0}, {1}}), Complex(3.0));
  EXPECT_THROW(PolySymbol(0), std::invalid_argument);
  EXPECT_THROW(PolySymbol(2, {{index, 1.0}}), DimensionError);
}

TEST(PolySymbol, TermsAreGradedLexicographic) {
  const PolySymbol s = radial(2) + PolySymbol::alpha(1, 0) + PolySymbol::constant(1, 5.0) + radial(1);
  int previous = -1;
  for (const auto& [index, value] : s.terms()) {
    EXPECT_GE(index.degree(), previous);
    previous = index.degree();
  }
  EXPECT_EQ(s.degree(), 4);
  EXPECT_EQ(PolySymbol(3).degree(), -1);
}

TEST(PolySymbol, RealityExamples) {
  EXPECT_TRUE(is_real(radial(1)));
  EXPECT_FALSE(is_real(PolySymbol::alpha(1, 0)));
  const PolySymbol s = radial(2) + (PolySymbol::alpha_star(1, 0) + PolySymbol::alpha(1, 0)) * 3.0;
  EXPECT_TRUE(is_real(s));
  EXPECT_FALSE(is_real(radial(1, Complex(0.0, 1.0))));
}

TEST(PolySymbol, ConjugateSymbolEvaluatesToConjugate) {
  std::mt19937_64 rng(3);
  const PolySymbol s = random_symbol(rng, 2, 5, 8);
  const std::array<Complex, 2> z{Complex(0.3, -0.4), Complex(-0.2, 0.9)};
  EXPECT_NEAR(std::abs(eval(conjugate(s), z) - std::conj(eval(s, z))), 0.0, 1e-13);
  EXPECT_TRUE(is_real(s + conjugate(s)));
}

TEST(GrossLaplacian, Examples) {
  EXPECT_EQ(gross_laplacian(radial(1)).max_coefficient_distance(PolySymbol::constant(1, 1.0)), 0.0);
  EXPECT_EQ(gross_laplacian(radial(2)).max_coefficient_distance(radial(1, 4.0)), 0.0);
  EXPECT_TRUE(gross_laplacian(PolySymbol::constant(2, 7.0)).is_zero());
  // Mixed-mode terms have no diagonal pair and are annihilated.
  EXPECT_TRUE(gross_laplacian(two_mode({1, 0}, {0, 1})).is_zero());
}

TEST(GrossLaplacian, AgreesWithFiniteDifferences) {
  // Delta = sum_i d^2/(d conj(a_i) d a_i) = 1/4 sum_i (d_x^2 + d_y^2) with a = x + iy.
  // The 9-point stencil is exact for the polynomial degrees used here.
  constexpr std::array<double, 9> stencil{-1.0 / 560, 8.0 / 315, -1.0 / 5, 8.0 / 5, -205.0 / 72,
                                          8.0 / 5,    -1.0 / 5,  8.0 / 315, -1.0 / 560};
  constexpr double h = 0.25;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coordinate(-0.8, 0.8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t modes = 1 + trial % 3;
    const PolySymbol s = random_symbol(rng, modes, 6, 8);
    const PolySymbol delta = gross_laplacian(s);
    PhasePoint z(modes);
    for (Complex& c : z) c = {coordinate(rng), coordinate(rng)};

    Complex numeric = 0.0;
    for (std::size_t i = 0; i < modes; ++i) {
      for (Complex direction : {Complex(1.0, 0.0), Complex(0.0, 1.0)}) {
        Complex second = 0.0;
        for (int k = -4; k <= 4; ++k) {
          PhasePoint shifted = z;
          shifted[i] += direction * (h * k);
          second += stencil[static_cast<std::size_t>(k + 4)] * eval(s, shifted);
        }
        numeric += 0.25 * second / (h * h);
      }
    }
    const Complex exact = eval(delta, z);
    EXPECT_NEAR(std::abs(numeric - exact), 0.0, 1e-8 * std::max(1.0, std::abs(exact))) << "trial " << trial;
  }
}

TEST(Conversion, WickFromAntinormalExamples) {
  const PolySymbol one = PolySymbol::constant(1, 1.0);
  EXPECT_EQ(wick_from_antinormal(radial(1)).max_coefficient_distance(radial(1) + one), 0.0);
  EXPECT_EQ(wick_from_antinormal(one).max_coefficient_distance(one), 0.0);
  EXPECT_EQ(wick_from_antinormal(radial(2)).max_coefficient_distance(radial(2) + radial(1, 4.0) + one * 2.0), 0.0);
}

TEST(Conversion, AntinormalFromWickExamples) {
  const PolySymbol one = PolySymbol::constant(1, 1.0);
  EXPECT_EQ(antinormal_from_wick(radial(1)).max_coefficient_distance(radial(1) - one), 0.0);
  EXPECT_EQ(antinormal_from_wick(radial(2)).max_coefficient_distance(radial(2) - radial(1, 4.0) + one * 2.0), 0.0);
}

TEST(Conversion, RoundTripOnRandomSymbols) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t modes = 1 + trial % 3;
    const PolySymbol a = random_symbol(rng, modes, 8, 10);
    EXPECT_LE(antinormal_from_wick(wick_from_antinormal(a)).max_coefficient_distance(a), 1e-12);
    EXPECT_LE(wick_from_antinormal(antinormal_from_wick(a)).max_coefficient_distance(a), 1e-12);
  }
}

TEST(Conversion, DegreeLawAndReality) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t modes = 1 + trial % 3;
    const PolySymbol a = random_symbol(rng, modes, 8, 6);
    const PolySymbol w = wick_from_antinormal(a);
    EXPECT_EQ(w.degree(), a.degree());
    const PolySymbol difference = w - a;
    if (!difference.is_zero()) EXPECT_LE(difference.degree(), a.degree() - 2);
    const PolySymbol real = a + conjugate(a);
    EXPECT_TRUE(is_real(wick_from_antinormal(real)));
    EXPECT_TRUE(is_real(antinormal_from_wick(real)));
  }
}

TEST(Conversion, IsLinear) {
  std::mt19937_64 rng(5);
  const PolySymbol a = random_symbol(rng, 2, 6, 6);
  const PolySymbol b = random_symbol(rng, 2, 6, 6);
  const Complex c(0.3, -1.2);
  const PolySymbol lhs = wick_from_antinormal(a + b * c);
  const PolySymbol rhs = wick_from_antinormal(a) + wick_from_antinormal(b) * c;
  EXPECT_LE(lhs.max_coefficient_distance(rhs), 1e-12);
}

TEST(Restriction, Examples) {
  const PolySymbol both = two_mode({1, 0}, {1, 0}) + two_mode({0, 1}, {0, 1});
  EXPECT_EQ(restrict_symbol(both, 1).max_coefficient_distance(two_mode({1, 0}, {1, 0})), 0.0);
  EXPECT_EQ(restrict_symbol(both, 2).max_coefficient_distance(both), 0.0);
  const PolySymbol hopping = two_mode({1, 0}, {0, 1}) + two_mode({0, 1}, {1, 0});
  EXPECT_TRUE(restrict_symbol(hopping, 1).is_zero());
  EXPECT_THROW(restrict_symbol(both, 3), std::out_of_range);
}

TEST(Restriction, EqualsEvaluationWithZeroedModes) {
  std::mt19937_64 rng(13);
  const PolySymbol s = random_symbol(rng, 3, 6, 12);
  const PhasePoint z{Complex(0.4, 0.1), Complex(-0.3, 0.7), Complex(0.2, -0.5)};
  for (std::size_t n = 0; n <= 3; ++n) {
    PhasePoint zeroed = z;
    for (std::size_t i = n; i < 3; ++i) zeroed[i] = 0.0;
    EXPECT_EQ(eval(restrict_symbol(s, n), z), eval(s, zeroed)) << "n = " << n;
  }
}

TEST(Restriction, TruncateModesRedeclares) {
  const PolySymbol s = two_mode({1, 0}, {1, 0}, 2.0) + two_mode({0, 1}, {0, 1});
  const PolySymbol one = truncate_modes(restrict_symbol(s, 1), 1);
  EXPECT_EQ(one.modes(), 1u);
  EXPECT_EQ(one.max_coefficient_distance(radial(1, 2.0)), 0.0);
  EXPECT_THROW(truncate_modes(s, 1), DimensionError);
}

TEST(Infimum, Examples) {
  const PolarGrid grid{2.0, 21, 36};
  EXPECT_EQ(infimum_estimate(radial(1), grid), 0.0);
  const PolySymbol one = PolySymbol::constant(1, 1.0);
  const PolySymbol well = (radial(1) - one).pow(2);
  EXPECT_NEAR(infimum_estimate(well, grid), 0.0, 1e-14);  // radius 1 is on the grid
  EXPECT_EQ(infimum_estimate(radial(1) + one * 5.0, grid), 5.0);
  EXPECT_THROW(infimum_estimate(PolySymbol::alpha(1, 0), grid), std::domain_error);
}

TEST(Benchmarks, AreReal) {
  EXPECT_TRUE(is_real(quartic_oscillator()));
  EXPECT_TRUE(is_real(galerkin_benchmark()));
  EXPECT_EQ(galerkin_benchmark().modes(), 4u);
  EXPECT_EQ(galerkin_benchmark().degree(), 4);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10; ++i) EXPECT_TRUE(is_real(random_bounded_real_symbol(rng, 1, 4, 6)));
}

TEST(Benchmarks, QuarticOscillatorMatchesDefinition) {
  const PolySymbol x = PolySymbol::alpha_star(1, 0) + PolySymbol::alpha(1, 0);
  const PolySymbol expected = radial(1) + x.pow(4) * 0.1;
  EXPECT_LE(quartic_oscillator(0.1).max_coefficient_distance(expected), 1e-15);
}

TEST(Benchmarks, ContainmentRadiusBoundsTheMinimiser) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const PolySymbol s = random_bounded_real_symbol(rng, 1, 4, 6);
    const double radius = containment_radius(s);
    const double origin = eval(s, std::array<Complex, 1>{Complex(0.0)}).real();
    for (double r : {radius, 1.5 * radius, 3.0 * radius}) {
      for (int a = 0; a < 16; ++a) {
        const std::array<Complex, 1> z{std::polar(r, 2.0 * M_PI * a / 16)};
        EXPECT_GE(eval(s, z).real(), origin);
      }
    }
  }
}
