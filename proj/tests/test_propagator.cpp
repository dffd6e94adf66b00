#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fockprop/benchmarks.hpp"
#include "fockprop/errors.hpp"
#include "fockprop/propagator.hpp"
#include "fockprop/quantizer.hpp"

using namespace fockprop;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

const PolySymbol kNumber = PolySymbol::monomial(1, {1}, {1});

ProbePair standard_probe() { return {{Complex(0.5, 0.0)}, {Complex(0.3, 0.2)}}; }

}  // namespace

TEST(SliceSchedule, StoresConsistentStep) {
  const SliceSchedule s(0.5, 64);
  EXPECT_EQ(s.slices(), 64);
  EXPECT_EQ(s.tau() * s.slices(), s.total_time());
  EXPECT_DOUBLE_EQ(s.total_time(), 0.5);
  EXPECT_THROW(SliceSchedule(0.5, 0), std::invalid_argument);
  EXPECT_THROW(SliceSchedule(std::nan(""), 4), std::invalid_argument);
}

TEST(ExactEvolution, ZeroTimeIsIdentity) {
  const BasisPtr basis = enumerate_basis(2, 4);
  const OperatorMatrix h = antiwick_quantize_poly(basis, galerkin_benchmark(2));
  EXPECT_LE(max_abs(exact_evolution(h, 0.0).entries() - identity(basis).entries()), 1e-12);
}

TEST(ExactEvolution, NumberOperatorIsDiagonalPhase) {
  const BasisPtr basis = enumerate_basis(1, 6);
  const double t = 1.7;
  const Eigen::MatrixXcd u = exact_evolution(number_operator(basis), t).entries();
  for (int n = 0; n <= 6; ++n) {
    for (int m = 0; m <= 6; ++m) {
      const Complex expected = n == m ? std::exp(Complex(0.0, -n * t)) : Complex(0.0);
      EXPECT_LE(std::abs(u(n, m) - expected), 1e-12);
    }
  }
}

TEST(ExactEvolution, GroupLawAndUnitarity) {
  const BasisPtr basis = enumerate_basis(2, 6);
  const OperatorMatrix h = antiwick_quantize_poly(basis, galerkin_benchmark(2, 0.1));
  const SpectralPropagator propagator(h);
  for (double t1 : {0.1, 0.9, 3.0}) {
    for (double t2 : {0.25, 1.5}) {
      const Eigen::MatrixXcd lhs = propagator.evolve(t1).entries() * propagator.evolve(t2).entries();
      EXPECT_LE(max_abs(lhs - propagator.evolve(t1 + t2).entries()), 1e-9);
    }
    EXPECT_LE(unitarity_defect(propagator.evolve(t1)), 1e-10);
  }
  Eigen::VectorXcd state = Eigen::VectorXcd::Zero(basis->size());
  state(3) = 1.0;
  EXPECT_LE((propagator.apply(0.6, state) - propagator.evolve(0.6).entries() * state).norm(), 1e-12);
}

TEST(ExactEvolution, RejectsNonHermitian) {
  const BasisPtr basis = enumerate_basis(1, 3);
  EXPECT_THROW(exact_evolution(annihilator(basis, 0), 1.0), std::domain_error);
}

TEST(Chernoff, SingleZeroTimeSliceIsIdentity) {
  const BasisPtr basis = enumerate_basis(1, 8);
  const QuadratureRule rule(1, 10);
  const OperatorMatrix u = chernoff_propagator(quartic_oscillator(), SliceSchedule(0.0, 1), basis, rule);
  EXPECT_LE(max_abs(u.entries() - identity(basis).entries()), 1e-8);
}

TEST(Chernoff, RequirementsAreChecked) {
  const BasisPtr basis = enumerate_basis(1, 8);
  EXPECT_THROW(chernoff_propagator(kNumber, SliceSchedule(1.0, 4), basis, QuadratureRule(1, 8)), std::invalid_argument);
  EXPECT_THROW(chernoff_slice(PolySymbol::alpha(1, 0), 0.1, basis, QuadratureRule(1, 10)), std::domain_error);
}

TEST(Chernoff, SliceAdjointReversesTime) {
  const BasisPtr basis = enumerate_basis(2, 4);
  const QuadratureRule rule(2, 6);
  const PolySymbol a = galerkin_benchmark(2, 0.1);
  const OperatorMatrix forward = chernoff_slice(a, 0.2, basis, rule);
  const OperatorMatrix backward = chernoff_slice(a, -0.2, basis, rule);
  EXPECT_LE(max_abs(forward.adjoint().entries() - backward.entries()), 1e-8);
}

TEST(Chernoff, ProductsAreContractions) {
  const BasisPtr basis = enumerate_basis(1, 10);
  const QuadratureRule rule(1, 12);
  for (int N : {1, 4, 32}) {
    EXPECT_LE(spectral_norm(chernoff_propagator(quartic_oscillator(), SliceSchedule(0.5, N), basis, rule)), 1.0 + 1e-6);
  }
}

TEST(Chernoff, MatrixPowerMatchesRepeatedProduct) {
  const BasisPtr basis = enumerate_basis(1, 5);
  const OperatorMatrix slice = chernoff_slice(quartic_oscillator(), 0.05, basis, QuadratureRule(1, 7));
  Eigen::MatrixXcd repeated = Eigen::MatrixXcd::Identity(6, 6);
  for (int i = 0; i < 13; ++i) repeated = repeated * slice.entries();
  EXPECT_LE(max_abs(matrix_power(slice, 13).entries() - repeated), 1e-13);
  EXPECT_LE(max_abs(matrix_power(slice, 0).entries() - identity(basis).entries()), 0.0);
}

TEST(Chernoff, QuadraticCaseApproachesClosedForm) {
  // a = |alpha|^2 quantizes to a^+a + 1, so <F_alpha, e^{-iHt} F_beta> = e^{-it} exp(conj(alpha) e^{-it} beta).
  const BasisPtr basis = enumerate_basis(1, 8);
  const QuadratureRule rule(1, 10);
  const ProbePair probe = standard_probe();
  const double t = 0.5;
  const Complex closed = std::exp(Complex(0.0, -t)) * std::exp(std::conj(probe.alpha[0]) * std::exp(Complex(0.0, -t)) * probe.beta[0]);
  auto error = [&](int N) {
    const Complex value = coherent_matrix_element(chernoff_propagator(kNumber, SliceSchedule(t, N), basis, rule), probe.alpha, probe.beta);
    return std::abs(value - closed);
  };
  const double e8 = error(8);
  const double e64 = error(64);
  EXPECT_LE(e64, e8 / 4.0);
  // Frozen measurement of this implementation.
  EXPECT_NEAR(e8, 0.021807484976198933, 1e-9);
  EXPECT_NEAR(e64, 0.0027536900752666437, 1e-9);
}

TEST(Chernoff, ConstantSymbolIsAPhase) {
  const BasisPtr basis = enumerate_basis(1, 25);
  const QuadratureRule rule(1, 27);
  const double c = 1.3;
  const double t = 0.8;
  const ProbePair probe = standard_probe();
  const std::vector<int> Ns{1, 3, 10};
  const auto records = feynman_convergence_table(PolySymbol::constant(1, c), t, Ns, probe, basis, rule);
  const Complex expected = std::exp(std::conj(probe.alpha[0]) * probe.beta[0]) * std::exp(Complex(0.0, -c * t));
  for (const auto& r : records) EXPECT_LE(std::abs(r.value - expected), 1e-8) << "N=" << r.parameter;
}

TEST(Chernoff, QuarticHalvingRatios) {
  const BasisPtr basis = enumerate_basis(1, 10);
  const QuadratureRule rule(1, 12);
  const std::vector<int> Ns{8, 16, 32, 64, 128};
  std::vector<double> norms;
  const auto records = feynman_convergence_table(quartic_oscillator(0.1), 0.5, Ns, standard_probe(), basis, rule,
                                                 {nullptr, &norms});
  ASSERT_EQ(records.size(), Ns.size());
  for (double ratio : halving_ratios(records)) {
    EXPECT_GE(ratio, 1.6);
    EXPECT_LE(ratio, 2.4);
  }
  for (std::size_t i = 1; i < records.size(); ++i) {
    EXPECT_LE(records[i].abs_error, 1.1 * records[i - 1].abs_error);
    EXPECT_EQ(records[i].parameter, Ns[i]);
  }
  for (double n : norms) EXPECT_LE(n, 1.0 + 1e-6);
  // Frozen measurements; also reproduced by an independent numpy prototype to ~3 digits.
  EXPECT_NEAR(records.front().abs_error, 0.12451050360058311, 1e-9);
  EXPECT_NEAR(records.back().abs_error, 0.0099017522670573396, 1e-9);
}

TEST(Chernoff, TableEdgeCases) {
  const BasisPtr basis = enumerate_basis(1, 10);
  const QuadratureRule rule(1, 12);
  EXPECT_TRUE(feynman_convergence_table(kNumber, 0.5, {}, standard_probe(), basis, rule).empty());
  const std::vector<int> descending{16, 8};
  EXPECT_THROW(feynman_convergence_table(kNumber, 0.5, descending, standard_probe(), basis, rule), std::invalid_argument);
}

TEST(CoherentElement, IdentityAndLadder) {
  const BasisPtr basis = enumerate_basis(1, 25);
  const std::vector<Complex> zero{0.0};
  EXPECT_EQ(coherent_matrix_element(identity(basis), zero, zero), Complex(1.0));
  const std::vector<Complex> a{Complex(0.7, -0.4)};
  const std::vector<Complex> b{Complex(-0.2, 1.1)};
  const Complex kernel = std::exp(std::conj(a[0]) * b[0]);
  EXPECT_LE(std::abs(coherent_matrix_element(identity(basis), a, b) - kernel), 1e-10);
  EXPECT_LE(std::abs(coherent_matrix_element(creator(basis, 0), a, b) - std::conj(a[0]) * kernel), 1e-10);
  EXPECT_LE(std::abs(coherent_matrix_element(annihilator(basis, 0), a, b) - b[0] * kernel), 1e-10);
}

TEST(CoherentElement, TruncationRaisesWithHint) {
  const BasisPtr basis = enumerate_basis(1, 6);
  const std::vector<Complex> a{Complex(1.5, 0.0)};
  try {
    coherent_matrix_element(identity(basis), a, a);
    FAIL() << "expected TruncationError";
  } catch (const TruncationError& e) {
    EXPECT_EQ(e.required_quanta(), required_quanta(a, 1e-10));
    EXPECT_GT(e.required_quanta(), 6);
  }
}
