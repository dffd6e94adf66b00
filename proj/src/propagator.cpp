#include "fockprop/propagator.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fockprop/errors.hpp"
#include "fockprop/parallel.hpp"
#include "fockprop/quantizer.hpp"

namespace fockprop {

SliceSchedule::SliceSchedule(double total_time, int slices) : slices_(slices) {
  if (slices < 1) throw std::invalid_argument("slice count must be >= 1");
  if (!std::isfinite(total_time)) throw std::invalid_argument("total time must be finite");
  tau_ = total_time / slices;
}

SpectralPropagator::SpectralPropagator(const OperatorMatrix& h) : basis_(h.basis()) {
  if (!h.hermitian()) {
    throw std::domain_error("exact evolution needs a Hermitian operator (defect " +
                            std::to_string(h.hermitian_defect()) + ")");
  }
  const Eigen::MatrixXcd symmetric = 0.5 * (h.entries() + h.entries().adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(symmetric);
  if (solver.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

OperatorMatrix SpectralPropagator::evolve(double t) const {
  const Eigen::VectorXcd phases =
      (eigenvalues_.cast<Complex>() * Complex(0.0, -t)).array().exp().matrix();
  return {basis_, eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint()};
}

Eigen::VectorXcd SpectralPropagator::apply(double t, const Eigen::VectorXcd& state) const {
  if (state.size() != eigenvalues_.size()) throw DimensionError("state has the wrong dimension");
  Eigen::VectorXcd coefficients = eigenvectors_.adjoint() * state;
  for (Eigen::Index i = 0; i < coefficients.size(); ++i) {
    coefficients(i) *= std::exp(Complex(0.0, -t * eigenvalues_(i)));
  }
  return eigenvectors_ * coefficients;
}

OperatorMatrix exact_evolution(const OperatorMatrix& h, double t) {
  return SpectralPropagator(h).evolve(t);
}

double unitarity_defect(const OperatorMatrix& u) {
  const auto n = u.entries().rows();
  return (u.entries().adjoint() * u.entries() - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

double spectral_norm(const OperatorMatrix& op) {
  if (op.dimension() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(op.entries());
  return svd.singularValues()(0);
}

OperatorMatrix chernoff_slice(const PolySymbol& a, double tau, const BasisPtr& basis,
                              const QuadratureRule& rule) {
  if (!is_real(a)) throw std::domain_error("Chernoff slices need a real symbol");
  return antiwick_quantize_function(
      basis,
      [&a, tau](std::span<const Complex> phi) {
        return std::exp(Complex(0.0, -tau * eval(a, phi).real()));
      },
      rule);
}

OperatorMatrix matrix_power(const OperatorMatrix& op, int exponent) {
  if (exponent < 0) throw std::invalid_argument("negative matrix power");
  Eigen::MatrixXcd result = Eigen::MatrixXcd::Identity(op.entries().rows(), op.entries().cols());
  Eigen::MatrixXcd base = op.entries();
  for (int e = exponent; e > 0; e >>= 1) {
    if (e & 1) result = result * base;
    if (e > 1) base = base * base;
  }
  return {op.basis(), std::move(result)};
}

OperatorMatrix chernoff_propagator(const PolySymbol& a, const SliceSchedule& schedule,
                                   const BasisPtr& basis, const QuadratureRule& rule) {
  if (rule.order() < basis->max_quanta() + 1) {
    throw std::invalid_argument("quadrature order " + std::to_string(rule.order()) +
                                " cannot resolve the identity at M=" + std::to_string(basis->max_quanta()));
  }
  return matrix_power(chernoff_slice(a, schedule.tau(), basis, rule), schedule.slices());
}

Complex coherent_matrix_element(const OperatorMatrix& op, std::span<const Complex> alpha,
                                std::span<const Complex> beta, double tail_tol) {
  const BasisPtr& basis = op.basis();
  for (std::span<const Complex> point : {alpha, beta}) {
    const double tail = overlap_tail_bound(point, point, basis->max_quanta());
    if (tail > tail_tol) {
      const int needed = required_quanta(point, tail_tol);
      throw TruncationError("coherent tail " + std::to_string(tail) + " exceeds tolerance at M=" +
                                std::to_string(basis->max_quanta()) + "; need M >= " + std::to_string(needed),
                            needed);
    }
  }
  const CoherentVector left = coherent_vector(basis, alpha);
  const CoherentVector right = coherent_vector(basis, beta);
  return left.components.dot(op.entries() * right.components);
}

std::vector<ConvergenceRecord> feynman_convergence_table(const PolySymbol& a, double t,
                                                         std::span<const int> Ns,
                                                         const ProbePair& probe,
                                                         const BasisPtr& basis,
                                                         const QuadratureRule& rule,
                                                         const FeynmanTableExtras& extras) {
  for (std::size_t i = 1; i < Ns.size(); ++i) {
    if (Ns[i] <= Ns[i - 1]) throw std::invalid_argument("slice counts must be strictly ascending");
  }
  if (extras.product_norms) extras.product_norms->assign(Ns.size(), 0.0);
  if (Ns.empty()) return {};

  const OperatorMatrix oracle =
      exact_evolution(extras.hamiltonian ? *extras.hamiltonian : antiwick_quantize_poly(basis, a), t);
  const Complex reference = coherent_matrix_element(oracle, probe.alpha, probe.beta);

  std::vector<ConvergenceRecord> records(Ns.size());
  parallel_for(Ns.size(), [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    const OperatorMatrix sliced = chernoff_propagator(a, SliceSchedule(t, Ns[i]), basis, rule);
    const Complex value = coherent_matrix_element(sliced, probe.alpha, probe.beta);
    if (extras.product_norms) (*extras.product_norms)[i] = spectral_norm(sliced);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    records[i] = {Ns[i], "coherent(alpha,beta)", value, std::abs(value - reference), elapsed.count()};
  });
  return records;
}

std::vector<double> halving_ratios(std::span<const ConvergenceRecord> records) {
  std::vector<double> ratios;
  for (std::size_t i = 1; i < records.size(); ++i) {
    ratios.push_back(records[i - 1].abs_error / records[i].abs_error);
  }
  return ratios;
}

}  // namespace fockprop
