#include "fockprop/quadrature.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <Eigen/Dense>

#include "fockprop/errors.hpp"

namespace fockprop {

namespace {

// Orthonormal Hermite polynomials for weight exp(-x^2):
// p0 = pi^(-1/4), p_{k+1} = sqrt(2/(k+1)) x p_k - sqrt(k/(k+1)) p_{k-1}.
// Returns p_n(x) and fills p_{n-1}(x); sum_sq receives sum_{k<n} p_k(x)^2.
double orthonormal_hermite(int n, double x, double& previous, double& sum_sq) {
  double p_prev = 0.0;
  double p = std::pow(std::numbers::pi, -0.25);
  sum_sq = 0.0;
  for (int k = 0; k < n; ++k) {
    sum_sq += p * p;
    const double next = std::sqrt(2.0 / (k + 1)) * x * p - std::sqrt(double(k) / (k + 1)) * p_prev;
    p_prev = p;
    p = next;
  }
  previous = p_prev;
  return p;
}

}  // namespace

GaussHermite gauss_hermite(int order) {
  if (order < 1) throw std::invalid_argument("Gauss-Hermite order must be >= 1");
  // Golub-Welsch: eigenvalues of the symmetric Jacobi matrix, then Newton polish.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(k / 2.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi, Eigen::EigenvaluesOnly);
  GaussHermite rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    double x = solver.eigenvalues()(i);
    double previous = 0.0;
    double sum_sq = 0.0;
    for (int iter = 0; iter < 8; ++iter) {
      const double p = orthonormal_hermite(order, x, previous, sum_sq);
      const double derivative = std::sqrt(2.0 * order) * previous;
      const double step = p / derivative;
      x -= step;
      if (std::abs(step) <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) break;
    }
    orthonormal_hermite(order, x, previous, sum_sq);
    rule.nodes[i] = x;
    rule.weights[i] = 1.0 / (sum_sq * std::sqrt(std::numbers::pi));
  }
  // Enforce the exact reflection symmetry of the rule.
  for (int i = 0; i < order / 2; ++i) {
    const int j = order - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

QuadratureRule::QuadratureRule(std::size_t modes, int order) : modes_(modes), order_(order) {
  if (modes == 0) throw std::invalid_argument("quadrature needs at least one mode");
  const GaussHermite line = gauss_hermite(order);
  for (int a = 0; a < order; ++a) {
    for (int b = 0; b < order; ++b) {
      mode_nodes_.emplace_back(line.nodes[a], line.nodes[b]);
      mode_weights_.push_back(line.weights[a] * line.weights[b]);
    }
  }
  const double estimate = quadrature_node_estimate(modes, order);
  node_count_ = estimate >= static_cast<double>(std::numeric_limits<std::size_t>::max())
                    ? std::numeric_limits<std::size_t>::max()
                    : static_cast<std::size_t>(estimate);
}

double QuadratureRule::node(std::size_t index, std::span<std::complex<double>> out) const {
  if (out.size() != modes_) throw DimensionError("node buffer has the wrong length");
  const std::size_t per_mode = mode_nodes_.size();
  double weight = 1.0;
  for (std::size_t i = 0; i < modes_; ++i) {
    const std::size_t digit = index % per_mode;
    index /= per_mode;
    out[i] = mode_nodes_[digit];
    weight *= mode_weights_[digit];
  }
  return weight;
}

double quadrature_node_estimate(std::size_t modes, int order) {
  return std::pow(static_cast<double>(order), 2.0 * static_cast<double>(modes));
}

void write_quadrature_csv(const QuadratureRule& rule, std::ostream& out) {
  out << "mode,node_re,node_im,weight\n";
  out << std::setprecision(17);
  for (std::size_t mode = 0; mode < rule.modes(); ++mode) {
    for (std::size_t q = 0; q < rule.mode_nodes().size(); ++q) {
      out << mode << ',' << rule.mode_nodes()[q].real() << ',' << rule.mode_nodes()[q].imag() << ','
          << rule.mode_weights()[q] << '\n';
    }
  }
}

}  // namespace fockprop
