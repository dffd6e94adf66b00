#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace fockprop {

/// Gauss-Hermite rule for weight exp(-x^2) on the real line, with weights
/// divided by sqrt(pi) so they sum to 1. Nodes ascending. Exact for
/// polynomials of degree <= 2*order-1.
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussHermite gauss_hermite(int order);

/// Tensor phase-space rule for the normalized Gaussian measure
/// exp(-|phi|^2) d^2phi / pi on C^d. Each mode carries the same Q*Q grid of
/// complex nodes phi = x + i y; a full node picks one grid point per mode,
/// so there are Q^(2d) nodes. Weights are positive and sum to 1.
class QuadratureRule {
 public:
  QuadratureRule(std::size_t modes, int order);

  std::size_t modes() const { return modes_; }
  int order() const { return order_; }
  /// Q*Q points of the per-mode grid.
  const std::vector<std::complex<double>>& mode_nodes() const { return mode_nodes_; }
  const std::vector<double>& mode_weights() const { return mode_weights_; }

  /// Q^(2d); saturates at SIZE_MAX.
  std::size_t node_count() const { return node_count_; }
  /// Mixed-radix decoding of a full node index; mode 0 varies fastest.
  double node(std::size_t index, std::span<std::complex<double>> out) const;

 private:
  std::size_t modes_;
  int order_;
  std::vector<std::complex<double>> mode_nodes_;
  std::vector<double> mode_weights_;
  std::size_t node_count_;
};

/// Q^(2d) as a double, for diagnostics on oversized requests.
double quadrature_node_estimate(std::size_t modes, int order);

/// Audit dump of the per-mode grid: header "mode,node_re,node_im,weight".
void write_quadrature_csv(const QuadratureRule& rule, std::ostream& out);

}  // namespace fockprop
