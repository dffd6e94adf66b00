#include "fockprop/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fockprop/errors.hpp"
#include "fockprop/parallel.hpp"

namespace fockprop {

namespace {

// n! / (n - r)!
double falling_factorial(int n, int r) {
  double value = 1.0;
  for (int i = n - r + 1; i <= n; ++i) value *= i;
  return value;
}

void check_modes(const BasisPtr& basis, std::size_t modes) {
  if (basis->modes() != modes) {
    throw DimensionError("symbol or rule over " + std::to_string(modes) + " modes, basis has " +
                         std::to_string(basis->modes()));
  }
}

// Nodes per partial sum, and the number of partial sums. Both are fixed so
// the floating-point summation order never depends on the worker count.
constexpr std::size_t kChunkNodes = 1024;
constexpr std::size_t kLanes = 16;

}  // namespace

OperatorMatrix wick_quantize(const BasisPtr& basis, const PolySymbol& w) {
  check_modes(basis, w.modes());
  const std::size_t d = basis->modes();
  const auto dim = static_cast<Eigen::Index>(basis->size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  Occupation target(d);
  for (const auto& [index, coeff] : w.terms()) {
    const int shift = index.degree() - 2 * std::accumulate(index.k.begin(), index.k.end(), 0);
    for (std::size_t col = 0; col < basis->size(); ++col) {
      const Occupation& state = basis->state(col);
      if (basis->total_quanta(col) + shift > basis->max_quanta()) continue;
      bool reachable = true;
      for (std::size_t i = 0; i < d && reachable; ++i) reachable = state[i] >= index.k[i];
      if (!reachable) continue;
      double amplitude = 1.0;
      for (std::size_t i = 0; i < d; ++i) {
        target[i] = state[i] - index.k[i] + index.kstar[i];
        amplitude *= std::sqrt(falling_factorial(state[i], index.k[i]) *
                               falling_factorial(target[i], index.kstar[i]));
      }
      const auto row = *basis->index_of(target);
      out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += coeff * amplitude;
    }
  }
  return {basis, std::move(out)};
}

OperatorMatrix antiwick_quantize_poly(const BasisPtr& basis, const PolySymbol& a) {
  return wick_quantize(basis, wick_from_antinormal(a));
}

OperatorMatrix antiwick_quantize_function(const BasisPtr& basis, const PhaseFunction& f,
                                          const QuadratureRule& rule) {
  check_modes(basis, rule.modes());
  if (rule.node_count() == std::numeric_limits<std::size_t>::max()) {
    throw BudgetError("quadrature node count overflows", rule.node_count());
  }
  const std::size_t d = basis->modes();
  const int cutoff = basis->max_quanta();
  const auto dim = static_cast<Eigen::Index>(basis->size());

  // powers[q][n] = phi_q^n / sqrt(n!) on the per-mode grid.
  const auto& grid = rule.mode_nodes();
  std::vector<std::vector<Complex>> powers(grid.size(), std::vector<Complex>(cutoff + 1));
  for (std::size_t q = 0; q < grid.size(); ++q) {
    powers[q][0] = 1.0;
    for (int n = 1; n <= cutoff; ++n) powers[q][n] = powers[q][n - 1] * grid[q] / std::sqrt(double(n));
  }

  const std::size_t nodes = rule.node_count();
  const std::size_t chunks = (nodes + kChunkNodes - 1) / kChunkNodes;
  const std::size_t lanes = std::min(kLanes, chunks);
  std::vector<Eigen::MatrixXcd> partial(lanes, Eigen::MatrixXcd::Zero(dim, dim));

  parallel_for(lanes, [&](std::size_t lane) {
    std::vector<Complex> phi(d);
    std::vector<std::size_t> digits(d);
    Eigen::MatrixXcd columns(dim, static_cast<Eigen::Index>(kChunkNodes));
    Eigen::VectorXcd scaled(static_cast<Eigen::Index>(kChunkNodes));
    for (std::size_t chunk = lane; chunk < chunks; chunk += lanes) {
      const std::size_t first = chunk * kChunkNodes;
      const std::size_t count = std::min(kChunkNodes, nodes - first);
      for (std::size_t c = 0; c < count; ++c) {
        const std::size_t node = first + c;
        const double weight = rule.node(node, phi);
        const Complex value = f(phi);
        if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
          throw std::domain_error("phase-space function is not finite at quadrature node " +
                                  std::to_string(node));
        }
        std::size_t rest = node;
        for (std::size_t i = 0; i < d; ++i) {
          digits[i] = rest % grid.size();
          rest /= grid.size();
        }
        for (std::size_t s = 0; s < basis->size(); ++s) {
          Complex component = 1.0;
          const Occupation& state = basis->state(s);
          for (std::size_t i = 0; i < d; ++i) component *= powers[digits[i]][state[i]];
          columns(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(c)) = component;
        }
        scaled(static_cast<Eigen::Index>(c)) = weight * value;
      }
      const auto used = static_cast<Eigen::Index>(count);
      auto block = columns.leftCols(used);
      partial[lane].noalias() += block * scaled.head(used).asDiagonal() * block.adjoint();
    }
  });

  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& lane : partial) total += lane;
  return {basis, std::move(total)};
}

OperatorMatrix antiwick_quantize_function(const BasisPtr& basis, const PolySymbol& a,
                                          const QuadratureRule& rule) {
  check_modes(basis, a.modes());
  return antiwick_quantize_function(
      basis, [&a](std::span<const Complex> phi) { return eval(a, phi); }, rule);
}

WickSymbolCheck wick_symbol_of(const OperatorMatrix& op, const PolySymbol& candidate,
                               std::span<const ProbePair> probes, double tail_tol) {
  const BasisPtr& basis = op.basis();
  check_modes(basis, candidate.modes());
  WickSymbolCheck result;
  for (const ProbePair& probe : probes) {
    for (const PhasePoint* point : {&probe.alpha, &probe.beta}) {
      const double tail = overlap_tail_bound(*point, *point, basis->max_quanta());
      if (tail > tail_tol) {
        throw TruncationError("probe point not resolved at M=" + std::to_string(basis->max_quanta()) +
                                  " (tail " + std::to_string(tail) + ")",
                              required_quanta(*point, tail_tol));
      }
      result.max_tail_bound = std::max(result.max_tail_bound, tail);
    }
    const CoherentVector left = coherent_vector(basis, probe.alpha);
    const CoherentVector right = coherent_vector(basis, probe.beta);
    const Complex element = left.components.dot(op.entries() * right.components);
    Complex exponent = 0.0;
    for (std::size_t i = 0; i < probe.alpha.size(); ++i) exponent += std::conj(probe.alpha[i]) * probe.beta[i];
    const Complex symbol = eval_mixed(candidate, probe.alpha, probe.beta);
    const double deviation = std::abs(element * std::exp(-exponent) - symbol) / std::max(1.0, std::abs(symbol));
    result.max_relative_deviation = std::max(result.max_relative_deviation, deviation);
  }
  return result;
}

double subblock_max_difference(const OperatorMatrix& lhs, const OperatorMatrix& rhs, int max_quanta) {
  if (lhs.dimension() != rhs.dimension()) throw DimensionError("operators of different dimension");
  const BasisPtr& basis = lhs.basis();
  double worst = 0.0;
  for (std::size_t r = 0; r < basis->size(); ++r) {
    if (basis->total_quanta(r) > max_quanta) continue;
    for (std::size_t c = 0; c < basis->size(); ++c) {
      if (basis->total_quanta(c) > max_quanta) continue;
      const auto ri = static_cast<Eigen::Index>(r);
      const auto ci = static_cast<Eigen::Index>(c);
      worst = std::max(worst, std::abs(lhs.entries()(ri, ci) - rhs.entries()(ri, ci)));
    }
  }
  return worst;
}

}  // namespace fockprop
