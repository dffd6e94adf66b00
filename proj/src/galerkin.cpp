#include "fockprop/galerkin.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fockprop/errors.hpp"
#include "fockprop/parallel.hpp"
#include "fockprop/quadrature.hpp"
#include "fockprop/quantizer.hpp"

namespace fockprop {

Flag::Flag(std::size_t d_max, std::vector<int> members) : d_max_(d_max), members_(std::move(members)) {
  if (d_max == 0) throw std::invalid_argument("flag needs d_max >= 1");
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (members_[i] < 1) throw std::invalid_argument("flag members must be >= 1");
    if (i > 0 && members_[i] <= members_[i - 1]) {
      throw std::invalid_argument("flag members must be strictly increasing");
    }
  }
  if (!members_.empty() && static_cast<std::size_t>(members_.back()) > d_max) {
    throw std::invalid_argument("flag member exceeds d_max");
  }
}

RateFit fit_rate(std::span<const std::pair<int, double>> samples) {
  RateFit fit;
  fit.samples.assign(samples.begin(), samples.end());
  fit.exact = !samples.empty();
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [n, error] : samples) {
    if (error > 1e-10) fit.exact = false;
    if (error > 1e-12) {
      xs.push_back(std::log(static_cast<double>(n)));
      ys.push_back(std::log(error));
    }
  }
  if (fit.exact || xs.size() < 3) return fit;

  const double count = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / count;
    my += ys[i] / count;
  }
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.fitted = true;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / count);
  return fit;
}

OperatorMatrix reduce_hamiltonian(const PolySymbol& w, std::size_t n, const BasisPtr& basis_n,
                                  QuantizationRoute route) {
  if (n > w.modes() || basis_n->modes() != n) {
    throw DimensionError("reduced basis must have n <= " + std::to_string(w.modes()) + " modes");
  }
  const PolySymbol reduced = truncate_modes(restrict_symbol(w, n), n);
  return route == QuantizationRoute::wick ? wick_quantize(basis_n, reduced)
                                          : antiwick_quantize_poly(basis_n, reduced);
}

PhasePoint project_point(std::span<const Complex> alpha, std::size_t n) {
  if (n > alpha.size()) throw DimensionError("cannot project onto more modes than the point has");
  return PhasePoint(alpha.begin(), alpha.begin() + static_cast<std::ptrdiff_t>(n));
}

Eigen::VectorXcd project_state(const BasisPtr& full, const Eigen::VectorXcd& state, const BasisPtr& reduced) {
  if (state.size() != static_cast<Eigen::Index>(full->size())) throw DimensionError("state does not match basis");
  if (reduced->modes() > full->modes() || reduced->max_quanta() != full->max_quanta()) {
    throw DimensionError("reduced basis must keep the cutoff and use fewer modes");
  }
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(reduced->size()));
  const std::size_t n = reduced->modes();
  for (std::size_t s = 0; s < full->size(); ++s) {
    const Occupation& occupation = full->state(s);
    bool inside = true;
    for (std::size_t i = n; i < occupation.size() && inside; ++i) inside = occupation[i] == 0;
    if (!inside) continue;
    const auto row = *reduced->index_of(std::span<const int>(occupation.data(), n));
    out(static_cast<Eigen::Index>(row)) = state(static_cast<Eigen::Index>(s));
  }
  return out;
}

SweepResult galerkin_sweep(const PolySymbol& w, const Flag& flag, const SweepOptions& options) {
  const std::size_t d_max = flag.d_max();
  if (w.modes() != d_max) throw DimensionError("symbol must live on the flag's d_max modes");
  if (options.probe.alpha.size() != d_max || options.probe.beta.size() != d_max) {
    throw DimensionError("probe points must have d_max components");
  }
  const std::size_t reference_size = basis_size(d_max, options.max_quanta);
  if (reference_size > options.max_dimension) {
    throw BudgetError("reference basis binomial(M+d,d) = " + std::to_string(reference_size) +
                          " exceeds the dense budget of " + std::to_string(options.max_dimension),
                      reference_size);
  }

  auto element_at = [&](std::size_t n) {
    const BasisPtr basis = enumerate_basis(static_cast<int>(n), options.max_quanta);
    const OperatorMatrix h = reduce_hamiltonian(w, n, basis, options.route);
    const OperatorMatrix u = exact_evolution(h, options.t);
    return coherent_matrix_element(u, project_point(options.probe.alpha, n),
                                   project_point(options.probe.beta, n));
  };

  SweepResult result;
  const auto& members = flag.members();
  result.records.resize(members.size());
  // Slot 0 is the reference; the flag members follow.
  std::vector<Complex> values(members.size() + 1);
  std::vector<double> seconds(members.size() + 1);
  parallel_for(members.size() + 1, [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    values[i] = element_at(i == 0 ? d_max : static_cast<std::size_t>(members[i - 1]));
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    seconds[i] = elapsed.count();
  });
  result.reference = values[0];

  std::vector<std::pair<int, double>> samples;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const double error = std::abs(values[i + 1] - result.reference);
    result.records[i] = {members[i], "coherent(alpha,beta)", values[i + 1], error, seconds[i + 1]};
    samples.emplace_back(members[i], error);
    if (samples.size() < 2) {
      result.running_slopes.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    // Two points are enough for a running slope; the final fit needs three.
    const auto& first = samples.front();
    const auto& last = samples.back();
    double slope = std::numeric_limits<double>::quiet_NaN();
    const RateFit running = fit_rate(samples);
    if (running.fitted) {
      slope = running.slope;
    } else if (first.second > 1e-12 && last.second > 1e-12) {
      slope = std::log(last.second / first.second) / std::log(double(last.first) / first.first);
    }
    result.running_slopes.push_back(slope);
  }
  result.fit = fit_rate(samples);
  result.slope_pass = result.fit.exact || (result.fit.fitted && result.fit.slope <= options.slope_threshold);
  return result;
}

EvolveResult schrodinger_evolve(const PolySymbol& w, std::size_t n, const Eigen::VectorXcd& initial,
                                std::span<const double> t_grid, const EvolveOptions& options) {
  EvolveResult result;
  result.basis = enumerate_basis(static_cast<int>(n), options.max_quanta);
  if (initial.size() != static_cast<Eigen::Index>(result.basis->size())) {
    throw DimensionError("initial state has dimension " + std::to_string(initial.size()) + ", basis has " +
                         std::to_string(result.basis->size()));
  }
  if (std::abs(initial.norm() - 1.0) > 1e-10) throw std::invalid_argument("initial state must be normalized");

  const PolySymbol reduced = truncate_modes(restrict_symbol(w, n), n);
  auto record = [&](Eigen::VectorXcd state) {
    result.norm_defects.push_back(std::abs(state.norm() - 1.0));
    result.states.push_back(std::move(state));
  };

  if (options.method == EvolutionMethod::oracle) {
    const OperatorMatrix h = reduce_hamiltonian(w, n, result.basis, options.route);
    const SpectralPropagator propagator(h);
    for (double t : t_grid) record(t == 0.0 ? initial : propagator.apply(t, initial));
    return result;
  }

  const PolySymbol antinormal = options.route == QuantizationRoute::antiwick ? reduced : antinormal_from_wick(reduced);
  const int order = options.quadrature_order > 0 ? options.quadrature_order : options.max_quanta + 2;
  const QuadratureRule rule(n, order);
  for (double t : t_grid) {
    if (t == 0.0) {
      record(initial);
      continue;
    }
    const OperatorMatrix u = chernoff_propagator(antinormal, SliceSchedule(t, options.slices), result.basis, rule);
    record(u.entries() * initial);
  }
  return result;
}

}  // namespace fockprop
