#include "fockprop/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fockprop/errors.hpp"

namespace fockprop {

namespace {

void append_compositions(int remaining, std::size_t position, Occupation& current,
                         std::vector<Occupation>& out) {
  if (position + 1 == current.size()) {
    current[position] = remaining;
    out.push_back(current);
    return;
  }
  for (int first = remaining; first >= 0; --first) {
    current[position] = first;
    append_compositions(remaining - first, position + 1, current, out);
  }
}

void check_mode(const BasisPtr& basis, std::size_t mode) {
  if (mode >= basis->modes()) {
    throw std::out_of_range("mode " + std::to_string(mode) + " outside a " +
                            std::to_string(basis->modes()) + "-mode basis");
  }
}

}  // namespace

FockBasis::FockBasis(std::size_t modes, int max_quanta) : modes_(modes), max_quanta_(max_quanta) {
  if (modes == 0) throw std::invalid_argument("Fock basis needs at least one mode");
  if (max_quanta < 0) throw std::invalid_argument("quanta cutoff must be non-negative");
  Occupation current(modes, 0);
  for (int total = 0; total <= max_quanta; ++total) {
    append_compositions(total, 0, current, states_);
  }
  totals_.reserve(states_.size());
  for (std::size_t i = 0; i < states_.size(); ++i) {
    totals_.push_back(std::accumulate(states_[i].begin(), states_[i].end(), 0));
    lookup_.emplace(key(states_[i]), i);
  }
}

std::uint64_t FockBasis::key(std::span<const int> occupation) const {
  // FNV-1a over the occupation numbers; collisions are resolved in index_of.
  std::uint64_t hash = 14695981039346656037ull;
  for (int n : occupation) {
    hash ^= static_cast<std::uint64_t>(n) + 0x9e3779b97f4a7c15ull;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::optional<std::size_t> FockBasis::index_of(std::span<const int> occupation) const {
  if (occupation.size() != modes_) return std::nullopt;
  auto [begin, end] = lookup_.equal_range(key(occupation));
  for (auto it = begin; it != end; ++it) {
    if (std::equal(occupation.begin(), occupation.end(), states_[it->second].begin())) {
      return it->second;
    }
  }
  return std::nullopt;
}

std::size_t basis_size(std::size_t modes, int max_quanta) {
  if (max_quanta < 0) return 0;
  // binomial(M+d, d) computed as a running product of exact binomials.
  long double value = 1.0L;
  const std::size_t k = std::min<std::size_t>(modes, static_cast<std::size_t>(max_quanta));
  const std::size_t n = modes + static_cast<std::size_t>(max_quanta);
  for (std::size_t i = 1; i <= k; ++i) {
    value = value * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (value > static_cast<long double>(std::numeric_limits<std::size_t>::max())) {
      return std::numeric_limits<std::size_t>::max();
    }
  }
  return static_cast<std::size_t>(std::llround(value));
}

BasisPtr enumerate_basis(int modes, int max_quanta) {
  if (modes <= 0) throw std::invalid_argument("mode count must be positive");
  return std::make_shared<const FockBasis>(static_cast<std::size_t>(modes), max_quanta);
}

OperatorMatrix::OperatorMatrix(BasisPtr basis, Eigen::MatrixXcd entries)
    : basis_(std::move(basis)), entries_(std::move(entries)) {
  if (!basis_) throw std::invalid_argument("operator needs a basis");
  const auto n = static_cast<Eigen::Index>(basis_->size());
  if (entries_.rows() != n || entries_.cols() != n) {
    throw DimensionError("operator shape " + std::to_string(entries_.rows()) + "x" +
                         std::to_string(entries_.cols()) + " does not match basis size " +
                         std::to_string(n));
  }
  const double scale = std::max(1.0, entries_.size() ? entries_.cwiseAbs().maxCoeff() : 0.0);
  hermitian_ = hermitian_defect() <= 1e-12 * scale;
}

double OperatorMatrix::hermitian_defect() const {
  if (entries_.size() == 0) return 0.0;
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

OperatorMatrix OperatorMatrix::adjoint() const { return {basis_, entries_.adjoint()}; }

void OperatorMatrix::check_same_basis(const OperatorMatrix& rhs) const {
  if (basis_ != rhs.basis_ &&
      (basis_->modes() != rhs.basis_->modes() || basis_->max_quanta() != rhs.basis_->max_quanta())) {
    throw DimensionError("operators live on different bases");
  }
}

OperatorMatrix OperatorMatrix::operator*(const OperatorMatrix& rhs) const {
  check_same_basis(rhs);
  return {basis_, entries_ * rhs.entries_};
}

OperatorMatrix OperatorMatrix::operator+(const OperatorMatrix& rhs) const {
  check_same_basis(rhs);
  return {basis_, entries_ + rhs.entries_};
}

OperatorMatrix OperatorMatrix::operator-(const OperatorMatrix& rhs) const {
  check_same_basis(rhs);
  return {basis_, entries_ - rhs.entries_};
}

OperatorMatrix identity(const BasisPtr& basis) {
  const auto n = static_cast<Eigen::Index>(basis->size());
  return {basis, Eigen::MatrixXcd::Identity(n, n)};
}

OperatorMatrix annihilator(const BasisPtr& basis, std::size_t mode) {
  check_mode(basis, mode);
  const auto n = static_cast<Eigen::Index>(basis->size());
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  Occupation lowered;
  for (std::size_t col = 0; col < basis->size(); ++col) {
    const Occupation& state = basis->state(col);
    if (state[mode] == 0) continue;
    lowered = state;
    --lowered[mode];
    const auto row = *basis->index_of(lowered);
    a(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = std::sqrt(double(state[mode]));
  }
  return {basis, std::move(a)};
}

OperatorMatrix creator(const BasisPtr& basis, std::size_t mode) {
  return annihilator(basis, mode).adjoint();
}

OperatorMatrix number_operator(const BasisPtr& basis) {
  const auto n = static_cast<Eigen::Index>(basis->size());
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) total(i, i) = basis->total_quanta(static_cast<std::size_t>(i));
  return {basis, std::move(total)};
}

CcrDefect ccr_defect(const BasisPtr& basis, std::size_t mode_i, std::size_t mode_j) {
  const Eigen::MatrixXcd a = annihilator(basis, mode_i).entries();
  const Eigen::MatrixXcd adag = creator(basis, mode_j).entries();
  Eigen::MatrixXcd defect = a * adag - adag * a;
  if (mode_i == mode_j) defect -= Eigen::MatrixXcd::Identity(defect.rows(), defect.cols());

  CcrDefect result{0.0, 0.0};
  const int cutoff = basis->max_quanta();
  for (Eigen::Index r = 0; r < defect.rows(); ++r) {
    for (Eigen::Index c = 0; c < defect.cols(); ++c) {
      const double magnitude = std::abs(defect(r, c));
      result.unrestricted = std::max(result.unrestricted, magnitude);
      if (basis->total_quanta(static_cast<std::size_t>(r)) < cutoff &&
          basis->total_quanta(static_cast<std::size_t>(c)) < cutoff) {
        result.protected_subspace = std::max(result.protected_subspace, magnitude);
      }
    }
  }
  return result;
}

OperatorMatrix gamma_diag(const BasisPtr& basis, std::span<const Complex> lambdas) {
  if (lambdas.size() != basis->modes()) throw DimensionError("gamma_diag needs one factor per mode");
  const auto n = static_cast<Eigen::Index>(basis->size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t s = 0; s < basis->size(); ++s) {
    Complex value = 1.0;  // 0^0 = 1, so the vacuum is always fixed
    const Occupation& state = basis->state(s);
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      for (int e = 0; e < state[i]; ++e) value *= lambdas[i];
    }
    out(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) = value;
  }
  return {basis, std::move(out)};
}

OperatorMatrix gamma(const BasisPtr& basis, const Eigen::MatrixXcd& one_particle) {
  const std::size_t d = basis->modes();
  if (one_particle.rows() != static_cast<Eigen::Index>(d) ||
      one_particle.cols() != static_cast<Eigen::Index>(d)) {
    throw DimensionError("one-particle operator must be d x d");
  }
  const auto n = static_cast<Eigen::Index>(basis->size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);

  // Each column: expand prod_i (sum_k o_ki x_k)^{n_i} / sqrt(n_i!) as a polynomial
  // in commuting creators, then convert monomials x^m to sqrt(m!) |m>.
  for (std::size_t col = 0; col < basis->size(); ++col) {
    const Occupation& state = basis->state(col);
    std::map<Occupation, Complex> poly{{Occupation(d, 0), 1.0}};
    double norm = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      for (int e = 0; e < state[i]; ++e) {
        norm *= std::sqrt(double(e + 1));
        std::map<Occupation, Complex> next;
        for (const auto& [monomial, coeff] : poly) {
          for (std::size_t k = 0; k < d; ++k) {
            const Complex factor = one_particle(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i));
            if (factor == Complex(0.0)) continue;
            Occupation raised = monomial;
            ++raised[k];
            next[raised] += coeff * factor;
          }
        }
        poly = std::move(next);
      }
    }
    for (const auto& [monomial, coeff] : poly) {
      double weight = 1.0;
      for (int m : monomial) {
        for (int r = 2; r <= m; ++r) weight *= r;
      }
      const auto row = *basis->index_of(monomial);
      out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += coeff * std::sqrt(weight) / norm;
    }
  }
  return {basis, std::move(out)};
}

OperatorMatrix dgamma(const BasisPtr& basis, const Eigen::MatrixXcd& one_particle) {
  const std::size_t d = basis->modes();
  if (one_particle.rows() != static_cast<Eigen::Index>(d) ||
      one_particle.cols() != static_cast<Eigen::Index>(d)) {
    throw DimensionError("one-particle operator must be d x d");
  }
  const auto n = static_cast<Eigen::Index>(basis->size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  Occupation moved;
  for (std::size_t col = 0; col < basis->size(); ++col) {
    const Occupation& state = basis->state(col);
    for (std::size_t j = 0; j < d; ++j) {
      if (state[j] == 0) continue;
      for (std::size_t i = 0; i < d; ++i) {
        const Complex o = one_particle(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (o == Complex(0.0)) continue;
        moved = state;
        --moved[j];
        const double amplitude = std::sqrt(double(state[j]) * double(moved[i] + 1));
        ++moved[i];
        const auto row = *basis->index_of(moved);
        out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += o * amplitude;
      }
    }
  }
  return {basis, std::move(out)};
}

CoherentVector coherent_vector(const BasisPtr& basis, std::span<const Complex> alpha) {
  const std::size_t d = basis->modes();
  if (alpha.size() != d) throw DimensionError("coherent vector needs one amplitude per mode");
  for (const Complex& a : alpha) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw std::invalid_argument("coherent amplitude must be finite");
    }
  }
  const int cutoff = basis->max_quanta();
  // powers[i][n] = alpha_i^n / sqrt(n!)
  std::vector<std::vector<Complex>> powers(d, std::vector<Complex>(static_cast<std::size_t>(cutoff) + 1));
  for (std::size_t i = 0; i < d; ++i) {
    powers[i][0] = 1.0;
    for (int q = 1; q <= cutoff; ++q) powers[i][q] = powers[i][q - 1] * alpha[i] / std::sqrt(double(q));
  }
  Eigen::VectorXcd components(static_cast<Eigen::Index>(basis->size()));
  for (std::size_t s = 0; s < basis->size(); ++s) {
    Complex value = 1.0;
    for (std::size_t i = 0; i < d; ++i) value *= powers[i][basis->state(s)[i]];
    components(static_cast<Eigen::Index>(s)) = value;
  }
  return {basis, PhasePoint(alpha.begin(), alpha.end()), std::move(components)};
}

Complex overlap(const CoherentVector& lhs, const CoherentVector& rhs) {
  if (lhs.components.size() != rhs.components.size()) throw DimensionError("coherent vectors on different bases");
  return lhs.components.dot(rhs.components);
}

double exponential_tail(double x, int max_quanta) {
  if (x < 0.0) throw std::invalid_argument("exponential_tail needs x >= 0");
  if (x == 0.0) return 0.0;
  int k = max_quanta + 1;
  double term = std::exp(k * std::log(x) - std::lgamma(k + 1.0));
  double sum = 0.0;
  while (term > 0.0) {
    sum += term;
    ++k;
    term *= x / k;
    if (k > x && term < 1e-18 * sum) break;
  }
  return sum;
}

double overlap_tail_bound(std::span<const Complex> alpha, std::span<const Complex> beta,
                          int max_quanta) {
  if (alpha.size() != beta.size()) throw DimensionError("phase points of different length");
  double x = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) x += std::abs(alpha[i]) * std::abs(beta[i]);
  return exponential_tail(x, max_quanta);
}

int required_quanta(std::span<const Complex> alpha, double tol) {
  int cutoff = 0;
  while (overlap_tail_bound(alpha, alpha, cutoff) > tol) ++cutoff;
  return cutoff;
}

}  // namespace fockprop
