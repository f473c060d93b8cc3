#include "osctrace/fock.hpp"

#include <cmath>
#include <stdexcept>

#include "osctrace/linalg.hpp"

namespace osctrace {

using cplx = std::complex<double>;

boost::rational<long long> monomial_integral(const MultiIndex& g, const MultiIndex& h, int d) {
  if (static_cast<int>(g.size()) != d || static_cast<int>(h.size()) != d)
    throw std::invalid_argument("monomial_integral: index size mismatch");
  if (degree_of(g) != degree_of(h))
    throw std::invalid_argument("monomial_integral: |gamma| != |delta|");
  if (g != h) return {0, 1};
  const int n = degree_of(g);
  if (n + d - 1 > 20)
    throw std::domain_error("monomial_integral: exact rational path limited to |gamma|+d-1 <= 20");
  boost::rational<long long> r(1, 1);
  // (d-1)! / (n+d-1)! = 1 / prod_{i=d}^{n+d-1} i
  for (int i = d; i <= n + d - 1; ++i) r /= i;
  for (int j = 0; j < d; ++j)
    for (int i = 2; i <= g[j]; ++i) r *= i;
  return r;
}

namespace {

// log Gamma(n+1) with an exact double table through 170!.
double log_factorial(int n) {
  static const std::vector<double> table = [] {
    std::vector<double> t(171);
    t[0] = 0.0;
    double f = 1.0;
    for (int i = 1; i <= 170; ++i) {
      f *= i;
      t[i] = std::log(f);
    }
    return t;
  }();
  if (n <= 170) return table[n];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

// (g + a)! / sqrt(g! h!) per coordinate, times the level normalization
// (N+d-1)!/(N+k+d-1)! for the Fubini-Study variant (1 for Bargmann-Fock).
double entry_ratio(const MultiIndex& g, const MultiIndex& a, const MultiIndex& h, int level,
                   int k, int d, InnerProduct variant) {
  double lg = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    lg += log_factorial(g[j] + a[j]);
    lg -= 0.5 * (log_factorial(g[j]) + log_factorial(h[j]));
  }
  if (variant == InnerProduct::FubiniStudy) {
    for (int i = level + d; i <= level + k + d - 1; ++i) lg -= std::log(static_cast<double>(i));
  }
  return std::exp(lg);
}

Eigen::MatrixXcd assemble(const std::map<std::pair<MultiIndex, MultiIndex>, cplx>& terms,
                          int level, int d, InnerProduct variant) {
  LevelIndexer idx(level, d);
  const int dim = idx.size();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (int col = 0; col < dim; ++col) {
    const MultiIndex& g = idx.basis()[col];
    for (const auto& [key, c] : terms) {
      const MultiIndex& alpha = key.first;
      const MultiIndex& beta = key.second;
      if (degree_of(alpha) != degree_of(beta)) continue;  // killed by the compression
      MultiIndex dest = g;
      bool ok = true;
      for (int j = 0; j < d; ++j) {
        dest[j] += alpha[j] - beta[j];
        if (dest[j] < 0) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      int row = idx.position(dest);
      if (row < 0) continue;
      m(row, col) += c * entry_ratio(g, alpha, dest, level, degree_of(alpha), d, variant);
    }
  }
  return m;
}

}  // namespace

ToeplitzBlock toeplitz(const InvariantSymbol& h, int level, InnerProduct variant) {
  if (h.isotropic_order() != 0)
    throw std::invalid_argument(
        "toeplitz: order-0 symbol required (use restricted_to_sphere() for the CP function)");
  if (!h.is_hermitian(1e-12)) throw std::invalid_argument("toeplitz: non-Hermitian symbol");
  ToeplitzBlock t;
  t.level = level;
  t.d = h.dim();
  t.variant = variant;
  t.matrix = assemble(h.terms(), level, h.dim(), variant);
  if (variant == InnerProduct::BargmannFock) {
    // On Fock space the sphere function H = p/|z|^{2k} is realized through
    // the homogeneity weight: Pi_N p Pi_N = (N+d)^k Pi_N (p/|z|^{2k}) Pi_N.
    t.matrix /= std::pow(static_cast<double>(level + h.dim()), h.bidegree());
  }
  return t;
}

ToeplitzBlock toeplitz_ambient_bf(const PhasePolynomial& ambient, int level) {
  if (ambient.kind() != VariableKind::ComplexPhase)
    throw std::invalid_argument("toeplitz_ambient_bf: ComplexPhase polynomial required");
  ToeplitzBlock t;
  t.level = level;
  t.d = ambient.dim();
  t.variant = InnerProduct::BargmannFock;
  t.matrix = assemble(ambient.terms(), level, ambient.dim(), InnerProduct::BargmannFock);
  return t;
}

std::vector<double> toeplitz_eigenvalues(const ToeplitzBlock& t) {
  return hermitian_eigenvalues(t.matrix);
}

cplx block_propagator_trace(const std::vector<double>& eigenvalues, int level, double t) {
  const double s = t * std::sqrt(static_cast<double>(level));
  cplx sum(0.0, 0.0);
  for (double mu : eigenvalues) sum += std::polar(1.0, s * mu);
  return sum;
}

cplx block_propagator_trace(const ToeplitzBlock& t, double time) {
  return block_propagator_trace(toeplitz_eigenvalues(t), t.level, time);
}

double toeplitz_trace(const InvariantSymbol& h, int level) {
  LevelIndexer idx(level, h.dim());
  double tr = 0.0;
  for (int col = 0; col < idx.size(); ++col) {
    const MultiIndex& g = idx.basis()[col];
    for (const auto& [key, c] : h.terms()) {
      if (key.first != key.second) continue;
      tr += c.real() *
            entry_ratio(g, key.first, g, level, degree_of(key.first), h.dim(), InnerProduct::FubiniStudy);
    }
  }
  return tr;
}

double symbol_fs_average(const InvariantSymbol& h) {
  // Int_{CP} H = Int_{S^{2d-1}} sum c z^a zbar^b dsigma: only a = b survives.
  double avg = 0.0;
  for (const auto& [key, c] : h.terms()) {
    if (key.first != key.second) continue;
    avg += c.real() * boost::rational_cast<double>(
                          monomial_integral(key.first, key.first, h.dim()));
  }
  return avg;
}

double cross_model_compare(const Eigen::MatrixXcd& hermite_block, const InvariantSymbol& h1,
                           int level, int d, InnerProduct variant) {
  ToeplitzBlock t = toeplitz(h1.restricted_to_sphere(), level, variant);
  if (hermite_block.rows() != t.matrix.rows())
    throw std::invalid_argument("cross_model_compare: basis size mismatch");
  Eigen::MatrixXcd diff = hermite_block / std::sqrt(level + 0.5 * d) - t.matrix;
  return hermitian_operator_norm(diff);
}

}  // namespace osctrace
