#include "osctrace/phase_polynomial.hpp"

#include <cmath>

namespace osctrace {

using cplx = std::complex<double>;

static cplx ipow(const cplx& z, int n) {
  cplx r(1.0, 0.0);
  for (int i = 0; i < n; ++i) r *= z;
  return r;
}

std::complex<double> evaluate_complex(const PhasePolynomial& p,
                                      const std::vector<std::complex<double>>& z) {
  if (p.kind() != VariableKind::ComplexPhase)
    throw std::invalid_argument("evaluate_complex: ComplexPhase polynomial required");
  if (static_cast<int>(z.size()) != p.dim())
    throw std::invalid_argument("evaluate_complex: point dimension mismatch");
  cplx sum(0.0, 0.0);
  for (const auto& [key, c] : p.terms()) {
    cplx t = c;
    for (int j = 0; j < p.dim(); ++j) {
      t *= ipow(z[j], key.first[j]);
      t *= ipow(std::conj(z[j]), key.second[j]);
    }
    sum += t;
  }
  return sum;
}

std::complex<double> evaluate_real(const PhasePolynomial& p, const std::vector<double>& x,
                                   const std::vector<double>& xi) {
  if (p.kind() != VariableKind::RealPhase)
    throw std::invalid_argument("evaluate_real: RealPhase polynomial required");
  if (static_cast<int>(x.size()) != p.dim() || static_cast<int>(xi.size()) != p.dim())
    throw std::invalid_argument("evaluate_real: point dimension mismatch");
  cplx sum(0.0, 0.0);
  for (const auto& [key, c] : p.terms()) {
    double t = 1.0;
    for (int j = 0; j < p.dim(); ++j) {
      t *= std::pow(x[j], key.first[j]);
      t *= std::pow(xi[j], key.second[j]);
    }
    sum += c * t;
  }
  return sum;
}

PhasePolynomial flow_average(const PhasePolynomial& p) {
  if (p.kind() != VariableKind::ComplexPhase)
    throw std::invalid_argument("flow_average: RealPhase input; convert with kappa_pullback first");
  PhasePolynomial r(VariableKind::ComplexPhase, p.dim());
  for (const auto& [key, c] : p.terms()) {
    if (degree_of(key.first) == degree_of(key.second)) r.add_term(key.first, key.second, c);
  }
  return r;
}

PhasePolynomial kappa_pullback(const PhasePolynomial& p) {
  if (p.kind() != VariableKind::RealPhase)
    throw std::invalid_argument("kappa_pullback: RealPhase polynomial required");
  const int d = p.dim();
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<PhasePolynomial> subs;
  subs.reserve(2 * d);
  for (int j = 0; j < d; ++j) {
    // x_j -> (z_j + zbar_j)/sqrt(2)
    PhasePolynomial im = cplx(s, 0.0) * (PhasePolynomial::variable(VariableKind::ComplexPhase, d, j, false) +
                                         PhasePolynomial::variable(VariableKind::ComplexPhase, d, j, true));
    subs.push_back(im);
  }
  for (int j = 0; j < d; ++j) {
    // xi_j -> i (z_j - zbar_j)/sqrt(2)
    PhasePolynomial im = cplx(0.0, s) * (PhasePolynomial::variable(VariableKind::ComplexPhase, d, j, false) -
                                         PhasePolynomial::variable(VariableKind::ComplexPhase, d, j, true));
    subs.push_back(im);
  }
  return p.substitute_linear(VariableKind::ComplexPhase, d, subs);
}

std::vector<std::complex<double>> kappa_point(const std::vector<double>& x,
                                              const std::vector<double>& xi) {
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<cplx> z(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) z[j] = cplx(x[j] * s, -xi[j] * s);
  return z;
}

bool is_hermitian_table(const PhasePolynomial& p, double tol) {
  if (p.kind() != VariableKind::ComplexPhase) return false;
  for (const auto& [key, c] : p.terms()) {
    cplx mirror = p.coefficient(key.second, key.first);
    if (std::abs(mirror - std::conj(c)) > tol) return false;
  }
  return true;
}

PhasePolynomial oscillator_quadratic(int dim) {
  PhasePolynomial p(VariableKind::RealPhase, dim);
  for (int j = 0; j < dim; ++j) {
    MultiIndex a(dim, 0), b(dim, 0);
    a[j] = 2;
    p.add_term(a, MultiIndex(dim, 0), cplx(0.5, 0.0));
    b[j] = 2;
    p.add_term(MultiIndex(dim, 0), b, cplx(0.5, 0.0));
  }
  return p;
}

}  // namespace osctrace
