#include "osctrace/invariant_symbol.hpp"

#include <cmath>
#include <stdexcept>

namespace osctrace {

using cplx = std::complex<double>;

InvariantSymbol::InvariantSymbol(int dim, int bidegree, int isotropic_order)
    : dim_(dim), bidegree_(bidegree), order_(isotropic_order) {
  if (dim < 1) throw std::invalid_argument("InvariantSymbol: dim >= 1 required");
  if (bidegree < 1) throw std::invalid_argument("InvariantSymbol: bidegree >= 1 required");
  if (isotropic_order != 0 && isotropic_order != 1)
    throw std::invalid_argument("InvariantSymbol: isotropic order must be 0 or 1");
}

void InvariantSymbol::add_term(const MultiIndex& alpha, const MultiIndex& beta, cplx c) {
  if (static_cast<int>(alpha.size()) != dim_ || static_cast<int>(beta.size()) != dim_)
    throw std::invalid_argument("InvariantSymbol: index size mismatch");
  if (degree_of(alpha) != bidegree_ || degree_of(beta) != bidegree_)
    throw std::invalid_argument("InvariantSymbol: term degree must equal the bidegree");
  if (c == cplx(0.0, 0.0)) return;
  auto key = std::make_pair(alpha, beta);
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    terms_.emplace(key, c);
  } else {
    it->second += c;
    if (it->second == cplx(0.0, 0.0)) terms_.erase(it);
  }
}

double InvariantSymbol::coefficient_scale() const {
  double s = 0.0;
  for (const auto& [key, c] : terms_) s = std::max(s, std::abs(c));
  return s;
}

bool InvariantSymbol::is_hermitian(double tol) const {
  for (const auto& [key, c] : terms_) {
    auto it = terms_.find(std::make_pair(key.second, key.first));
    cplx mirror = (it == terms_.end()) ? cplx(0.0, 0.0) : it->second;
    if (std::abs(mirror - std::conj(c)) > tol * std::max(1.0, coefficient_scale())) return false;
  }
  return true;
}

InvariantSymbol InvariantSymbol::restricted_to_sphere() const {
  InvariantSymbol r(dim_, bidegree_, 0);
  r.terms_ = terms_;
  return r;
}

PhasePolynomial InvariantSymbol::numerator() const {
  PhasePolynomial p(VariableKind::ComplexPhase, dim_);
  for (const auto& [key, c] : terms_) p.add_term(key.first, key.second, c);
  return p;
}

InvariantSymbol operator+(const InvariantSymbol& a, const InvariantSymbol& b) {
  if (a.dim_ != b.dim_ || a.bidegree_ != b.bidegree_ || a.order_ != b.order_)
    throw std::invalid_argument("InvariantSymbol +: shape mismatch");
  InvariantSymbol r = a;
  for (const auto& [key, c] : b.terms_) r.add_term(key.first, key.second, c);
  return r;
}

InvariantSymbol operator*(double s, const InvariantSymbol& a) {
  InvariantSymbol r(a.dim_, a.bidegree_, a.order_);
  for (const auto& [key, c] : a.terms_) r.add_term(key.first, key.second, s * c);
  return r;
}

InvariantSymbol descend(const PhasePolynomial& p, int isotropic_order) {
  if (p.kind() != VariableKind::ComplexPhase)
    throw std::invalid_argument("descend: ComplexPhase polynomial required");
  if (p.empty()) throw std::invalid_argument("descend: zero polynomial has no bidegree");
  int k = -1;
  for (const auto& [key, c] : p.terms()) {
    int ka = degree_of(key.first), kb = degree_of(key.second);
    if (ka != kb) throw std::invalid_argument("descend: input is not S^1-invariant (|alpha| != |beta|)");
    if (k < 0) k = ka;
    if (ka != k) throw std::invalid_argument("descend: mixed bidegrees");
  }
  InvariantSymbol h(p.dim(), k, isotropic_order);
  for (const auto& [key, c] : p.terms()) h.add_term(key.first, key.second, c);
  if (!h.is_hermitian(1e-12))
    throw std::invalid_argument("descend: coefficient table is not Hermitian (symbol not real-valued)");
  return h;
}

double evaluate(const InvariantSymbol& h, const std::vector<cplx>& z) {
  if (static_cast<int>(z.size()) != h.dim())
    throw std::invalid_argument("evaluate: point dimension mismatch");
  double norm2 = 0.0;
  for (const auto& zj : z) norm2 += std::norm(zj);
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12)
    throw std::invalid_argument("evaluate: point must lie on the unit sphere");
  cplx sum(0.0, 0.0);
  for (const auto& [key, c] : h.terms()) {
    cplx t = c;
    for (int j = 0; j < h.dim(); ++j) {
      for (int r = 0; r < key.first[j]; ++r) t *= z[j];
      for (int r = 0; r < key.second[j]; ++r) t *= std::conj(z[j]);
    }
    sum += t;
  }
  double scale = std::max(1.0, h.coefficient_scale());
  if (std::abs(sum.imag()) > 1e-12 * scale)
    throw std::runtime_error("evaluate: non-real value; coefficient table is not Hermitian");
  return sum.real();
}

InvariantSymbol unitary_rotate(const InvariantSymbol& h,
                               const std::vector<std::vector<cplx>>& u) {
  const int d = h.dim();
  if (static_cast<int>(u.size()) != d)
    throw std::invalid_argument("unitary_rotate: matrix dimension mismatch");
  // H'(z) = H(U z): substitute z_j -> sum_l U_{jl} z_l into the numerator.
  std::vector<PhasePolynomial> subs;
  subs.reserve(2 * d);
  for (int j = 0; j < d; ++j) {
    PhasePolynomial im(VariableKind::ComplexPhase, d);
    for (int l = 0; l < d; ++l) {
      MultiIndex a(d, 0), b(d, 0);
      a[l] = 1;
      im.add_term(a, b, u[j][l]);
    }
    subs.push_back(im);
  }
  for (int j = 0; j < d; ++j) {
    PhasePolynomial im(VariableKind::ComplexPhase, d);
    for (int l = 0; l < d; ++l) {
      MultiIndex a(d, 0), b(d, 0);
      b[l] = 1;
      im.add_term(a, b, std::conj(u[j][l]));
    }
    subs.push_back(im);
  }
  PhasePolynomial rotated = h.numerator().substitute_linear(VariableKind::ComplexPhase, d, subs);
  return descend(rotated, h.isotropic_order());
}

InvariantSymbol diagonal_symbol(const std::vector<double>& weights, int isotropic_order) {
  const int d = static_cast<int>(weights.size());
  InvariantSymbol h(d, 1, isotropic_order);
  for (int j = 0; j < d; ++j) {
    MultiIndex e(d, 0);
    e[j] = 1;
    h.add_term(e, e, cplx(weights[j], 0.0));
  }
  return h;
}

}  // namespace osctrace
