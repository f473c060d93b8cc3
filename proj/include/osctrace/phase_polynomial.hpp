#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include "osctrace/multi_index.hpp"

namespace osctrace {

// Variable conventions
// --------------------
// RealPhase polynomials live on R^{2d} with variables (x, xi); a term is
// x^a xi^b. ComplexPhase polynomials live on C^d ~ R^{2d} with variables
// (z, zbar); a term is z^alpha zbar^beta.
//
// The two pictures are glued by the complex canonical transformation
//   kappa: (x, xi) |-> ((x - i xi)/sqrt(2), (xi - i x)/sqrt(2)),
// restricted to the IR subspace {(z, -i zbar)}.  The pullback substitution is
//   x_j = (z_j + zbar_j)/sqrt(2),   xi_j = i (z_j - zbar_j)/sqrt(2),
// under which p2 = (|x|^2 + |xi|^2)/2 becomes |z|^2 and the oscillator flow
// becomes the phase rotation z |-> e^{it} z.  Flow averaging is therefore the
// bidegree filter keeping terms with |alpha| = |beta|.
//
// The Laplacian below is the Euclidean one on R^{2d}, written in Wirtinger
// form: Delta = 4 sum_j d/dz_j d/dzbar_j, so Delta |z|^2 = 4d.

enum class VariableKind { RealPhase, ComplexPhase };

// Exact coefficient type for the rational-arithmetic path (Berezin flow
// identities are checked exactly on this type).  Multiprecision integers keep
// the iterated-Laplacian coefficients exact at any degree.
using BigRational = boost::rational<boost::multiprecision::cpp_int>;

struct RationalComplex {
  BigRational re{0}, im{0};

  RationalComplex() = default;
  RationalComplex(long long n) : re(boost::multiprecision::cpp_int(n)), im(0) {}
  RationalComplex(BigRational r, BigRational i) : re(std::move(r)), im(std::move(i)) {}

  friend RationalComplex operator+(const RationalComplex& a, const RationalComplex& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend RationalComplex operator-(const RationalComplex& a, const RationalComplex& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend RationalComplex operator*(const RationalComplex& a, const RationalComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(const RationalComplex& a, const RationalComplex& b) {
    return a.re == b.re && a.im == b.im;
  }
};

template <class C>
struct CoeffOps {
  static bool is_zero(const C& c) { return c == C(0); }
  static C conj(const C& c) { return std::conj(c); }
  static C from_ratio(long long num, long long den) {
    return C(static_cast<double>(num) / static_cast<double>(den));
  }
  static C from_int(long long n) { return C(static_cast<double>(n)); }
};

template <>
struct CoeffOps<RationalComplex> {
  static bool is_zero(const RationalComplex& c) { return c.re == 0 && c.im == 0; }
  static RationalComplex conj(const RationalComplex& c) { return {c.re, -c.im}; }
  static RationalComplex from_ratio(long long num, long long den) {
    return {BigRational(boost::multiprecision::cpp_int(num), boost::multiprecision::cpp_int(den)),
            BigRational(0)};
  }
  static RationalComplex from_int(long long n) { return RationalComplex(n); }
};

// Finitely supported coefficient table over pairs of multi-indices.
// Zero coefficients are never stored.
template <class C>
class BasicPhasePolynomial {
 public:
  using TermKey = std::pair<MultiIndex, MultiIndex>;
  using TermMap = std::map<TermKey, C>;

  BasicPhasePolynomial(VariableKind kind, int dim) : kind_(kind), dim_(dim) {
    if (dim < 1) throw std::invalid_argument("PhasePolynomial: dim >= 1 required");
  }

  VariableKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const TermMap& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  void add_term(const MultiIndex& a, const MultiIndex& b, const C& c) {
    check_index(a);
    check_index(b);
    if (CoeffOps<C>::is_zero(c)) return;
    auto key = TermKey(a, b);
    auto it = terms_.find(key);
    if (it == terms_.end()) {
      terms_.emplace(key, c);
    } else {
      it->second = it->second + c;
      if (CoeffOps<C>::is_zero(it->second)) terms_.erase(it);
    }
  }

  C coefficient(const MultiIndex& a, const MultiIndex& b) const {
    auto it = terms_.find(TermKey(a, b));
    return it == terms_.end() ? C(0) : it->second;
  }

  int total_degree() const {
    int deg = 0;
    for (const auto& [key, c] : terms_) deg = std::max(deg, degree_of(key.first) + degree_of(key.second));
    return deg;
  }

  friend BasicPhasePolynomial operator+(const BasicPhasePolynomial& p, const BasicPhasePolynomial& q) {
    p.check_same(q);
    BasicPhasePolynomial r = p;
    for (const auto& [key, c] : q.terms_) r.add_term(key.first, key.second, c);
    return r;
  }

  friend BasicPhasePolynomial operator-(const BasicPhasePolynomial& p, const BasicPhasePolynomial& q) {
    p.check_same(q);
    BasicPhasePolynomial r = p;
    for (const auto& [key, c] : q.terms_) r.add_term(key.first, key.second, C(0) - c);
    return r;
  }

  friend BasicPhasePolynomial operator*(const C& s, const BasicPhasePolynomial& p) {
    BasicPhasePolynomial r(p.kind_, p.dim_);
    for (const auto& [key, c] : p.terms_) r.add_term(key.first, key.second, s * c);
    return r;
  }

  friend BasicPhasePolynomial operator*(const BasicPhasePolynomial& p, const BasicPhasePolynomial& q) {
    p.check_same(q);
    BasicPhasePolynomial r(p.kind_, p.dim_);
    for (const auto& [ka, ca] : p.terms_) {
      for (const auto& [kb, cb] : q.terms_) {
        MultiIndex a = ka.first, b = ka.second;
        for (int j = 0; j < p.dim_; ++j) {
          a[j] += kb.first[j];
          b[j] += kb.second[j];
        }
        r.add_term(a, b, ca * cb);
      }
    }
    return r;
  }

  friend bool operator==(const BasicPhasePolynomial& p, const BasicPhasePolynomial& q) {
    return p.kind_ == q.kind_ && p.dim_ == q.dim_ && p.terms_ == q.terms_;
  }

  // Euclidean Laplacian on R^{2d}; ComplexPhase kind only.
  BasicPhasePolynomial laplacian() const {
    require_complex("laplacian");
    BasicPhasePolynomial r(kind_, dim_);
    for (const auto& [key, c] : terms_) {
      for (int j = 0; j < dim_; ++j) {
        int aj = key.first[j], bj = key.second[j];
        if (aj == 0 || bj == 0) continue;
        MultiIndex a = key.first, b = key.second;
        a[j] -= 1;
        b[j] -= 1;
        r.add_term(a, b, CoeffOps<C>::from_int(4ll * aj * bj) * c);
      }
    }
    return r;
  }

  // exp(sign * Delta/8) as a finite sum; Delta is degree-lowering so the sum
  // terminates at floor(total_degree/2).
  BasicPhasePolynomial heat_flow(int sign) const {
    require_complex("heat_flow");
    BasicPhasePolynomial result = *this;
    BasicPhasePolynomial power = *this;
    long long denom = 1;
    int mmax = total_degree() / 2;
    for (int m = 1; m <= mmax; ++m) {
      power = power.laplacian();
      denom *= 8ll * m;
      C coeff = CoeffOps<C>::from_ratio((sign > 0 || m % 2 == 0) ? 1 : -1, denom);
      result = result + coeff * power;
    }
    return result;
  }

  // Substitute each source variable by a degree-1 polynomial in a target ring.
  // subs[v] is the image of variable v; for RealPhase sources v runs over
  // x_1..x_d then xi_1..xi_d, for ComplexPhase over z_1..z_d then zbar_1..zbar_d.
  BasicPhasePolynomial substitute_linear(VariableKind target_kind, int target_dim,
                                         const std::vector<BasicPhasePolynomial>& subs) const {
    const int nvars = 2 * dim_;
    if (static_cast<int>(subs.size()) != nvars)
      throw std::invalid_argument("substitute_linear: need one image per variable");
    BasicPhasePolynomial result(target_kind, target_dim);
    for (const auto& [key, c] : terms_) {
      BasicPhasePolynomial prod = constant(target_kind, target_dim, c);
      for (int j = 0; j < dim_; ++j) {
        for (int rep = 0; rep < key.first[j]; ++rep) prod = prod * subs[j];
        for (int rep = 0; rep < key.second[j]; ++rep) prod = prod * subs[dim_ + j];
      }
      result = result + prod;
    }
    return result;
  }

  static BasicPhasePolynomial constant(VariableKind kind, int dim, const C& c) {
    BasicPhasePolynomial p(kind, dim);
    p.add_term(MultiIndex(dim, 0), MultiIndex(dim, 0), c);
    return p;
  }

  static BasicPhasePolynomial variable(VariableKind kind, int dim, int which, bool second_family) {
    BasicPhasePolynomial p(kind, dim);
    MultiIndex a(dim, 0), b(dim, 0);
    (second_family ? b : a)[which] = 1;
    p.add_term(a, b, CoeffOps<C>::from_int(1));
    return p;
  }

 private:
  void check_index(const MultiIndex& m) const {
    if (static_cast<int>(m.size()) != dim_)
      throw std::invalid_argument("PhasePolynomial: multi-index size mismatch");
    for (int v : m)
      if (v < 0) throw std::invalid_argument("PhasePolynomial: negative exponent");
  }
  void check_same(const BasicPhasePolynomial& q) const {
    if (kind_ != q.kind_ || dim_ != q.dim_)
      throw std::invalid_argument("PhasePolynomial: kind/dim mismatch");
  }
  void require_complex(const char* op) const {
    if (kind_ != VariableKind::ComplexPhase)
      throw std::invalid_argument(std::string(op) + ": ComplexPhase polynomial required");
  }

  VariableKind kind_;
  int dim_;
  TermMap terms_;
};

using PhasePolynomial = BasicPhasePolynomial<std::complex<double>>;
using RationalPhasePolynomial = BasicPhasePolynomial<RationalComplex>;

// ---- double-precision operations on PhasePolynomial ----

// Evaluate a ComplexPhase polynomial at z (zbar taken as conjugate).
std::complex<double> evaluate_complex(const PhasePolynomial& p,
                                      const std::vector<std::complex<double>>& z);

// Evaluate a RealPhase polynomial at (x, xi).
std::complex<double> evaluate_real(const PhasePolynomial& p, const std::vector<double>& x,
                                   const std::vector<double>& xi);

// Orbit average along the oscillator flow: keeps terms with |alpha| = |beta|.
// Rejects RealPhase input (convert with kappa_pullback first).
PhasePolynomial flow_average(const PhasePolynomial& p);

// Pullback to the complex picture: x_j = (z_j + zbar_j)/sqrt(2),
// xi_j = i (z_j - zbar_j)/sqrt(2).  Sends p2 to |z|^2 and preserves values
// pointwise through z(x, xi) = (x - i xi)/sqrt(2).
PhasePolynomial kappa_pullback(const PhasePolynomial& p);

// Contravariant-symbol direction of the Berezin pair: exp(-Delta/8), an exact
// finite sum on polynomials.  berezin_inverse is exp(+Delta/8).
inline PhasePolynomial berezin_forward(const PhasePolynomial& p) { return p.heat_flow(-1); }
inline PhasePolynomial berezin_inverse(const PhasePolynomial& p) { return p.heat_flow(+1); }
inline RationalPhasePolynomial berezin_forward(const RationalPhasePolynomial& p) { return p.heat_flow(-1); }
inline RationalPhasePolynomial berezin_inverse(const RationalPhasePolynomial& p) { return p.heat_flow(+1); }

// Map z(x, xi) used by the pullback consistency checks.
std::vector<std::complex<double>> kappa_point(const std::vector<double>& x,
                                              const std::vector<double>& xi);

// True if c_{beta alpha} = conj(c_{alpha beta}) within tol (represents a
// real-valued function on C^d).
bool is_hermitian_table(const PhasePolynomial& p, double tol);

// Oscillator quadratic p2 = (|x|^2 + |xi|^2)/2 as a RealPhase polynomial.
PhasePolynomial oscillator_quadratic(int dim);

}  // namespace osctrace
