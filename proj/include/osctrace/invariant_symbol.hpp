#pragma once

#include <complex>
#include <map>
#include <vector>

#include "osctrace/phase_polynomial.hpp"

namespace osctrace {

// Flow-invariant bihomogeneous symbol: a Hermitian table {c_{alpha beta}} with
// |alpha| = |beta| = k, representing the CP^{d-1} function
//     H([z]) = sum c_{alpha beta} z^alpha zbar^beta / |z|^{2k}.
// All symbols are parameterized on the unit sphere |z| = 1 ({p2 = 1} in the
// real picture, radius sqrt(2)).  isotropic_order tags how the ambient symbol
// scales off the sphere: order 0 means H itself, order 1 means the ambient
// symbol is H * sqrt(2 p2) (so its restriction to {p2 = 1} equals H).
class InvariantSymbol {
 public:
  InvariantSymbol(int dim, int bidegree, int isotropic_order);

  int dim() const { return dim_; }
  int bidegree() const { return bidegree_; }
  int isotropic_order() const { return order_; }

  void add_term(const MultiIndex& alpha, const MultiIndex& beta, std::complex<double> c);
  const std::map<std::pair<MultiIndex, MultiIndex>, std::complex<double>>& terms() const {
    return terms_;
  }

  // Largest |c_{alpha beta}|; the scale used for relative tolerances.
  double coefficient_scale() const;

  // Hermitian-table check: c_{beta alpha} = conj(c_{alpha beta}) within tol.
  bool is_hermitian(double tol = 1e-12) const;

  // The same coefficient table retagged as an order-0 sphere function.
  InvariantSymbol restricted_to_sphere() const;

  // The underlying numerator polynomial sum c z^alpha zbar^beta.
  PhasePolynomial numerator() const;

  friend InvariantSymbol operator+(const InvariantSymbol& a, const InvariantSymbol& b);
  friend InvariantSymbol operator*(double s, const InvariantSymbol& a);

 private:
  int dim_, bidegree_, order_;
  std::map<std::pair<MultiIndex, MultiIndex>, std::complex<double>> terms_;
};

// Descend an S^1-invariant bihomogeneous polynomial to CP^{d-1}.
// Rejects input that mixes bidegrees or has |alpha| != |beta| terms.
InvariantSymbol descend(const PhasePolynomial& p, int isotropic_order);

// H(z) for unit z; rejects non-unit input (|z| must be 1 within 1e-12).
// Hermitian symmetry guarantees a real value; the imaginary residue is
// checked against 1e-12 * scale and truncated.
double evaluate(const InvariantSymbol& h, const std::vector<std::complex<double>>& z);

// Coefficient transform of H under z |-> U z (U unitary on C^d).
InvariantSymbol unitary_rotate(const InvariantSymbol& h,
                               const std::vector<std::vector<std::complex<double>>>& u);

// Convenience: the diagonal "height" family H = sum_j w_j |z_j|^2 / |z|^2.
InvariantSymbol diagonal_symbol(const std::vector<double>& weights, int isotropic_order);

}  // namespace osctrace
