#include "osctrace/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <lapacke.h>

namespace osctrace {

std::vector<double> tridiagonal_eigenvalues(std::vector<double> diag,
                                            std::vector<double> offdiag) {
  const int n = static_cast<int>(diag.size());
  if (n == 0) return {};
  if (static_cast<int>(offdiag.size()) != std::max(0, n - 1))
    throw std::invalid_argument("tridiagonal_eigenvalues: offdiagonal size must be n-1");
  int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'N', n, diag.data(), offdiag.data(), nullptr, 1);
  if (info != 0) throw std::runtime_error("LAPACKE_dstev failed");
  return diag;
}

std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& m) {
  const int n = static_cast<int>(m.rows());
  if (m.cols() != n) throw std::invalid_argument("hermitian_eigenvalues: square matrix required");
  if (n == 0) return {};

  // structure probes
  bool diagonal = true;
  bool tridiag = true;
  for (int j = 0; j < n && (diagonal || tridiag); ++j) {
    for (int i = 0; i < n; ++i) {
      if (i != j && m(i, j) != std::complex<double>(0.0, 0.0)) {
        diagonal = false;
        if (std::abs(i - j) > 1) tridiag = false;
      }
    }
  }
  if (diagonal) {
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = m(i, i).real();
    std::sort(ev.begin(), ev.end());
    return ev;
  }
  if (tridiag) {
    // gauge the off-diagonal phases away: |t_i| on the subdiagonal gives a
    // unitarily equivalent real symmetric tridiagonal matrix
    std::vector<double> dia(n), off(std::max(0, n - 1));
    for (int i = 0; i < n; ++i) dia[i] = m(i, i).real();
    for (int i = 0; i + 1 < n; ++i) off[i] = std::abs(m(i + 1, i));
    return tridiagonal_eigenvalues(std::move(dia), std::move(off));
  }

  Eigen::MatrixXcd a = m;  // zheevd overwrites
  std::vector<double> ev(n);
  int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n,
                            reinterpret_cast<lapack_complex_double*>(a.data()), n, ev.data());
  if (info != 0) throw std::runtime_error("LAPACKE_zheevd failed");
  return ev;
}

double hermitian_operator_norm(const Eigen::MatrixXcd& m) {
  if (m.rows() == 0) return 0.0;
  std::vector<double> ev = hermitian_eigenvalues(m);
  return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

double hermitian_deviation(const Eigen::MatrixXcd& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace osctrace
