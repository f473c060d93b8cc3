#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace osctrace {

// Eigenvalues (ascending) of a Hermitian matrix, LAPACK zheevd.
// Detects diagonal and (for complex Hermitian) tridiagonal structure and
// routes those to O(n)/O(n^2) paths; results are backward stable either way.
std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& m);

// Eigenvalues (ascending) of a real symmetric tridiagonal matrix, LAPACK dstev.
std::vector<double> tridiagonal_eigenvalues(std::vector<double> diag,
                                            std::vector<double> offdiag);

// Operator (spectral) norm of a Hermitian matrix.
double hermitian_operator_norm(const Eigen::MatrixXcd& m);

double hermitian_deviation(const Eigen::MatrixXcd& m);  // max |m - m^H| entry

}  // namespace osctrace
