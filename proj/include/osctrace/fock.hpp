#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <boost/rational.hpp>

#include "osctrace/invariant_symbol.hpp"
#include "osctrace/multi_index.hpp"

namespace osctrace {

// Two inner products back one Toeplitz interface:
//  - FubiniStudy: level-N pairing on CP^{d-1} via normalized sphere moments,
//      <z^g, z^d>_N = delta * (d-1)! g! / (N+d-1)!.
//    Canonical for the scaled-propagator trace asymptotics; the default.
//  - BargmannFock: Gaussian pairing on C^d, <z^g, z^d> = delta * pi^d g!.
//    Used for the degree-operator identity and Berezin cross-checks.
// They differ at O(1/N).
enum class InnerProduct { FubiniStudy, BargmannFock };

struct ToeplitzBlock {
  int level = 0;
  int d = 0;
  InnerProduct variant = InnerProduct::FubiniStudy;
  Eigen::MatrixXcd matrix;  // Hermitian, monomial basis orthonormalized
};

// Normalized sphere moment Int_{S^{2d-1}} z^g zbar^h dsigma: zero unless
// g = h, else (d-1)! g! / (|g|+d-1)!.  Exact rational; requires
// |g| + d - 1 <= 20 so the value fits in long long (larger levels use the
// floating-point ratio path inside the matrix assembly).
boost::rational<long long> monomial_integral(const MultiIndex& g, const MultiIndex& h, int d);

// Compression of the CP^{d-1} multiplication operator by H to degree-N
// polynomials: entries <H e_g, e_d> in the orthonormalized monomial basis,
// assembled from moment ratios at degree N + k.  Requires an order-0 symbol.
ToeplitzBlock toeplitz(const InvariantSymbol& h, int level,
                       InnerProduct variant = InnerProduct::FubiniStudy);

// Gaussian compression Pi_N Op(a) Pi_N of an ambient polynomial symbol on
// Bargmann-Fock space (only |alpha| = |beta| terms survive the compression).
ToeplitzBlock toeplitz_ambient_bf(const PhasePolynomial& ambient, int level);

std::vector<double> toeplitz_eigenvalues(const ToeplitzBlock& t);

// Tr exp(i t sqrt(N) T) from the eigenvalues (ascending summation order).
std::complex<double> block_propagator_trace(const std::vector<double>& eigenvalues, int level,
                                            double t);
std::complex<double> block_propagator_trace(const ToeplitzBlock& t, double time);

// Exact trace of toeplitz(h, level) and the Fubini-Study average of h,
// both from moment ratios (Tr T_N[H] = dim * avg(H) identity check).
double toeplitz_trace(const InvariantSymbol& h, int level);
double symbol_fs_average(const InvariantSymbol& h);

// Operator norm of (B_N / sqrt(N + d/2) - T_N[H1]) in the matched basis
// ordering; the Bargmann transform identifies occupation state |n> with the
// monomial z^n, so the bases align index by index.
double cross_model_compare(const Eigen::MatrixXcd& hermite_block, const InvariantSymbol& h1,
                           int level, int d,
                           InnerProduct variant = InnerProduct::FubiniStudy);

}  // namespace osctrace
