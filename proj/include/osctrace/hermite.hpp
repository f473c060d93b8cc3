#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "osctrace/multi_index.hpp"
#include "osctrace/phase_polynomial.hpp"

namespace osctrace {

// Occupation-number (Hermite product) basis conventions
// -----------------------------------------------------
// Level N carries the multi-indices |n| = N in the lexicographic order of
// level_basis(N, d); this ordering is shared bit-exactly with the monomial
// basis on the Bargmann-Fock side (|n> <-> z^n).
//
// Ladder operators: A_j |n> = sqrt(n_j) |n - e_j>, A*_j |n> = sqrt(n_j + 1)
// |n + e_j>, with x_j = (A_j + A*_j)/sqrt(2), xi_j = -i (A_j - A*_j)/sqrt(2).
// Weyl quantization of a degree <= 2 real polynomial is full symmetrization;
// the only non-commuting case is x_j xi_j, whose Weyl operator is
// (-i/2)(A_j^2 - A*_j^2).

// Family of Hermitian blocks indexed by energy level N = 0..n_max.
struct BlockOperator {
  int d = 0;
  int n_max = -1;
  std::vector<Eigen::MatrixXcd> blocks;

  const Eigen::MatrixXcd& block(int n) const { return blocks.at(n); }
};

// Sorted eigenvalues of one block.
struct SpectrumBlock {
  int level = 0;
  std::vector<double> eigenvalues;
};

// Operator on the stacked levels 0..n_max (may couple levels).
struct CoupledOperator {
  int d = 0;
  int n_max = -1;
  std::vector<int> level_offset;  // size n_max + 2; block N occupies [off[N], off[N+1])
  Eigen::MatrixXcd mat;

  int total_dim() const { return level_offset.empty() ? 0 : level_offset.back(); }
};

// H0 = (1/2)(-Laplace + |x|^2): block N is (N + d/2) Id.
BlockOperator build_h0(int d, int n_max);

// Weyl quantization of a real polynomial of total degree <= 2 on levels
// 0..n_max.  Couplings that would leave the stored range are truncated, so
// entries between kept levels are exact.  Rejects degree > 2.
CoupledOperator quantize_weyl_quadratic(const PhasePolynomial& q, int d, int n_max);

// P = (H0^{-1/2} Op(q) + Op(q) H0^{-1/2})/2, a self-adjoint order-1 operator
// with principal symbol q / sqrt(2 p2); H0^{-1/2} is the exact diagonal.
CoupledOperator make_order1_perturbation(const PhasePolynomial& q, int d, int n_max);

// Oscillator-flow average at the operator level. Matrix elements of
// (1/2pi) Int U0(-t) P U0(t) dt carry (1/2pi) Int e^{it(E_m - E_n)} dt, which
// kills everything but the energy-block-diagonal part, so the average is the
// exact extraction of the diagonal blocks; [H0, B] = 0 by construction.
BlockOperator average_operator(const CoupledOperator& p);

// Level-preserving ladder data of Op^w(q): the averaged block at level N is
//   (N + d/2)^{-1/2} [ sum_j number_coeff[j] (n_j + 1/2) + c0
//                      + sum_{j != k} hop[j][k] A*_j A_k ].
struct AveragedBlockData {
  double c0 = 0.0;
  std::vector<double> number_coeff;
  std::vector<std::vector<std::complex<double>>> hop;

  double number_sum() const;
  double hop_sum() const;
};
AveragedBlockData averaged_block_data(const PhasePolynomial& q, int d);

// Fast path: block N of average_operator(make_order1_perturbation(q, ...)),
// built directly from the level-preserving ladder terms.  Agrees with the
// slow path exactly.
Eigen::MatrixXcd averaged_perturbation_block(const PhasePolynomial& q, int d, int level);

// For d = 2 the averaged block is tridiagonal in the lexicographic basis;
// returns the sorted eigenvalues of averaged_perturbation_block without
// forming the dense matrix.  Used by the large spectral sweeps.
std::vector<double> averaged_block_eigenvalues_d2(const PhasePolynomial& q, int level);

SpectrumBlock block_spectrum(const BlockOperator& b, int level);

// Deterministic parallel map over levels 0..n_max (results keyed by level).
std::vector<SpectrumBlock> all_block_spectra(const BlockOperator& b);

}  // namespace osctrace
