#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "osctrace/invariant_symbol.hpp"

namespace osctrace {

// Morse data of a symbol at a critical point of CP^{d-1}.
//
// hess_det and signature refer to the real (2d-2)x(2d-2) Hessian in an
// orthonormal frame for the normalized Fubini-Study metric, normalized so the
// Kaehler volume of CP^{d-1} is (2pi)^{d-1}/(d-1)!  (twice the quotient metric
// of the unit sphere).  Any global convention factor against the trace
// theorems is handled by calibration, not here.
struct CriticalPointData {
  std::vector<std::complex<double>> point;  // unit representative, phase-gauged
  double value = 0.0;
  double hess_det = 1.0;   // d_j > 0
  int signature = 0;       // sigma_j, parity matches 2d-2
  int morse_index = 0;     // number of negative Hessian eigenvalues
};

struct NotMorseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IncompleteSearchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CriticalSearchOptions {
  unsigned long long seed = 12345;
  int restarts_per_dim = 64;      // 64*d random starts
  double grad_tol = 1e-12;        // convergence threshold on the horizontal gradient
  double dedup_fs_distance = 1e-6;
  double degenerate_rel_det = 1e-8;
  double verify_grad_tol = 1e-10; // verification-grid convergence requirement
  int verify_per_dim = 32;
};

// Horizontal gradient and chart Hessian of H = F/|z|^{2k} at a unit point.
// The returned Hessian is in the sphere-orthonormal (quotient-metric) frame;
// hessian_data rescales it to the normalized FS convention.
struct LocalDerivatives {
  Eigen::VectorXd gradient;                     // 2(d-1) components in the frame
  Eigen::MatrixXd hessian;                      // (2d-2)x(2d-2), symmetric
  std::vector<std::complex<double>> frame;      // d-1 complex frame vectors of z-perp
};
LocalDerivatives local_derivatives(const InvariantSymbol& h,
                                   const std::vector<std::complex<double>>& z);

// (d_j, sigma_j) at a point with horizontal gradient below 1e-10; analytic
// second derivatives of the coefficient table, no finite differences.
std::pair<double, int> hessian_data(const InvariantSymbol& h,
                                    const std::vector<std::complex<double>>& z);

// All critical points of H on CP^{d-1}, deduplicated modulo phase.
// Throws NotMorseError when a Hessian determinant falls below the relative
// threshold, IncompleteSearchError when the verification pass finds an
// unexplained limit or the Poincare-Hopf sum is off.
std::vector<CriticalPointData> find_critical_points(const InvariantSymbol& h,
                                                    const CriticalSearchOptions& opt = {});

double fubini_study_distance(const std::vector<std::complex<double>>& a,
                             const std::vector<std::complex<double>>& b);

}  // namespace osctrace
