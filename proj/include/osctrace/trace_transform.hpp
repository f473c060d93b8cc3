#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "osctrace/hermite.hpp"

namespace osctrace {

// Gaussian time window chi_hat(t) = exp(-(t - tau0)^2 / (2 w^2)) centered at
// tau0 = 2 pi k, normalized to chi_hat(tau0) = 1.  Its transform is the
// closed-form Gaussian chi_check(u) = (w / sqrt(2 pi)) exp(-w^2 u^2 / 2), so
// no numerical time integration is ever performed.  The hard ceiling
// w <= 0.5 keeps the window mass at the neighboring singularities
// (distance 2 pi) below 1e-12.
struct GaussianWindow {
  double center_k = 1.0;  // window sits at t = 2 pi center_k (half-integers allowed for scans)
  double width = 0.35;

  double tau0() const;
  double transform(double u) const;     // chi_check(u)
  double reach(double rel_tol) const;   // |u| beyond which chi_check < rel_tol * chi_check(0)
  double leakage() const;               // chi_hat at distance 2 pi (neighboring singularity)
  double halfway_mass() const;          // chi_hat at distance pi (reported diagnostic)
  void validate() const;                // throws on width > 0.5 or width <= 0
};

// One point mass of the spectral measure.
struct SpectralMass {
  double lambda = 0.0;
  double weight = 1.0;
};

// Eigenvalue with provenance, the assemble_spectrum output.
struct EigenvalueEntry {
  double lambda = 0.0;
  int level = 0;
  int index = 0;
};

// spectrum of H0 + B: lambda_{N,j} = N + d/2 + nu_{N,j}, flat and sorted.
// Rejects a gap in level coverage (blocks must cover 0..n_max contiguously).
std::vector<EigenvalueEntry> assemble_spectrum(const std::vector<SpectrumBlock>& blocks, int d);

struct TraceTransform {
  double center_k = 0.0;
  GaussianWindow window;
  std::vector<double> lambda_grid;
  std::vector<std::complex<double>> values;
  std::vector<double> tail_bound;  // truncation bound per grid point
};

// F^{-1}[chi_hat(t) w(t)](lambda) for w(t) = sum_j weight_j e^{-i t lambda_j}:
//   value(lambda) = e^{i tau0 lambda} sum_j weight_j e^{-i tau0 lambda_j}
//                   chi_check(lambda - lambda_j),
// summed in the given (ascending-lambda) mass order.
TraceTransform windowed_transform(const std::vector<SpectralMass>& masses,
                                  const GaussianWindow& window,
                                  const std::vector<double>& lambda_grid);

// Streaming accumulation for spectra too large to materialize.  Masses must
// be added in a fixed deterministic order (ascending level, ascending index);
// finalize applies the carrier phase and installs tail bounds.
class TransformAccumulator {
 public:
  TransformAccumulator(const GaussianWindow& window, std::vector<double> lambda_grid);

  void add(double lambda, double weight = 1.0);
  TraceTransform finalize(std::vector<double> tail_bound = {}) const;

  const std::vector<double>& grid() const { return grid_; }

 private:
  GaussianWindow window_;
  std::vector<double> grid_;
  std::vector<std::complex<double>> sums_;
  double reach_;
};

// Bound on the contribution of all levels above n_included, given a bound
// cluster_radius(N) >= max |nu_{N,j}| for the excluded levels: each excluded
// cluster contributes at most dim(N,d) chi_check(dist(lambda, cluster)).
std::vector<double> truncation_tail_bound(const std::vector<double>& lambda_grid,
                                          const GaussianWindow& window, int d, int n_included,
                                          const std::function<double(int)>& cluster_radius);

// e_{N,d,r}(t, a) = sum_N N^r e^{i t (N + sqrt(N) a + d/2)} evaluated as raw
// partial sums on a t-grid (ascending N term order; the N = 0 term is kept
// only for r = 0, matching mu_{N,d,r}).  Values can be large; convergence is
// supplied by windows downstream, never here.
std::vector<std::complex<double>> eval_e_series(double r, double a, int d, int n_max,
                                                const std::vector<double>& t_grid);

// The weighted point masses of the same series, for windowed transforms.
std::vector<SpectralMass> e_series_masses(double r, double a, int d, int n_max);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms residual of the log-log fit
};

// Ordinary least squares on (log x, log err); rejects non-positive inputs
// and fewer than 4 points.
RateFit fit_rate(const std::vector<double>& xs, const std::vector<double>& errs);

}  // namespace osctrace
