#pragma once

#include <complex>
#include <vector>

#include "osctrace/critical_points.hpp"

namespace osctrace {

// Leading singularity data at t = 2 pi k: one (amplitude, frequency) pair per
// critical point, order exponent (d-1)/2.
struct SingularityTerm {
  std::complex<double> gamma;  // gamma_{k,j,0}
  double frequency = 0.0;      // averaged principal symbol value at z_j
};

struct SingularityPrediction {
  int k = 0;
  int d = 0;
  std::vector<SingularityTerm> terms;

  double order_exponent() const { return 0.5 * (d - 1); }
  double amplitude_ceiling() const {  // sum of |gamma|, the beat envelope cap
    double s = 0.0;
    for (const auto& t : terms) s += std::abs(t.gamma);
    return s;
  }
};

// gamma_{k,j,0} = (pi k)^{-(d-1)} d_j^{-1/2} e^{i pi (-sigma_j/4 + d k)}
//                 e^{-2 pi i k p0_j}.
// phase_flag = -1 flips the sign of the sigma_j/4 term (the statement/proof
// ambiguity switch; +1 is the statement as written).
std::complex<double> predict_gamma0(int k, const CriticalPointData& crit, double p0_value, int d,
                                    int phase_flag = +1);

// F^{-1}{w localized at 2 pi k}(lambda) truncated at l = 0:
//   lambda^{(d-1)/2} e^{2 pi i k lambda} sum_j gamma_j
//   e^{-2 pi i k lambda^{1/2} freq_j}.
std::vector<std::complex<double>> predict_singularity(const std::vector<double>& lambda_grid,
                                                      const SingularityPrediction& pred);

// Scaled-propagator trace leading term, m = d-1:
//   (N/2pi)^m (t sqrt(N) / 4pi)^{-m}
//   sum_j d_j^{-1/2} e^{i t sqrt(N) H(z_j)} e^{i pi sigma_j / 4}.
// Rejects t = 0 (exact answer there is dim(N, d)).  calibration multiplies
// the whole value (the Fubini-Study normalization constant fixed by the
// small-scale oracle run).
std::complex<double> predict_block_trace(int level, double t,
                                         const std::vector<CriticalPointData>& crit, int d,
                                         double calibration = 1.0, int phase_flag = +1);

// Leading term of F^{-1}{rho_hat(t) w_r(t,a)}(lambda) with the carrier
// e^{2 pi i k0 lambda} stripped:
//   lambda^{-r} e^{i pi k0 d} e^{s 2 pi i k0 a lambda^{1/2}},  s = sign_flag.
std::complex<double> predict_equiv(double lambda, double r, double a, int k0, int d,
                                   int sign_flag);

}  // namespace osctrace
