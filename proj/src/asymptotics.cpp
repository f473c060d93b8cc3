#include "osctrace/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

namespace osctrace {

using cplx = std::complex<double>;

static const double kPi = 3.14159265358979323846;

cplx predict_gamma0(int k, const CriticalPointData& crit, double p0_value, int d,
                    int phase_flag) {
  if (k == 0) throw std::invalid_argument("predict_gamma0: k = 0 is the Weyl-law regime");
  if (phase_flag != 1 && phase_flag != -1)
    throw std::invalid_argument("predict_gamma0: phase flag must be +1 or -1");
  double modulus = std::pow(kPi * std::abs(k), -(d - 1)) / std::sqrt(crit.hess_det);
  double phase = kPi * (-phase_flag * crit.signature / 4.0 + static_cast<double>(d) * k) -
                 2.0 * kPi * k * p0_value;
  return std::polar(modulus, phase);
}

std::vector<cplx> predict_singularity(const std::vector<double>& lambda_grid,
                                      const SingularityPrediction& pred) {
  std::vector<cplx> out(lambda_grid.size());
  const double e = pred.order_exponent();
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    const double lam = lambda_grid[i];
    if (lam <= 0.0) throw std::invalid_argument("predict_singularity: lambda > 0 required");
    cplx sum(0.0, 0.0);
    for (const auto& term : pred.terms)
      sum += term.gamma * std::polar(1.0, -2.0 * kPi * pred.k * std::sqrt(lam) * term.frequency);
    out[i] = std::pow(lam, e) * std::polar(1.0, 2.0 * kPi * pred.k * lam) * sum;
  }
  return out;
}

cplx predict_block_trace(int level, double t, const std::vector<CriticalPointData>& crit, int d,
                         double calibration, int phase_flag) {
  if (t == 0.0) throw std::invalid_argument("predict_block_trace: t = 0 (exact answer is dim(N,d))");
  const int m = d - 1;
  const double sqn = std::sqrt(static_cast<double>(level));
  double prefactor = std::pow(level / (2.0 * kPi), m) * std::pow(t * sqn / (4.0 * kPi), -m);
  cplx sum(0.0, 0.0);
  for (const auto& c : crit) {
    sum += std::polar(1.0 / std::sqrt(c.hess_det),
                      t * sqn * c.value + phase_flag * kPi * c.signature / 4.0);
  }
  return calibration * prefactor * sum;
}

cplx predict_equiv(double lambda, double r, double a, int k0, int d, int sign_flag) {
  if (lambda <= 0.0) throw std::invalid_argument("predict_equiv: lambda > 0 required");
  if (k0 == 0) throw std::invalid_argument("predict_equiv: k0 != 0 required");
  if (sign_flag != 1 && sign_flag != -1)
    throw std::invalid_argument("predict_equiv: sign flag must be +1 or -1");
  double phase = kPi * k0 * d + sign_flag * 2.0 * kPi * k0 * a * std::sqrt(lambda);
  return std::pow(lambda, -r) * std::polar(1.0, phase);
}

}  // namespace osctrace
