#include "osctrace/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "osctrace/linalg.hpp"

namespace osctrace {

using cplx = std::complex<double>;

static const double kPi = 3.14159265358979323846;
static const double kTwoPi = 2.0 * kPi;

PhasePolynomial oscillator_mode_quadratic(const std::vector<double>& weights) {
  const int d = static_cast<int>(weights.size());
  PhasePolynomial q(VariableKind::RealPhase, d);
  for (int j = 0; j < d; ++j) {
    MultiIndex a(d, 0), b(d, 0);
    a[j] = 2;
    q.add_term(a, MultiIndex(d, 0), cplx(weights[j] / 2.0, 0.0));
    b[j] = 2;
    q.add_term(MultiIndex(d, 0), b, cplx(weights[j] / 2.0, 0.0));
  }
  return q;
}

PhasePolynomial exchange_quadratic(int d, int j, int k, double c) {
  if (j == k) throw std::invalid_argument("exchange_quadratic: j != k required");
  PhasePolynomial q(VariableKind::RealPhase, d);
  MultiIndex a(d, 0);
  a[j] = 1;
  a[k] = 1;
  q.add_term(a, MultiIndex(d, 0), cplx(c, 0.0));
  MultiIndex b(d, 0);
  b[j] = 1;
  b[k] = 1;
  q.add_term(MultiIndex(d, 0), b, cplx(c, 0.0));
  return q;
}

PerturbationPipeline build_perturbation_pipeline(const PhasePolynomial& q,
                                                 unsigned long long seed) {
  PerturbationPipeline pipe{
      q, kappa_pullback(q), PhasePolynomial(VariableKind::ComplexPhase, q.dim()),
      InvariantSymbol(q.dim(), 1, 1), {}};
  pipe.averaged = flow_average(pipe.q_complex);
  pipe.h1 = descend(pipe.averaged, 1);
  CriticalSearchOptions opt;
  opt.seed = seed;
  pipe.critical = find_critical_points(pipe.h1, opt);
  return pipe;
}

std::vector<double> perturbed_block_eigenvalues(const PhasePolynomial& q, int d, int level) {
  if (d == 2) return averaged_block_eigenvalues_d2(q, level);
  return hermitian_eigenvalues(averaged_perturbation_block(q, d, level));
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw std::invalid_argument("log_grid: bad range");
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i)
    g[i] = lo * std::exp(std::log(hi / lo) * i / double(count - 1));
  return g;
}

std::vector<double> linear_grid(double lo, double hi, int count) {
  if (!(hi > lo) || count < 2) throw std::invalid_argument("linear_grid: bad range");
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) g[i] = lo + (hi - lo) * i / double(count - 1);
  return g;
}

std::vector<double> sqrt_uniform_grid(double lambda_lo, double lambda_hi, double ds) {
  if (!(lambda_lo > 0.0) || !(lambda_hi > lambda_lo) || !(ds > 0.0))
    throw std::invalid_argument("sqrt_uniform_grid: bad range");
  std::vector<double> g;
  for (double s = std::sqrt(lambda_lo); s <= std::sqrt(lambda_hi); s += ds) g.push_back(s * s);
  return g;
}

TrCalibration calibrate_against_tr(const InvariantSymbol& h_order0,
                                   const std::vector<CriticalPointData>& crit, int d, double t,
                                   std::vector<int> levels) {
  TrCalibration cal;
  double log_ratio_sum = 0.0;
  int used = 0;
  cplx corr_p(0.0, 0.0), corr_m(0.0, 0.0);
  double norm = 0.0;
  for (int n : levels) {
    ToeplitzBlock tb = toeplitz(h_order0, n, InnerProduct::FubiniStudy);
    cplx measured = block_propagator_trace(tb, t);
    cplx pred_p = predict_block_trace(n, t, crit, d, 1.0, +1);
    cplx pred_m = predict_block_trace(n, t, crit, d, 1.0, -1);
    double scale = std::pow(n, 0.5 * (d - 1));
    if (std::abs(pred_p) > 1e-3 * scale) {
      log_ratio_sum += std::log(std::abs(measured) / std::abs(pred_p));
      used += 1;
    }
    corr_p += measured * std::conj(pred_p);
    corr_m += measured * std::conj(pred_m);
    norm += std::abs(measured) * std::abs(pred_p);
  }
  if (used == 0) throw std::runtime_error("calibrate_against_tr: all levels near predictor nulls");
  cal.raw_ratio = std::exp(log_ratio_sum / used);
  cal.corr_plus = corr_p.real() / norm;
  cal.corr_minus = corr_m.real() / norm;
  cal.phase_flag = (cal.corr_plus >= cal.corr_minus) ? +1 : -1;
  cal.factor = cal.raw_ratio;
  cal.snapped = false;
  for (int j = -1; j <= 1; ++j) {
    double candidate = std::pow(2.0, j * (d - 1));
    if (std::abs(std::log(cal.raw_ratio / candidate)) < std::log(1.2)) {
      cal.factor = candidate;
      cal.snapped = true;
      break;
    }
  }
  return cal;
}

TrComparisonResult run_tr_comparison(const InvariantSymbol& h_order0,
                                     const std::vector<CriticalPointData>& crit, int d, double t,
                                     const std::vector<int>& levels,
                                     const TrCalibration& calibration) {
  TrComparisonResult res;
  res.levels = levels;
  res.calibration = calibration;
  for (int n : levels) {
    ToeplitzBlock tb = toeplitz(h_order0, n, InnerProduct::FubiniStudy);
    cplx measured = block_propagator_trace(tb, t);
    cplx predicted =
        predict_block_trace(n, t, crit, d, calibration.factor, calibration.phase_flag);
    res.measured.push_back(measured);
    res.predicted.push_back(predicted);
    res.rel_error.push_back(std::abs(measured - predicted) / std::abs(predicted));
  }
  std::vector<double> xs(levels.begin(), levels.end());
  res.fit = fit_rate(xs, res.rel_error);
  return res;
}

namespace {

// Gershgorin bound on max |nu_{N,j}| from the level-preserving data of q;
// used to skip blocks whose cluster cannot reach the grid.  Row sums:
// |diag| <= number_sum (N + 1/2) + |c0| and the hop entries obey
// sqrt(n_k (n_j + 1)) <= (N + 1)/2 by AM-GM.
struct ClusterRadiusModel {
  AveragedBlockData data;
  int d = 2;

  double operator()(int n) const {
    return (data.number_sum() * (n + 0.5) + data.hop_sum() * 0.5 * (n + 1.0) +
            std::abs(data.c0)) /
           std::sqrt(n + 0.5 * d);
  }
};

ClusterRadiusModel cluster_radius_model(const PhasePolynomial& q, int d) {
  return {averaged_block_data(q, d), d};
}

double beat_frequency_scan(const std::vector<double>& s_grid, const std::vector<double>& y,
                           double omega_center) {
  // direct DFT power scan around the target frequency
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= y.size();
  double best_omega = omega_center, best_power = -1.0;
  const int steps = 4000;
  for (int i = 0; i <= steps; ++i) {
    double omega = omega_center * (0.8 + 0.4 * i / steps);
    cplx acc(0.0, 0.0);
    for (std::size_t g = 0; g < s_grid.size(); ++g)
      acc += (y[g] - mean) * std::polar(1.0, -omega * s_grid[g]);
    double p = std::norm(acc);
    if (p > best_power) {
      best_power = p;
      best_omega = omega;
    }
  }
  return best_omega;
}

}  // namespace

SingularityComparisonResult run_singularity_comparison(const PerturbationPipeline& pipe, int d,
                                                       int k, int n_max,
                                                       const std::vector<double>& lambda_grid,
                                                       const GaussianWindow& window,
                                                       const TrCalibration& calibration) {
  if (k == 0) throw std::invalid_argument("run_singularity_comparison: k != 0 required");
  SingularityComparisonResult res;
  res.calibration = calibration;

  // predictor terms with the sqrt(N) -> sqrt(lambda) subprincipal conversion
  res.prediction.k = k;
  res.prediction.d = d;
  for (const auto& c : pipe.critical) {
    double p0 = -0.5 * c.value * c.value;
    res.p0_values.push_back(p0);
    SingularityTerm term;
    term.frequency = c.value;
    term.gamma = calibration.factor * predict_gamma0(k, c, p0, d, calibration.phase_flag);
    res.prediction.terms.push_back(term);
  }
  res.predicted = predict_singularity(lambda_grid, res.prediction);

  // measured transform: stream the averaged-block spectra
  GaussianWindow win = window;
  win.center_k = k;
  TransformAccumulator acc(win, lambda_grid);
  const double reach = win.reach(1e-16);
  const double grid_lo = lambda_grid.front() - reach;
  const double grid_hi = lambda_grid.back() + reach;
  ClusterRadiusModel radius = cluster_radius_model(pipe.q, d);
  for (int n = 0; n <= n_max; ++n) {
    double center = n + 0.5 * d;
    double r = radius(n);
    if (center + r < grid_lo || center - r > grid_hi) continue;
    std::vector<double> nu = perturbed_block_eigenvalues(pipe.q, d, n);
    for (double v : nu) {
      acc.add(center + v, 1.0);
      res.mass_count += 1;
    }
  }
  std::vector<double> tail = truncation_tail_bound(lambda_grid, win, d, n_max,
                                                   [&](int n) { return radius(n); });
  res.transform = acc.finalize(std::move(tail));
  for (double b : res.transform.tail_bound) res.max_tail_bound = std::max(res.max_tail_bound, b);

  // envelope comparison, normalized by the beat-envelope ceiling
  const double ceiling_coeff = res.prediction.amplitude_ceiling();
  double sum = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    double env = std::pow(lambda_grid[i], res.prediction.order_exponent()) * ceiling_coeff;
    double rel = std::abs(res.transform.values[i] - res.predicted[i]) / env;
    sum += rel;
    worst = std::max(worst, rel);
  }
  res.envelope_rel_error_mean = sum / lambda_grid.size();
  res.envelope_rel_error_max = worst;

  // beat frequency of the interference pattern, in s = sqrt(lambda)
  if (pipe.critical.size() >= 2) {
    double hmin = pipe.critical.front().value, hmax = pipe.critical.back().value;
    res.beat_frequency_target = kTwoPi * std::abs(k) * (hmax - hmin);
    std::vector<double> s(lambda_grid.size()), y(lambda_grid.size());
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
      s[i] = std::sqrt(lambda_grid[i]);
      y[i] = std::norm(res.transform.values[i]) / std::pow(lambda_grid[i], d - 1.0);
    }
    res.beat_frequency_measured = beat_frequency_scan(s, y, res.beat_frequency_target);
    res.beat_frequency_rel_error =
        std::abs(res.beat_frequency_measured - res.beat_frequency_target) /
        res.beat_frequency_target;
  }
  return res;
}

UnperturbedResult run_unperturbed_check(int d, double center_k, int n_max,
                                        const std::vector<double>& lambda_grid,
                                        const GaussianWindow& window) {
  UnperturbedResult res;
  GaussianWindow win = window;
  win.center_k = center_k;
  TransformAccumulator acc(win, lambda_grid);
  for (int n = 0; n <= n_max; ++n)
    acc.add(n + 0.5 * d, static_cast<double>(level_dimension(n, d)));
  std::vector<double> tail =
      truncation_tail_bound(lambda_grid, win, d, n_max, [](int) { return 0.0; });
  res.transform = acc.finalize(std::move(tail));

  std::vector<double> mods(lambda_grid.size());
  for (std::size_t i = 0; i < mods.size(); ++i) mods[i] = std::abs(res.transform.values[i]);
  res.envelope_slope = fit_rate(lambda_grid, mods).slope;

  auto flatness = [&](double expo, double& geo_mean) {
    double lg = 0.0;
    for (std::size_t i = 0; i < mods.size(); ++i)
      lg += std::log(mods[i] / std::pow(lambda_grid[i], expo));
    geo_mean = std::exp(lg / mods.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < mods.size(); ++i) {
      double dev = std::abs(mods[i] / (geo_mean * std::pow(lambda_grid[i], expo)) - 1.0);
      worst = std::max(worst, dev);
    }
    return worst;
  };
  double gm_half = 0.0;
  res.flatness_dminus1 = flatness(d - 1.0, res.mean_modulus_normalized);
  res.flatness_half = flatness(0.5 * (d - 1.0), gm_half);
  return res;
}

EquivResult run_equiv_check(double r, double a, int k0, int d, int n_max,
                            const std::vector<double>& lambda_grid,
                            const GaussianWindow& window) {
  EquivResult res;
  GaussianWindow win = window;
  win.center_k = k0;
  std::vector<SpectralMass> masses = e_series_masses(-r, a, d, n_max);
  res.transform = windowed_transform(masses, win, lambda_grid);

  // truncation bound for the single-mass-per-level series
  const double reach_floor = 0.0;
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    double bound = 0.0;
    for (int n = n_max + 1;; ++n) {
      double mu = n + a * std::sqrt(static_cast<double>(n)) + 0.5 * d;
      double dist = std::max(reach_floor, mu - lambda_grid[i]);
      double term = std::pow(static_cast<double>(n), -r) * win.transform(dist);
      bound += term;
      if (dist > 0.0 && term < 1e-300) break;
    }
    res.transform.tail_bound[i] = bound;
    res.max_tail_bound = std::max(res.max_tail_bound, bound);
  }

  res.modulus_error.resize(lambda_grid.size());
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    res.modulus_error[i] =
        std::abs(std::abs(res.transform.values[i]) * std::pow(lambda_grid[i], r) - 1.0);
  }
  res.error_fit = fit_rate(lambda_grid, res.modulus_error);
  res.modulus_error_at_max = res.modulus_error.back();

  // phase match against both sign candidates, carrier stripped
  auto drift_of = [&](int s, double& offset) {
    cplx mean(0.0, 0.0);
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
      cplx carrier = std::polar(1.0, -win.tau0() * lambda_grid[i]);
      cplx pred = predict_equiv(lambda_grid[i], r, a, k0, d, s);
      cplx ratio = res.transform.values[i] * carrier * std::conj(pred);
      if (std::abs(ratio) > 0.0) mean += ratio / std::abs(ratio);
    }
    mean /= static_cast<double>(lambda_grid.size());
    offset = std::arg(mean);
    return 1.0 - std::abs(mean);  // circular spread; 0 = perfectly constant phase
  };
  double off_p = 0.0, off_m = 0.0;
  res.drift_plus = drift_of(+1, off_p);
  res.drift_minus = drift_of(-1, off_m);
  if (a == 0.0) {
    res.sign_flag = 0;
    res.phase_offset = off_p;
  } else if (res.drift_plus < res.drift_minus) {
    res.sign_flag = +1;
    res.phase_offset = off_p;
  } else {
    res.sign_flag = -1;
    res.phase_offset = off_m;
  }
  return res;
}

CrossModelResult run_cross_model(const PerturbationPipeline& pipe, int d,
                                 const std::vector<int>& levels) {
  CrossModelResult res;
  res.levels = levels;
  for (int n : levels) {
    Eigen::MatrixXcd b = averaged_perturbation_block(pipe.q, d, n);
    res.deviation.push_back(cross_model_compare(b, pipe.h1, n, d));
  }
  std::vector<double> xs(levels.begin(), levels.end());
  res.fit = fit_rate(xs, res.deviation);

  // order-N^0 residual of the top cluster edge: nu_max - sqrt(N + d/2) H_max
  double hmax = pipe.critical.back().value;
  int n = levels.back();
  std::vector<double> nu = perturbed_block_eigenvalues(pipe.q, d, n);
  res.subprincipal_estimate = nu.back() - std::sqrt(n + 0.5 * d) * hmax;
  return res;
}

std::vector<std::vector<cplx>> seeded_unitary(int d, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<cplx>> u(d, std::vector<cplx>(d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) u[i][j] = cplx(gauss(rng), gauss(rng));
    for (int p = 0; p < i; ++p) {
      cplx dot(0.0, 0.0);
      for (int j = 0; j < d; ++j) dot += std::conj(u[p][j]) * u[i][j];
      for (int j = 0; j < d; ++j) u[i][j] -= dot * u[p][j];
    }
    double nrm = 0.0;
    for (int j = 0; j < d; ++j) nrm += std::norm(u[i][j]);
    nrm = std::sqrt(nrm);
    for (int j = 0; j < d; ++j) u[i][j] /= nrm;
  }
  return u;
}

}  // namespace osctrace
