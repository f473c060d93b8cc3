#include "osctrace/trace_transform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace osctrace {

using cplx = std::complex<double>;

static const double kPi = 3.14159265358979323846;
static const double kTwoPi = 2.0 * kPi;

double GaussianWindow::tau0() const { return kTwoPi * center_k; }

double GaussianWindow::transform(double u) const {
  return width / std::sqrt(kTwoPi) * std::exp(-0.5 * width * width * u * u);
}

double GaussianWindow::reach(double rel_tol) const {
  return std::sqrt(-2.0 * std::log(rel_tol)) / width;
}

double GaussianWindow::leakage() const {
  return std::exp(-0.5 * kTwoPi * kTwoPi / (width * width));
}

double GaussianWindow::halfway_mass() const {
  return std::exp(-0.5 * kPi * kPi / (width * width));
}

void GaussianWindow::validate() const {
  if (!(width > 0.0)) throw std::invalid_argument("GaussianWindow: width must be positive");
  if (width > 0.5)
    throw std::invalid_argument(
        "GaussianWindow: width above the 0.5 ceiling (neighboring-singularity leakage " +
        std::to_string(std::exp(-0.5 * kTwoPi * kTwoPi / (width * width))) + ")");
}

std::vector<EigenvalueEntry> assemble_spectrum(const std::vector<SpectrumBlock>& blocks, int d) {
  for (std::size_t n = 0; n < blocks.size(); ++n) {
    if (blocks[n].level != static_cast<int>(n))
      throw std::invalid_argument("assemble_spectrum: gap in level coverage");
    if (static_cast<std::int64_t>(blocks[n].eigenvalues.size()) !=
        level_dimension(static_cast<int>(n), d))
      throw std::invalid_argument("assemble_spectrum: block size does not match dim(N,d)");
  }
  std::vector<EigenvalueEntry> out;
  for (const auto& b : blocks) {
    for (std::size_t j = 0; j < b.eigenvalues.size(); ++j)
      out.push_back({b.level + 0.5 * d + b.eigenvalues[j], b.level, static_cast<int>(j)});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const EigenvalueEntry& a, const EigenvalueEntry& b) {
                     return a.lambda < b.lambda;
                   });
  return out;
}

TransformAccumulator::TransformAccumulator(const GaussianWindow& window,
                                           std::vector<double> lambda_grid)
    : window_(window), grid_(std::move(lambda_grid)) {
  window_.validate();
  for (std::size_t i = 1; i < grid_.size(); ++i)
    if (grid_[i] <= grid_[i - 1])
      throw std::invalid_argument("TransformAccumulator: grid must be strictly ascending");
  sums_.assign(grid_.size(), cplx(0.0, 0.0));
  reach_ = window_.reach(1e-16);
}

void TransformAccumulator::add(double lambda, double weight) {
  auto lo = std::lower_bound(grid_.begin(), grid_.end(), lambda - reach_);
  auto hi = std::upper_bound(grid_.begin(), grid_.end(), lambda + reach_);
  if (lo == hi) return;
  const cplx phase = weight * std::polar(1.0, -window_.tau0() * lambda);
  for (auto it = lo; it != hi; ++it) {
    sums_[static_cast<std::size_t>(it - grid_.begin())] +=
        phase * window_.transform(*it - lambda);
  }
}

TraceTransform TransformAccumulator::finalize(std::vector<double> tail_bound) const {
  TraceTransform t;
  t.center_k = window_.center_k;
  t.window = window_;
  t.lambda_grid = grid_;
  t.values.resize(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i)
    t.values[i] = std::polar(1.0, window_.tau0() * grid_[i]) * sums_[i];
  if (tail_bound.empty()) tail_bound.assign(grid_.size(), 0.0);
  if (tail_bound.size() != grid_.size())
    throw std::invalid_argument("finalize: tail bound size mismatch");
  t.tail_bound = std::move(tail_bound);
  return t;
}

TraceTransform windowed_transform(const std::vector<SpectralMass>& masses,
                                  const GaussianWindow& window,
                                  const std::vector<double>& lambda_grid) {
  TransformAccumulator acc(window, lambda_grid);
  for (const auto& m : masses) acc.add(m.lambda, m.weight);
  return acc.finalize();
}

std::vector<double> truncation_tail_bound(const std::vector<double>& lambda_grid,
                                          const GaussianWindow& window, int d, int n_included,
                                          const std::function<double(int)>& cluster_radius) {
  std::vector<double> bound(lambda_grid.size(), 0.0);
  if (lambda_grid.empty()) return bound;
  const double lam_max = lambda_grid.back();
  for (int n = n_included + 1;; ++n) {
    double lo = n + 0.5 * d - cluster_radius(n);
    double contrib_at_max =
        static_cast<double>(level_dimension(n, d)) *
        window.transform(std::max(0.0, lo - lam_max));
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
      double dist = std::max(0.0, lo - lambda_grid[i]);
      bound[i] += static_cast<double>(level_dimension(n, d)) * window.transform(dist);
    }
    // clusters move one unit right per level while the radius grows like
    // sqrt(n); once the nearest-edge term is negligible the sum has converged
    if (lo > lam_max && contrib_at_max < 1e-300) break;
    if (n > n_included + 10000000)
      throw std::runtime_error("truncation_tail_bound: cluster radius does not separate from the grid");
  }
  return bound;
}

std::vector<SpectralMass> e_series_masses(double r, double a, int d, int n_max) {
  std::vector<SpectralMass> masses;
  masses.reserve(n_max + 1);
  for (int n = (r == 0.0 ? 0 : 1); n <= n_max; ++n) {
    double w = (n == 0) ? 1.0 : std::pow(static_cast<double>(n), r);
    masses.push_back({n + a * std::sqrt(static_cast<double>(n)) + 0.5 * d, w});
  }
  return masses;
}

std::vector<cplx> eval_e_series(double r, double a, int d, int n_max,
                                const std::vector<double>& t_grid) {
  std::vector<SpectralMass> masses = e_series_masses(r, a, d, n_max);
  std::vector<cplx> out(t_grid.size(), cplx(0.0, 0.0));
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    cplx sum(0.0, 0.0);
    for (const auto& m : masses) sum += m.weight * std::polar(1.0, t_grid[i] * m.lambda);
    out[i] = sum;
  }
  return out;
}

RateFit fit_rate(const std::vector<double>& xs, const std::vector<double>& errs) {
  if (xs.size() != errs.size()) throw std::invalid_argument("fit_rate: size mismatch");
  if (xs.size() < 4) throw std::invalid_argument("fit_rate: at least 4 points required");
  std::vector<double> lx(xs.size()), ly(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(errs[i] > 0.0))
      throw std::invalid_argument("fit_rate: inputs must be positive");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(errs[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= lx.size();
  my /= ly.size();
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    double res = ly[i] - fit.slope * lx[i] - fit.intercept;
    ss += res * res;
  }
  fit.residual = std::sqrt(ss / lx.size());
  return fit;
}

}  // namespace osctrace
