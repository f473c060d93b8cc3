#include "osctrace/critical_points.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace osctrace {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

namespace {

double norm_of(const CVec& z) {
  double s = 0.0;
  for (const auto& v : z) s += std::norm(v);
  return std::sqrt(s);
}

void normalize(CVec& z) {
  double n = norm_of(z);
  for (auto& v : z) v /= n;
}

cplx inner(const CVec& a, const CVec& b) {  // <a,b> = sum conj(a_j) b_j
  cplx s(0.0, 0.0);
  for (std::size_t j = 0; j < a.size(); ++j) s += std::conj(a[j]) * b[j];
  return s;
}

cplx monomial_value(const CVec& z, const MultiIndex& a, const MultiIndex& b) {
  cplx t(1.0, 0.0);
  for (std::size_t j = 0; j < z.size(); ++j) {
    for (int r = 0; r < a[j]; ++r) t *= z[j];
    for (int r = 0; r < b[j]; ++r) t *= std::conj(z[j]);
  }
  return t;
}

// F, dF/dz_j, and the Wirtinger second derivatives of the numerator at z.
struct NumeratorJet {
  cplx value;
  Eigen::VectorXcd wz;   // dF/dz_j
  Eigen::MatrixXcd pzz;  // d2F/dz_j dz_l (symmetric)
  Eigen::MatrixXcd qzzb; // d2F/dz_j dzbar_l (Hermitian for real F)
};

NumeratorJet numerator_jet(const InvariantSymbol& h, const CVec& z) {
  const int d = h.dim();
  NumeratorJet jet;
  jet.value = cplx(0.0, 0.0);
  jet.wz = Eigen::VectorXcd::Zero(d);
  jet.pzz = Eigen::MatrixXcd::Zero(d, d);
  jet.qzzb = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& [key, c] : h.terms()) {
    const MultiIndex& a = key.first;
    const MultiIndex& b = key.second;
    jet.value += c * monomial_value(z, a, b);
    for (int j = 0; j < d; ++j) {
      if (a[j] > 0) {
        MultiIndex aj = a;
        aj[j] -= 1;
        jet.wz(j) += c * static_cast<double>(a[j]) * monomial_value(z, aj, b);
        for (int l = 0; l < d; ++l) {
          if (aj[l] > 0) {
            MultiIndex ajl = aj;
            ajl[l] -= 1;
            jet.pzz(j, l) += c * static_cast<double>(a[j] * aj[l]) * monomial_value(z, ajl, b);
          }
          if (b[l] > 0) {
            MultiIndex bl = b;
            bl[l] -= 1;
            jet.qzzb(j, l) += c * static_cast<double>(a[j] * b[l]) * monomial_value(z, aj, bl);
          }
        }
      }
    }
  }
  return jet;
}

// Complex orthonormal frame of the orthogonal complement of z.
std::vector<CVec> horizontal_frame(const CVec& z) {
  const int d = static_cast<int>(z.size());
  std::vector<CVec> frame;
  frame.reserve(d - 1);
  for (int e = 0; e < d && static_cast<int>(frame.size()) < d - 1; ++e) {
    CVec v(d, cplx(0.0, 0.0));
    v[e] = 1.0;
    cplx pz = inner(z, v);
    for (int j = 0; j < d; ++j) v[j] -= pz * z[j];
    for (const auto& w : frame) {
      cplx pw = inner(w, v);
      for (int j = 0; j < d; ++j) v[j] -= pw * w[j];
    }
    double n = norm_of(v);
    if (n < 1e-8) continue;  // e-th basis vector nearly parallel to span
    for (auto& x : v) x /= n;
    frame.push_back(v);
  }
  return frame;
}

CVec phase_gauge(CVec z) {
  int jmax = 0;
  double best = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (std::abs(z[j]) > best) {
      best = std::abs(z[j]);
      jmax = static_cast<int>(j);
    }
  }
  cplx ph = z[jmax] / std::abs(z[jmax]);
  for (auto& v : z) v /= ph;
  return z;
}

}  // namespace

double fubini_study_distance(const CVec& a, const CVec& b) {
  double c = std::min(1.0, std::abs(inner(a, b)));
  return std::acos(c);
}

LocalDerivatives local_derivatives(const InvariantSymbol& h, const CVec& z) {
  const int d = h.dim();
  const int k = h.bidegree();
  NumeratorJet jet = numerator_jet(h, z);
  const double f = jet.value.real();

  std::vector<CVec> cframe = horizontal_frame(z);
  const int m = static_cast<int>(cframe.size());  // d-1
  // Real directions: w_a, i*w_a interleaved.
  std::vector<CVec> dirs;
  dirs.reserve(2 * m);
  for (const auto& w : cframe) {
    dirs.push_back(w);
    CVec iw(d);
    for (int j = 0; j < d; ++j) iw[j] = cplx(0.0, 1.0) * w[j];
    dirs.push_back(iw);
  }

  LocalDerivatives out;
  out.gradient = Eigen::VectorXd::Zero(2 * m);
  out.hessian = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  out.frame.assign(d * m, cplx(0.0, 0.0));
  for (int a = 0; a < m; ++a)
    for (int j = 0; j < d; ++j) out.frame[a * d + j] = cframe[a][j];

  // dG[v] = 2 Re sum_j W_j v_j on horizontal directions (the radial part
  // drops because <z, v> = 0).
  for (int a = 0; a < 2 * m; ++a) {
    cplx s(0.0, 0.0);
    for (int j = 0; j < d; ++j) s += jet.wz(j) * dirs[a][j];
    out.gradient(a) = 2.0 * s.real();
  }
  // d2G[v,w] = 2 Re (v^T P w + v^T Q conj(w)) - 2k F delta_{vw}.
  for (int a = 0; a < 2 * m; ++a) {
    for (int b = a; b < 2 * m; ++b) {
      cplx s(0.0, 0.0);
      for (int j = 0; j < d; ++j) {
        cplx pj(0.0, 0.0), qj(0.0, 0.0);
        for (int l = 0; l < d; ++l) {
          pj += jet.pzz(j, l) * dirs[b][l];
          qj += jet.qzzb(j, l) * std::conj(dirs[b][l]);
        }
        s += dirs[a][j] * (pj + qj);
      }
      double v = 2.0 * s.real() - (a == b ? 2.0 * k * f : 0.0);
      out.hessian(a, b) = v;
      out.hessian(b, a) = v;
    }
  }
  return out;
}

std::pair<double, int> hessian_data(const InvariantSymbol& h, const CVec& z) {
  const int d = h.dim();
  if (d == 1) return {1.0, 0};  // CP^0: empty Hessian
  LocalDerivatives loc = local_derivatives(h, z);
  double scale = std::max(1.0, h.coefficient_scale());
  if (loc.gradient.norm() > 1e-10 * scale)
    throw std::invalid_argument("hessian_data: point is not critical (gradient above 1e-10)");
  // Normalized FS frame vectors are 1/sqrt(2) of the quotient-metric ones.
  Eigen::MatrixXd a = 0.5 * loc.hessian;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  double det = 1.0;
  int sig = 0;
  for (int i = 0; i < a.rows(); ++i) {
    det *= es.eigenvalues()(i);
    sig += es.eigenvalues()(i) > 0 ? 1 : -1;
  }
  double rel = std::abs(det) / std::pow(scale, 2 * d - 2);
  if (rel < 1e-8)
    throw NotMorseError("hessian_data: degenerate Hessian (relative determinant below 1e-8)");
  return {std::abs(det), sig};
}

namespace {

struct SolveResult {
  CVec z;
  double grad_norm = 1e300;
  bool converged = false;
};

CVec step_from(const CVec& z, const LocalDerivatives& loc, const Eigen::VectorXd& u) {
  const int d = static_cast<int>(z.size());
  const int m = static_cast<int>(u.size()) / 2;
  CVec out = z;
  for (int a = 0; a < m; ++a) {
    for (int j = 0; j < d; ++j) {
      cplx w = loc.frame[a * d + j];
      out[j] += u(2 * a) * w + u(2 * a + 1) * cplx(0.0, 1.0) * w;
    }
  }
  normalize(out);
  return out;
}

// Damped Newton on the horizontal gradient system: step -(A + mu I)^{-1} g,
// accepted when |g| decreases, with the damping mu adapted multiplicatively.
// Finds critical points of any Morse index; quadratic convergence near roots.
SolveResult solve_from(const InvariantSymbol& h, CVec z, double grad_tol) {
  SolveResult res;
  const int m2 = 2 * (static_cast<int>(z.size()) - 1);
  LocalDerivatives loc = local_derivatives(h, z);
  double mu = 0.0;
  for (int iter = 0; iter < 120; ++iter) {
    double gn = loc.gradient.norm();
    if (gn <= grad_tol) {
      res.z = z;
      res.grad_norm = gn;
      res.converged = true;
      return res;
    }
    bool moved = false;
    for (int attempt = 0; attempt < 12; ++attempt) {
      Eigen::MatrixXd a = loc.hessian;
      if (mu > 0.0) {
        for (int i = 0; i < m2; ++i) a(i, i) += (a(i, i) >= 0 ? mu : -mu);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      Eigen::VectorXd u =
          lu.isInvertible() ? lu.solve(-loc.gradient).eval() : Eigen::VectorXd();
      if (u.size() == m2 && u.allFinite()) {
        if (u.norm() > 1.0) u *= 1.0 / u.norm();
        CVec cand = step_from(z, loc, u);
        LocalDerivatives lc = local_derivatives(h, cand);
        if (lc.gradient.norm() < gn) {
          z = std::move(cand);
          loc = std::move(lc);
          mu *= 0.25;
          moved = true;
          break;
        }
      }
      mu = (mu == 0.0) ? 1e-4 * std::max(1.0, h.coefficient_scale()) : mu * 10.0;
    }
    if (!moved) break;
  }
  res.z = z;
  res.grad_norm = loc.gradient.norm();
  res.converged = res.grad_norm <= grad_tol;
  return res;
}

CVec random_unit(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVec z(d);
  for (int j = 0; j < d; ++j) z[j] = cplx(gauss(rng), gauss(rng));
  normalize(z);
  return z;
}

}  // namespace

std::vector<CriticalPointData> find_critical_points(const InvariantSymbol& h,
                                                    const CriticalSearchOptions& opt) {
  const int d = h.dim();
  if (!h.is_hermitian(1e-12))
    throw std::invalid_argument("find_critical_points: non-Hermitian coefficient table");
  double scale = h.coefficient_scale();
  if (scale == 0.0) throw NotMorseError("find_critical_points: zero symbol is constant");

  if (d == 1) {
    CriticalPointData p;
    p.point = {cplx(1.0, 0.0)};
    p.value = evaluate(h, p.point);
    p.hess_det = 1.0;
    p.signature = 0;
    p.morse_index = 0;
    return {p};
  }

  const double gtol = opt.grad_tol * std::max(1.0, scale);
  std::mt19937_64 rng(opt.seed);
  std::vector<CVec> found;
  for (int r = 0; r < opt.restarts_per_dim * d; ++r) {
    SolveResult res = solve_from(h, random_unit(rng, d), gtol);
    if (!res.converged) continue;
    bool dup = false;
    for (const auto& q : found) {
      if (fubini_study_distance(res.z, q) < opt.dedup_fs_distance) {
        dup = true;
        break;
      }
    }
    if (!dup) found.push_back(res.z);
  }
  if (found.empty())
    throw IncompleteSearchError("find_critical_points: no converged starts");

  // Classify before verifying: a degenerate Hessian anywhere (e.g. a constant
  // symbol, where every start converges in place) is a not-Morse diagnostic,
  // not an incomplete search.
  std::vector<CriticalPointData> out;
  for (const auto& z : found) {
    CriticalPointData p;
    p.point = phase_gauge(z);
    p.value = evaluate(h, p.point);
    LocalDerivatives loc = local_derivatives(h, p.point);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * loc.hessian);
    double det = 1.0;
    int sig = 0, neg = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      det *= es.eigenvalues()(i);
      sig += es.eigenvalues()(i) > 0 ? 1 : -1;
      neg += es.eigenvalues()(i) < 0 ? 1 : 0;
    }
    double rel = std::abs(det) / std::pow(std::max(1.0, scale), 2 * d - 2);
    if (rel < opt.degenerate_rel_det)
      throw NotMorseError("find_critical_points: degenerate critical point (not Morse)");
    p.hess_det = std::abs(det);
    p.signature = sig;
    p.morse_index = neg;
    out.push_back(p);
  }

  // Verification pass: fresh deterministic starts must all converge onto the
  // found set.
  const double vtol = opt.verify_grad_tol * std::max(1.0, scale);
  std::mt19937_64 vrng(opt.seed ^ 0x9e3779b97f4a7c15ull);
  for (int r = 0; r < opt.verify_per_dim * d; ++r) {
    SolveResult res = solve_from(h, random_unit(vrng, d), gtol);
    if (res.grad_norm > vtol)
      throw IncompleteSearchError("find_critical_points: verification start did not converge");
    bool matched = false;
    for (const auto& q : found) {
      if (fubini_study_distance(res.z, q) < opt.dedup_fs_distance) {
        matched = true;
        break;
      }
    }
    if (!matched)
      throw IncompleteSearchError("find_critical_points: verification found an unlisted critical point");
  }

  std::sort(out.begin(), out.end(),
            [](const CriticalPointData& a, const CriticalPointData& b) { return a.value < b.value; });

  // Poincare-Hopf: sum (-1)^{index} = chi(CP^{d-1}) = d.
  int chi = 0;
  for (const auto& p : out) chi += (p.morse_index % 2 == 0) ? 1 : -1;
  if (chi != d)
    throw IncompleteSearchError("find_critical_points: Poincare-Hopf sum mismatch (missed points)");
  return out;
}

}  // namespace osctrace
