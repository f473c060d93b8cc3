#include "osctrace/hermite.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "osctrace/linalg.hpp"

namespace osctrace {

using cplx = std::complex<double>;

namespace {

struct Ladder {
  int j;
  bool create;
};
struct LadderTerm {
  cplx coeff;
  std::vector<Ladder> ops;  // applied in order, ops[0] first
};

double real_coeff(const cplx& c, double scale) {
  if (std::abs(c.imag()) > 1e-12 * std::max(1.0, scale))
    throw std::invalid_argument("quantize_weyl_quadratic: real polynomial required");
  return c.real();
}

// Weyl quantization table for one monomial x^a xi^b, |a| + |b| <= 2.
void expand_monomial(const MultiIndex& a, const MultiIndex& b, double c,
                     std::vector<LadderTerm>& out) {
  const int deg = degree_of(a) + degree_of(b);
  const int d = static_cast<int>(a.size());
  auto A = [](int j) { return Ladder{j, false}; };
  auto Ad = [](int j) { return Ladder{j, true}; };

  if (deg == 0) {
    out.push_back({cplx(c, 0.0), {}});
    return;
  }
  if (deg == 1) {
    for (int j = 0; j < d; ++j) {
      if (a[j] == 1) {  // x_j = (A + A*)/sqrt(2)
        out.push_back({cplx(c / std::sqrt(2.0), 0.0), {A(j)}});
        out.push_back({cplx(c / std::sqrt(2.0), 0.0), {Ad(j)}});
        return;
      }
      if (b[j] == 1) {  // xi_j = -i (A - A*)/sqrt(2)
        out.push_back({cplx(0.0, -c / std::sqrt(2.0)), {A(j)}});
        out.push_back({cplx(0.0, c / std::sqrt(2.0)), {Ad(j)}});
        return;
      }
    }
  }

  // quadratic cases
  int xj = -1, xk = -1, pj = -1, pk = -1;
  for (int j = 0; j < d; ++j) {
    if (a[j] == 2) xj = xk = j;
    if (b[j] == 2) pj = pk = j;
  }
  for (int j = 0; j < d; ++j) {
    if (a[j] == 1) (xj < 0 ? xj : xk) = j;
    if (b[j] == 1) (pj < 0 ? pj : pk) = j;
  }

  if (xj >= 0 && xk >= 0 && pj < 0) {
    // x_j x_k (possibly j = k): (1/2)(A_j + A*_j)(A_k + A*_k)
    for (bool cj : {false, true})
      for (bool ck : {false, true})
        out.push_back({cplx(c / 2.0, 0.0), {{xk, ck}, {xj, cj}}});
    return;
  }
  if (pj >= 0 && pk >= 0 && xj < 0) {
    // xi_j xi_k: -(1/2)(A_j - A*_j)(A_k - A*_k)
    for (bool cj : {false, true})
      for (bool ck : {false, true}) {
        double sign = ((cj ? -1 : 1) * (ck ? -1 : 1));
        out.push_back({cplx(-c * sign / 2.0, 0.0), {{pk, ck}, {pj, cj}}});
      }
    return;
  }
  if (xj >= 0 && pj >= 0) {
    if (xj == pj) {
      // Weyl(x_j xi_j) = (x xi + xi x)/2 = (-i/2)(A^2 - A*^2)
      out.push_back({cplx(0.0, -c / 2.0), {{xj, false}, {xj, false}}});
      out.push_back({cplx(0.0, c / 2.0), {{xj, true}, {xj, true}}});
      return;
    }
    // x_j xi_k, j != k: (-i/2)(A_j + A*_j)(A_k - A*_k)
    for (bool cj : {false, true})
      for (bool ck : {false, true}) {
        double sign = ck ? -1.0 : 1.0;
        out.push_back({cplx(0.0, -c * sign / 2.0), {{pj, ck}, {xj, cj}}});
      }
    return;
  }
  throw std::logic_error("expand_monomial: unhandled quadratic monomial");
}

std::vector<LadderTerm> ladder_expansion(const PhasePolynomial& q) {
  if (q.kind() != VariableKind::RealPhase)
    throw std::invalid_argument("quantize_weyl_quadratic: RealPhase polynomial required");
  double scale = 0.0;
  for (const auto& [key, c] : q.terms()) scale = std::max(scale, std::abs(c));
  std::vector<LadderTerm> terms;
  for (const auto& [key, c] : q.terms()) {
    if (degree_of(key.first) + degree_of(key.second) > 2)
      throw std::invalid_argument("quantize_weyl_quadratic: total degree must be <= 2");
    expand_monomial(key.first, key.second, real_coeff(c, scale), terms);
  }
  return terms;
}

}  // namespace

double AveragedBlockData::number_sum() const {
  double s = 0.0;
  for (double v : number_coeff) s += std::abs(v);
  return s;
}

double AveragedBlockData::hop_sum() const {
  double s = 0.0;
  for (const auto& row : hop)
    for (const auto& v : row) s += std::abs(v);
  return s;
}

// Block-diagonal (level-preserving) data of Op^w(q):
//   diag:  sum_j (c[x_j^2] + c[xi_j^2]) (n_j + 1/2) + c[1]
//   A*_j A_k (j != k):  t_{jk} = (c[x_j x_k] + c[xi_j xi_k]) / 2
//                              - (i/2) c[x_j xi_k] + (i/2) c[x_k xi_j]
AveragedBlockData averaged_block_data(const PhasePolynomial& q, int d) {
  if (q.kind() != VariableKind::RealPhase)
    throw std::invalid_argument("averaged_perturbation_block: RealPhase polynomial required");
  if (q.dim() != d) throw std::invalid_argument("averaged_perturbation_block: dimension mismatch");
  double scale = 0.0;
  for (const auto& [key, c] : q.terms()) scale = std::max(scale, std::abs(c));
  AveragedBlockData out;
  out.number_coeff.assign(d, 0.0);
  out.hop.assign(d, std::vector<cplx>(d, cplx(0.0, 0.0)));
  for (const auto& [key, cc] : q.terms()) {
    const MultiIndex& a = key.first;
    const MultiIndex& b = key.second;
    double c = real_coeff(cc, scale);
    int deg = degree_of(a) + degree_of(b);
    if (deg > 2) throw std::invalid_argument("averaged_perturbation_block: degree must be <= 2");
    if (deg == 0) {
      out.c0 += c;
      continue;
    }
    if (deg == 1) continue;  // no level-preserving part
    int x1 = -1, x2 = -1, p1 = -1, p2 = -1;
    for (int j = 0; j < d; ++j) {
      if (a[j] == 2) x1 = x2 = j;
      if (b[j] == 2) p1 = p2 = j;
    }
    for (int j = 0; j < d; ++j) {
      if (a[j] == 1) (x1 < 0 ? x1 : x2) = j;
      if (b[j] == 1) (p1 < 0 ? p1 : p2) = j;
    }
    if (x1 >= 0 && x2 >= 0 && p1 < 0) {
      if (x1 == x2) {
        out.number_coeff[x1] += c;
      } else {
        out.hop[x1][x2] += c / 2.0;
        out.hop[x2][x1] += c / 2.0;
      }
    } else if (p1 >= 0 && p2 >= 0 && x1 < 0) {
      if (p1 == p2) {
        out.number_coeff[p1] += c;
      } else {
        out.hop[p1][p2] += c / 2.0;
        out.hop[p2][p1] += c / 2.0;
      }
    } else if (x1 >= 0 && p1 >= 0) {
      if (x1 != p1) {
        out.hop[x1][p1] += cplx(0.0, -c / 2.0);
        out.hop[p1][x1] += cplx(0.0, c / 2.0);
      }
      // x_j xi_j has no level-preserving part
    }
  }
  return out;
}

BlockOperator build_h0(int d, int n_max) {
  if (d < 1 || n_max < 0) throw std::invalid_argument("build_h0: d >= 1 and n_max >= 0 required");
  BlockOperator h0;
  h0.d = d;
  h0.n_max = n_max;
  h0.blocks.reserve(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    auto dim = level_dimension(n, d);
    h0.blocks.push_back(Eigen::MatrixXcd::Identity(dim, dim) * (n + 0.5 * d));
  }
  return h0;
}

CoupledOperator quantize_weyl_quadratic(const PhasePolynomial& q, int d, int n_max) {
  if (q.dim() != d) throw std::invalid_argument("quantize_weyl_quadratic: dimension mismatch");
  if (n_max < 0) throw std::invalid_argument("quantize_weyl_quadratic: n_max >= 0 required");
  std::vector<LadderTerm> terms = ladder_expansion(q);

  CoupledOperator op;
  op.d = d;
  op.n_max = n_max;
  op.level_offset.assign(n_max + 2, 0);
  std::vector<LevelIndexer> levels;
  levels.reserve(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    levels.emplace_back(n, d);
    op.level_offset[n + 1] = op.level_offset[n] + levels[n].size();
  }
  const int dim = op.total_dim();
  op.mat = Eigen::MatrixXcd::Zero(dim, dim);

  for (int n = 0; n <= n_max; ++n) {
    const auto& basis = levels[n].basis();
    for (int col = 0; col < static_cast<int>(basis.size()); ++col) {
      const int gcol = op.level_offset[n] + col;
      for (const auto& term : terms) {
        MultiIndex state = basis[col];
        double mag = 1.0;
        bool dead = false;
        for (const auto& l : term.ops) {
          if (l.create) {
            mag *= std::sqrt(static_cast<double>(state[l.j] + 1));
            state[l.j] += 1;
          } else {
            if (state[l.j] == 0) {
              dead = true;
              break;
            }
            mag *= std::sqrt(static_cast<double>(state[l.j]));
            state[l.j] -= 1;
          }
        }
        if (dead) continue;
        int lev = degree_of(state);
        if (lev > n_max) continue;  // coupling out of the stored range
        int row = levels[lev].position(state);
        op.mat(op.level_offset[lev] + row, gcol) += term.coeff * mag;
      }
    }
  }
  return op;
}

CoupledOperator make_order1_perturbation(const PhasePolynomial& q, int d, int n_max) {
  CoupledOperator m = quantize_weyl_quadratic(q, d, n_max);
  Eigen::VectorXd dinv(m.total_dim());
  for (int n = 0; n <= n_max; ++n) {
    double v = 1.0 / std::sqrt(n + 0.5 * d);
    for (int i = m.level_offset[n]; i < m.level_offset[n + 1]; ++i) dinv(i) = v;
  }
  Eigen::MatrixXcd sym =
      0.5 * (dinv.asDiagonal() * m.mat + m.mat * dinv.asDiagonal());
  m.mat = std::move(sym);
  return m;
}

BlockOperator average_operator(const CoupledOperator& p) {
  BlockOperator b;
  b.d = p.d;
  b.n_max = p.n_max;
  b.blocks.reserve(p.n_max + 1);
  for (int n = 0; n <= p.n_max; ++n) {
    int off = p.level_offset[n];
    int sz = p.level_offset[n + 1] - off;
    b.blocks.push_back(p.mat.block(off, off, sz, sz));
  }
  return b;
}

Eigen::MatrixXcd averaged_perturbation_block(const PhasePolynomial& q, int d, int level) {
  AveragedBlockData data = averaged_block_data(q, d);
  LevelIndexer idx(level, d);
  const int dim = idx.size();
  Eigen::MatrixXcd blk = Eigen::MatrixXcd::Zero(dim, dim);
  const double h0inv = 1.0 / std::sqrt(level + 0.5 * d);
  for (int col = 0; col < dim; ++col) {
    const MultiIndex& n = idx.basis()[col];
    double diag = data.c0;
    for (int j = 0; j < d; ++j) diag += data.number_coeff[j] * (n[j] + 0.5);
    blk(col, col) = diag * h0inv;
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        if (j == k || data.hop[j][k] == cplx(0.0, 0.0) || n[k] == 0) continue;
        MultiIndex m = n;
        m[k] -= 1;
        m[j] += 1;
        int row = idx.position(m);
        blk(row, col) += data.hop[j][k] * std::sqrt(double(n[k]) * double(n[j] + 1)) * h0inv;
      }
    }
  }
  return blk;
}

std::vector<double> averaged_block_eigenvalues_d2(const PhasePolynomial& q, int level) {
  AveragedBlockData data = averaged_block_data(q, 2);
  const int dim = level + 1;
  const double h0inv = 1.0 / std::sqrt(level + 1.0);
  // basis order (a, level - a), a ascending; A*_1 A_2 couples a -> a+1
  std::vector<double> diag(dim), off(std::max(0, dim - 1));
  for (int a = 0; a < dim; ++a) {
    diag[a] = (data.c0 + data.number_coeff[0] * (a + 0.5) +
               data.number_coeff[1] * (level - a + 0.5)) *
              h0inv;
  }
  double hop = std::abs(data.hop[0][1]);
  if (hop == 0.0) {
    std::sort(diag.begin(), diag.end());
    return diag;
  }
  for (int a = 0; a + 1 < dim; ++a)
    off[a] = hop * std::sqrt(double(level - a) * double(a + 1)) * h0inv;
  return tridiagonal_eigenvalues(std::move(diag), std::move(off));
}

SpectrumBlock block_spectrum(const BlockOperator& b, int level) {
  if (level < 0 || level > b.n_max) throw std::invalid_argument("block_spectrum: level out of range");
  SpectrumBlock s;
  s.level = level;
  s.eigenvalues = hermitian_eigenvalues(b.blocks[level]);
  return s;
}

std::vector<SpectrumBlock> all_block_spectra(const BlockOperator& b) {
  std::vector<SpectrumBlock> out(b.n_max + 1);
#pragma omp parallel for schedule(dynamic)
  for (int n = 0; n <= b.n_max; ++n) out[n] = block_spectrum(b, n);
  return out;
}

}  // namespace osctrace
