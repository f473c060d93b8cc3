#include "osctrace/multi_index.hpp"

#include <numeric>
#include <stdexcept>

namespace osctrace {

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
  }
  return r;
}

std::int64_t level_dimension(int degree, int dim) {
  if (degree < 0 || dim < 1) throw std::invalid_argument("level_dimension: need degree >= 0, dim >= 1");
  return binomial(degree + dim - 1, dim - 1);
}

int degree_of(const MultiIndex& m) { return std::accumulate(m.begin(), m.end(), 0); }

static void enumerate_rec(int dim, int pos, int remaining, MultiIndex& cur,
                          std::vector<MultiIndex>& out) {
  if (pos == dim - 1) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    cur[pos] = v;
    enumerate_rec(dim, pos + 1, remaining - v, cur, out);
  }
}

std::vector<MultiIndex> level_basis(int degree, int dim) {
  if (degree < 0 || dim < 1) throw std::invalid_argument("level_basis: need degree >= 0, dim >= 1");
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(level_dimension(degree, dim)));
  MultiIndex cur(dim, 0);
  enumerate_rec(dim, 0, degree, cur, out);
  return out;
}

LevelIndexer::LevelIndexer(int degree, int dim) : basis_(level_basis(degree, dim)) {
  pos_.reserve(basis_.size() * 2);
  for (int i = 0; i < static_cast<int>(basis_.size()); ++i) pos_[basis_[i]] = i;
}

int LevelIndexer::position(const MultiIndex& m) const {
  auto it = pos_.find(m);
  return it == pos_.end() ? -1 : it->second;
}

}  // namespace osctrace
