#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace osctrace {

// Multi-index (n_1, ..., n_d) with n_j >= 0.
using MultiIndex = std::vector<int>;

// C(n+d-1, d-1): number of multi-indices of degree n in d variables.
// This is both dim H_N (occupation basis) and dim H^0(CP^{d-1}, O(N)).
std::int64_t level_dimension(int degree, int dim);

std::int64_t binomial(int n, int k);

// All multi-indices of the given total degree, in ascending lexicographic
// order comparing n_1 first: for d=2, N=2 this is (0,2), (1,1), (2,0).
// This ordering is the basis-order contract shared by the Hermite and
// Bargmann-Fock sides; it must not change between runs.
std::vector<MultiIndex> level_basis(int degree, int dim);

int degree_of(const MultiIndex& m);

// Position lookup inside level_basis(degree, dim).
class LevelIndexer {
 public:
  LevelIndexer(int degree, int dim);

  int position(const MultiIndex& m) const;  // -1 if not in the level
  const std::vector<MultiIndex>& basis() const { return basis_; }
  int size() const { return static_cast<int>(basis_.size()); }

 private:
  struct VecHash {
    std::size_t operator()(const std::vector<int>& v) const {
      std::size_t h = 1469598103934665603ull;
      for (int x : v) {
        h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull;
        h *= 1099511628211ull;
      }
      return h;
    }
  };
  std::vector<MultiIndex> basis_;
  std::unordered_map<MultiIndex, int, VecHash> pos_;
};

}  // namespace osctrace
