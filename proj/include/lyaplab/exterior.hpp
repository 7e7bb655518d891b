#pragma once

#include <vector>

#include "lyaplab/types.hpp"

namespace lyaplab {

/// All k-element subsets of {0, ..., d-1} in lexicographic order; these index
/// the canonical basis e_I = e_{i1} ^ ... ^ e_{ik} of the k-th exterior power.
inline std::vector<std::vector<int>> k_subsets(int d, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(k);
  for (int i = 0; i < k; ++i) cur[i] = i;
  while (true) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[i] == d - k + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

/// Matrix of the k-th exterior power acting on the canonical basis of
/// Lambda^k C^d: entry (I, J) is the minor det g(I, J).
inline CMatrix compound_matrix(const CMatrix& g, int k) {
  require_square(g, "compound_matrix");
  const int d = static_cast<int>(g.rows());
  if (k < 1 || k > d) throw std::domain_error("compound_matrix: k out of range");
  if (k == 1) return g;
  const auto subsets = k_subsets(d, k);
  const auto m = static_cast<Eigen::Index>(subsets.size());
  CMatrix out(m, m);
  CMatrix minor(k, k);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) {
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          minor(i, j) = g(subsets[r][i], subsets[c][j]);
      out(r, c) = minor.determinant();
    }
  }
  return out;
}

}  // namespace lyaplab
