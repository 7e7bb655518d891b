#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "lyaplab/types.hpp"

namespace lyaplab {

/// Generalized permutation matrix M, stored exactly in log scale:
/// M e_j = (unit phase) * exp(log_mod[j]) * e_{perm[j]}.
/// Phases are dropped because they never affect eigenvalue or singular value
/// moduli of monomial products.
struct MonomialMatrix {
  std::vector<int> perm;
  std::vector<double> log_mod;
};

/// Exact monomial structure of g (one nonzero entry per row and column,
/// all other entries exactly zero), if it has one.
inline std::optional<MonomialMatrix> as_monomial(const CMatrix& g) {
  const int d = static_cast<int>(g.rows());
  if (g.cols() != d) return std::nullopt;
  MonomialMatrix m;
  m.perm.assign(d, -1);
  m.log_mod.assign(d, 0.0);
  std::vector<bool> row_used(d, false);
  for (int j = 0; j < d; ++j) {
    int hit = -1;
    for (int i = 0; i < d; ++i) {
      if (g(i, j) != Complex(0.0, 0.0)) {
        if (hit >= 0) return std::nullopt;
        hit = i;
      }
    }
    if (hit < 0 || row_used[hit]) return std::nullopt;
    row_used[hit] = true;
    m.perm[j] = hit;
    m.log_mod[j] = std::log(std::abs(g(hit, j)));
    if (!std::isfinite(m.log_mod[j])) return std::nullopt;
  }
  return m;
}

/// Exact accumulator for left products of monomial matrices. Keeps the
/// product's permutation and per-column log moduli; eigenvalue moduli follow
/// from cycle sums, so the whole trajectory stays overflow-free for any
/// horizon.
class MonomialProduct {
 public:
  explicit MonomialProduct(int dim) : perm_(dim), log_mod_(dim, 0.0) {
    for (int j = 0; j < dim; ++j) perm_[j] = j;
  }

  void extend_left(const MonomialMatrix& x) {
    const int d = dim();
    for (int j = 0; j < d; ++j) {
      log_mod_[j] += x.log_mod[perm_[j]];
      perm_[j] = x.perm[perm_[j]];
    }
  }

  void extend_right(const MonomialMatrix& x) {
    const int d = dim();
    std::vector<int> perm(d);
    std::vector<double> log_mod(d);
    for (int j = 0; j < d; ++j) {
      perm[j] = perm_[x.perm[j]];
      log_mod[j] = x.log_mod[j] + log_mod_[x.perm[j]];
    }
    perm_ = std::move(perm);
    log_mod_ = std::move(log_mod);
  }

  int dim() const { return static_cast<int>(perm_.size()); }
  const std::vector<int>& perm() const { return perm_; }
  const std::vector<double>& log_mod() const { return log_mod_; }

  bool is_diagonal() const {
    for (int j = 0; j < dim(); ++j)
      if (perm_[j] != j) return false;
    return true;
  }

  /// log of the eigenvalue moduli, sorted non-increasing. Each cycle c of the
  /// permutation contributes |c| moduli, all equal to the cycle's geometric
  /// mean of entry moduli.
  std::vector<double> log_eigen_moduli() const {
    const int d = dim();
    std::vector<double> out;
    out.reserve(d);
    std::vector<bool> seen(d, false);
    for (int j0 = 0; j0 < d; ++j0) {
      if (seen[j0]) continue;
      double sum = 0.0;
      int len = 0;
      int j = j0;
      do {
        seen[j] = true;
        sum += log_mod_[j];
        j = perm_[j];
        ++len;
      } while (j != j0);
      const double lm = sum / len;
      for (int i = 0; i < len; ++i) out.push_back(lm);
    }
    std::sort(out.begin(), out.end(), std::greater<double>());
    return out;
  }

  double log_spectral_radius() const { return log_eigen_moduli().front(); }

  /// log of the max-entry operator bound; for a monomial matrix this equals
  /// the log operator norm.
  double log_norm() const {
    return *std::max_element(log_mod_.begin(), log_mod_.end());
  }

  /// Dense representative (real, non-negative entries); valid only while the
  /// moduli fit in double range.
  CMatrix dense() const {
    const int d = dim();
    CMatrix out = CMatrix::Zero(d, d);
    for (int j = 0; j < d; ++j) out(perm_[j], j) = std::exp(log_mod_[j]);
    return out;
  }

 private:
  std::vector<int> perm_;
  std::vector<double> log_mod_;
};

}  // namespace lyaplab
