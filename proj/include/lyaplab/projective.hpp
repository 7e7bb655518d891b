#pragma once

#include <algorithm>
#include <cmath>

#include "lyaplab/types.hpp"

namespace lyaplab {

/// A point of complex projective space, stored as a unit-norm representative.
/// Two points are the same line iff their Fubini-Study distance is zero.
class ProjectivePoint {
 public:
  explicit ProjectivePoint(const CVector& v) {
    if (!all_finite(v))
      throw std::domain_error("ProjectivePoint: non-finite representative");
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n))
      throw std::domain_error("ProjectivePoint: zero representative");
    rep_ = v / n;
  }

  const CVector& rep() const { return rep_; }
  Eigen::Index dim() const { return rep_.size(); }

 private:
  CVector rep_;
};

/// Projective hyperplane H = (C u)^perp, stored by its normal line u.
struct ProjectiveHyperplane {
  ProjectivePoint normal;
};

/// Fubini-Study distance ||v ^ w|| / (||v|| ||w||), in [0, 1].
/// For unit vectors this is sqrt(1 - |<v,w>|^2); near-parallel pairs are
/// instead evaluated through the explicit wedge coordinates
/// sum_{i<j} |v_i w_j - v_j w_i|^2, which stays accurate down to distances
/// far below sqrt(machine epsilon) and is exactly symmetric.
inline double fubini_study(const ProjectivePoint& x, const ProjectivePoint& y) {
  if (x.dim() != y.dim())
    throw std::domain_error("fubini_study: dimension mismatch");
  const double c = std::min(1.0, std::abs(x.rep().dot(y.rep())));
  if (c <= 0.99) return std::sqrt(std::max(0.0, (1.0 - c) * (1.0 + c)));
  const CVector& v = x.rep();
  const CVector& w = y.rep();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    for (Eigen::Index j = i + 1; j < v.size(); ++j)
      sum += std::norm(v[i] * w[j] - v[j] * w[i]);
  return std::min(1.0, std::sqrt(sum));
}

/// Distance from a point to a hyperplane: |<v, u>| for unit v and unit
/// normal u. Equals the minimum Fubini-Study distance from x to lines in h.
inline double dist_point_hyperplane(const ProjectivePoint& x,
                                    const ProjectiveHyperplane& h) {
  if (x.dim() != h.normal.dim())
    throw std::domain_error("dist_point_hyperplane: dimension mismatch");
  return std::min(1.0, std::abs(x.rep().dot(h.normal.rep())));
}

/// Projective action g . x.
inline ProjectivePoint act(const CMatrix& g, const ProjectivePoint& x) {
  return ProjectivePoint(g * x.rep());
}

}  // namespace lyaplab
