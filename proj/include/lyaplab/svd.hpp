#pragma once

#include <Eigen/SVD>
#include <cmath>

#include "lyaplab/projective.hpp"
#include "lyaplab/types.hpp"

namespace lyaplab {

/// Singular value decomposition g = k * diag(a) * l with k, l unitary and
/// a sorted non-increasing. The factor a is unique; k and l follow the
/// factorization's native order. degenerate_gap is set when a1 and a2 tie
/// within tolerance, in which case the attracting point and repelling
/// hyperplane below are still well-formed but not canonical.
struct SvdTriple {
  CMatrix k;
  RVector a;
  CMatrix l;
  bool degenerate_gap{false};
};

struct SvdOptions {
  double det_floor = kDetFloor;
  double gap_tol_rel = 1e-9;  // degenerate when a1 - a2 <= gap_tol_rel * a1
};

/// SVD without the invertibility gate: trailing singular values of long
/// normalized products may underflow to zero while the unitary factors and
/// the top directions stay valid. Use svd() when the input must be
/// invertible.
inline SvdTriple svd_lenient(const CMatrix& g, const SvdOptions& opt = {}) {
  require_square(g, "svd");
  require_finite(g, "svd");
  Eigen::JacobiSVD<CMatrix> dec(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdTriple t;
  t.k = dec.matrixU();
  t.a = dec.singularValues();
  t.l = dec.matrixV().adjoint();
  if (!(t.a[0] > 0.0)) throw std::domain_error("svd: zero matrix");
  if (g.rows() >= 2)
    t.degenerate_gap = (t.a[0] - t.a[1] <= opt.gap_tol_rel * t.a[0]);
  return t;
}

inline SvdTriple svd(const CMatrix& g, const SvdOptions& opt = {}) {
  const SvdTriple t = svd_lenient(g, opt);
  double log_prod = 0.0;
  for (Eigen::Index i = 0; i < t.a.size(); ++i) {
    if (!(t.a[i] > 0.0)) throw std::domain_error("svd: matrix not invertible");
    log_prod += std::log(t.a[i]);
  }
  if (log_prod < std::log(opt.det_floor))
    throw std::domain_error("svd: |det| below invertibility floor");
  return t;
}

/// Attracting point x+ = [k e1].
inline ProjectivePoint attracting_point(const SvdTriple& t) {
  return ProjectivePoint(t.k.col(0));
}

/// Repelling hyperplane H< = span(l^-1 e2, ..., l^-1 ed) = (C l* e1)^perp.
inline ProjectiveHyperplane repelling_hyperplane(const SvdTriple& t) {
  return ProjectiveHyperplane{ProjectivePoint(t.l.adjoint().col(0))};
}

inline double delta_plus_hyper(const SvdTriple& t) {
  return dist_point_hyperplane(attracting_point(t), repelling_hyperplane(t));
}

/// Operator norm of the k-th exterior power, computed as a1 * ... * ak.
inline double exterior_norm(const SvdTriple& t, int k) {
  if (k < 1 || k > t.a.size())
    throw std::domain_error("exterior_norm: k out of range");
  double p = 1.0;
  for (int i = 0; i < k; ++i) p *= t.a[i];
  return p;
}

inline double exterior_norm(const CMatrix& g, int k) {
  return exterior_norm(svd(g), k);
}

/// N(g) = max(||g||, ||g^-1||) = max(a1, 1/ad); always >= 1.
inline double size_n(const SvdTriple& t) {
  return std::max(t.a[0], 1.0 / t.a[t.a.size() - 1]);
}

inline double size_n(const CMatrix& g) { return size_n(svd(g)); }

}  // namespace lyaplab
