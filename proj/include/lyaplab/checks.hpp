#pragma once

#include <cmath>

#include "lyaplab/exterior.hpp"
#include "lyaplab/projective.hpp"
#include "lyaplab/spectral.hpp"
#include "lyaplab/svd.hpp"
#include "lyaplab/types.hpp"

namespace lyaplab {

/// Relative slack used by all deterministic inequality checks.
inline constexpr double kCheckSlack = 1e-9;

/// Conjugate transpose; the map whose pushforward sends a law mu to mu-check.
inline CMatrix transpose_pushforward(const CMatrix& g) { return g.adjoint(); }

struct GapCheckResult {
  bool applicable{false};
  bool holds{true};
  double lhs{0.0};  // rho(g) / ||g||
  double rhs{0.0};  // delta(x+, H<) / 2
};

/// If delta(x+, H<) > 2 sqrt(a2/a1) then rho(g)/||g|| >= delta(x+, H<)/2.
/// The conclusion is only claimed when the premise holds.
inline GapCheckResult check_spectral_gap_bound(const CMatrix& g) {
  const SvdTriple t = svd(g);
  const double delta = delta_plus_hyper(t);
  const double ratio = t.a[1] / t.a[0];
  GapCheckResult r;
  r.applicable = delta > 2.0 * std::sqrt(ratio);
  r.lhs = spectral_radius(g) / t.a[0];
  r.rhs = delta / 2.0;
  if (r.applicable) r.holds = r.lhs >= r.rhs * (1.0 - kCheckSlack);
  return r;
}

struct BoundCheckResult {
  bool holds{true};
  double lhs{0.0};
  double rhs{0.0};
};

/// ||g* u|| / (||g*|| ||u||) <= delta(x+_g, (C u)^perp) + a2(g)/a1(g),
/// valid for every invertible g and nonzero u.
inline BoundCheckResult check_adjoint_alignment_bound(const CMatrix& g,
                                                      const CVector& u) {
  if (!(u.norm() > 0.0)) throw std::domain_error("alignment bound: u = 0");
  const SvdTriple t = svd(g);
  BoundCheckResult r;
  r.lhs = (g.adjoint() * u).norm() / (t.a[0] * u.norm());
  const ProjectiveHyperplane h{ProjectivePoint(u)};
  r.rhs = dist_point_hyperplane(attracting_point(t), h) + t.a[1] / t.a[0];
  r.holds = r.lhs <= r.rhs + kCheckSlack;
  return r;
}

/// delta(x+_g, g.x) <= (a2/a1) ||g|| ||v|| / ||g v||.
inline BoundCheckResult check_contraction_bound(const CMatrix& g,
                                                const ProjectivePoint& x) {
  const SvdTriple t = svd(g);
  BoundCheckResult r;
  const CVector gv = g * x.rep();
  r.lhs = fubini_study(attracting_point(t), ProjectivePoint(gv));
  r.rhs = t.a[1] / gv.norm();  // a2/a1 * a1 ||v|| / ||gv|| with ||v|| = 1
  r.holds = r.lhs <= r.rhs * (1.0 + kCheckSlack) + 1e-12;
  return r;
}

struct RadiusBoundsResult {
  bool holds{true};
  bool sandwich{true};   // a_d <= rho <= a_1
  bool power{true};      // rho(Lambda^s g) <= rho(g)^s
  bool size{true};       // 1/N(g) <= rho(g) <= N(g)
};

/// The three elementary spectral-radius bounds used by the proofs; each must
/// hold for every invertible matrix and 1 <= s <= d.
inline RadiusBoundsResult check_radius_bounds(const CMatrix& g, int s) {
  const SvdTriple t = svd(g);
  if (s < 1 || s > t.a.size())
    throw std::domain_error("check_radius_bounds: s out of range");
  const double rho = spectral_radius(g);
  RadiusBoundsResult r;
  const double slack = kCheckSlack;
  r.sandwich = t.a[t.a.size() - 1] <= rho * (1.0 + slack) &&
               rho <= t.a[0] * (1.0 + slack);
  const double rho_ext = spectral_radius(compound_matrix(g, s));
  r.power = rho_ext <= std::pow(rho, s) * (1.0 + slack);
  const double n = size_n(t);
  r.size = 1.0 / n <= rho * (1.0 + slack) && rho <= n * (1.0 + slack);
  r.holds = r.sandwich && r.power && r.size;
  return r;
}

}  // namespace lyaplab
