#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "lyaplab/types.hpp"

namespace lyaplab {

/// Moduli of the eigenvalues, sorted non-increasing; moduli[0] is the
/// spectral radius.
struct EigenModuli {
  RVector moduli;
  double rho() const { return moduli[0]; }
};

/// All d eigenvalue moduli via a complex Schur decomposition. Throws on
/// solver non-convergence instead of returning partial results.
inline EigenModuli eigen_moduli(const CMatrix& g) {
  require_square(g, "eigen_moduli");
  require_finite(g, "eigen_moduli");
  Eigen::ComplexSchur<CMatrix> schur(g, /*computeU=*/false);
  if (schur.info() != Eigen::Success)
    throw std::runtime_error("eigen_moduli: Schur iteration did not converge");
  const Eigen::Index d = g.rows();
  EigenModuli out;
  out.moduli.resize(d);
  for (Eigen::Index i = 0; i < d; ++i)
    out.moduli[i] = std::abs(schur.matrixT()(i, i));
  std::sort(out.moduli.data(), out.moduli.data() + d, std::greater<double>());
  return out;
}

inline double spectral_radius(const CMatrix& g) {
  return eigen_moduli(g).rho();
}

}  // namespace lyaplab
