#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace lyaplab {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Matrices with |det| below this floor are treated as non-invertible.
inline constexpr double kDetFloor = 1e-300;

inline bool all_finite(const CMatrix& m) {
  return m.allFinite();
}

inline bool all_finite(const CVector& v) {
  return v.allFinite();
}

inline void require_square(const CMatrix& g, const char* who) {
  if (g.rows() != g.cols() || g.rows() < 1)
    throw std::domain_error(std::string(who) + ": matrix must be square, d >= 1");
}

inline void require_finite(const CMatrix& g, const char* who) {
  if (!all_finite(g))
    throw std::domain_error(std::string(who) + ": matrix has non-finite entries");
}

}  // namespace lyaplab
