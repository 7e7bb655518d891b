#pragma once

#include <cmath>

#include "lyaplab/types.hpp"

namespace lyaplab {

/// Overflow-safe representative of a matrix product: exp(log_scale) * mat,
/// with mat renormalized by its operator norm after every extension so that
/// ||mat|| stays in [0.5, 2]. With this policy log_scale is exactly the
/// running log-norm partial sum used by Furstenberg-Kesten estimates.
class ScaledMatrix {
 public:
  static ScaledMatrix identity(Eigen::Index dim) {
    ScaledMatrix s;
    s.mat_ = CMatrix::Identity(dim, dim);
    return s;
  }

  explicit ScaledMatrix(const CMatrix& m) : mat_(m) {
    require_square(m, "ScaledMatrix");
    renormalize();
  }

  /// Represent x * (current product).
  void extend_left(const CMatrix& x) {
    mat_ = x * mat_;
    renormalize();
  }

  /// Represent (current product) * x.
  void extend_right(const CMatrix& x) {
    mat_ = mat_ * x;
    renormalize();
  }

  const CMatrix& mat() const { return mat_; }
  double log_scale() const { return log_scale_; }
  Eigen::Index dim() const { return mat_.rows(); }

  /// log of the represented product's operator norm.
  double log_norm() const { return log_scale_ + std::log(mat_.operatorNorm()); }

  /// The represented product as a dense matrix; only valid while the scale
  /// fits in double range.
  CMatrix dense() const {
    const double s = std::exp(log_scale_);
    if (!std::isfinite(s))
      throw std::runtime_error("ScaledMatrix::dense: scale out of double range");
    return s * mat_;
  }

 private:
  ScaledMatrix() = default;

  void renormalize() {
    require_finite(mat_, "ScaledMatrix");
    const double nu = mat_.operatorNorm();
    if (!(nu > 0.0) || !std::isfinite(nu))
      throw std::runtime_error("ScaledMatrix: zero or non-finite norm");
    mat_ /= nu;
    log_scale_ += std::log(nu);
    if (std::abs(log_scale_) > 1e15)
      throw std::runtime_error("ScaledMatrix: log scale overflow");
  }

  CMatrix mat_;
  double log_scale_{0.0};
};

/// Companion for vector trajectories L_n v; log_scale accumulates
/// log ||L_n v|| / ||v||.
class ScaledVector {
 public:
  explicit ScaledVector(const CVector& v) : vec_(v) { renormalize(); }

  void apply(const CMatrix& x) {
    vec_ = x * vec_;
    renormalize();
  }

  const CVector& vec() const { return vec_; }
  double log_scale() const { return log_scale_; }

 private:
  void renormalize() {
    const double nu = vec_.norm();
    if (!(nu > 0.0) || !std::isfinite(nu))
      throw std::runtime_error("ScaledVector: zero or non-finite norm");
    vec_ /= nu;
    log_scale_ += std::log(nu);
  }

  CVector vec_;
  double log_scale_{0.0};
};

}  // namespace lyaplab
