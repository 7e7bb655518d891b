#pragma once

#include <Eigen/QR>
#include <cmath>
#include <vector>

#include "lyaplab/types.hpp"

namespace lyaplab {

/// Benettin-style QR accumulation of the singular-value growth rates of a
/// left product: after each step x, factor x * q = q' * r with r
/// upper-triangular and positive diagonal, and add log |r_ii| to the running
/// sums. (1/steps) * log_r_sums estimates the Lyapunov spectrum; the per-step
/// increments are kept so batch-means standard errors can be formed later.
class QrState {
 public:
  explicit QrState(Eigen::Index dim)
      : q_(CMatrix::Identity(dim, dim)), log_r_sums_(RVector::Zero(dim)) {}

  void step(const CMatrix& x) {
    const Eigen::Index d = q_.rows();
    const CMatrix b = x * q_;
    Eigen::HouseholderQR<CMatrix> qr(b);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    const double scale = b.cwiseAbs().maxCoeff();
    RVector inc(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const double m = std::abs(r(i, i));
      if (!(m > scale * 1e-14))
        throw std::runtime_error("QrState: rank collapse below tolerance");
      inc[i] = std::log(m);
      q.col(i) *= r(i, i) / m;  // move the phase into q, leaving |r_ii| > 0
    }
    q_ = q;
    log_r_sums_ += inc;
    increments_.push_back(inc);
    ++steps_;
  }

  const CMatrix& q() const { return q_; }
  const RVector& log_r_sums() const { return log_r_sums_; }
  long steps() const { return steps_; }
  const std::vector<RVector>& increments() const { return increments_; }

 private:
  CMatrix q_;
  RVector log_r_sums_;
  std::vector<RVector> increments_;
  long steps_{0};
};

}  // namespace lyaplab
