#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "lyaplab/increment_law.hpp"
#include "lyaplab/qr_state.hpp"
#include "lyaplab/types.hpp"

namespace lyaplab {

inline constexpr int kBatchCount = 30;

namespace detail {

/// Batch-means standard error of the mean rate of a partial-sum series
/// S_1..S_n (S_k = sum of the first k increments): split the increments into
/// up to `batches` contiguous batches and take sd(batch means)/sqrt(B).
inline double batch_means_stderr(std::span<const double> partial_sums,
                                 int batches = kBatchCount) {
  const long n = static_cast<long>(partial_sums.size());
  if (n < 2) return 0.0;
  const int b = static_cast<int>(std::min<long>(batches, n));
  std::vector<double> means(b);
  for (int i = 0; i < b; ++i) {
    const long lo = (n * i) / b;        // increments (lo, hi]
    const long hi = (n * (i + 1)) / b;
    const double start = lo == 0 ? 0.0 : partial_sums[lo - 1];
    means[i] = (partial_sums[hi - 1] - start) / static_cast<double>(hi - lo);
  }
  const double mean = std::accumulate(means.begin(), means.end(), 0.0) / b;
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  var /= (b - 1);
  return std::sqrt(var / b);
}

}  // namespace detail

/// (1/n) log ||L_n|| at the final step of the partial-sum series, with a
/// batch-means standard error.
inline std::pair<double, double> estimate_lambda1(
    std::span<const double> log_norm_partial_sums) {
  if (log_norm_partial_sums.empty())
    throw std::domain_error("estimate_lambda1: empty series");
  const long n = static_cast<long>(log_norm_partial_sums.size());
  return {log_norm_partial_sums.back() / static_cast<double>(n),
          detail::batch_means_stderr(log_norm_partial_sums)};
}

/// Estimated Lyapunov vector (nats per step), sorted non-increasing, with the
/// first gap index s: the smallest s with lambda_s - lambda_{s+1} above the
/// gap tolerance, else d.
struct LyapunovEstimate {
  RVector lambda;
  int gap_index{1};
  RVector std_error;
  long n_used{0};
};

inline int gap_index_of(const RVector& lambda, double gap_tol) {
  const Eigen::Index d = lambda.size();
  for (Eigen::Index s = 1; s < d; ++s)
    if (lambda[s - 1] - lambda[s] > gap_tol) return static_cast<int>(s);
  return static_cast<int>(d);
}

/// Spectrum estimate from QR accumulation: lambda_k = log_r_sums[k] / steps.
/// gap_tol < 0 selects the default of 10x the largest component stderr.
inline LyapunovEstimate estimate_spectrum(const QrState& qr,
                                          double gap_tol = -1.0) {
  if (qr.steps() < 1) throw std::domain_error("estimate_spectrum: no steps");
  const Eigen::Index d = qr.log_r_sums().size();
  const long n = qr.steps();
  LyapunovEstimate est;
  est.n_used = n;
  est.lambda = qr.log_r_sums() / static_cast<double>(n);
  est.std_error.resize(d);
  std::vector<double> partial(n);
  for (Eigen::Index k = 0; k < d; ++k) {
    double acc = 0.0;
    for (long i = 0; i < n; ++i) {
      acc += qr.increments()[i][k];
      partial[i] = acc;
    }
    est.std_error[k] = detail::batch_means_stderr(partial);
  }
  // Sort components jointly by rate, non-increasing.
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return est.lambda[a] > est.lambda[b];
  });
  RVector lam(d), se(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    lam[k] = est.lambda[order[k]];
    se[k] = est.std_error[order[k]];
  }
  est.lambda = lam;
  est.std_error = se;
  if (gap_tol < 0.0) gap_tol = 10.0 * est.std_error.maxCoeff();
  est.gap_index = gap_index_of(est.lambda, gap_tol);
  return est;
}

/// A subspace given by an orthonormal basis; empty basis = the zero subspace.
/// Used to supply the Furstenberg-Kifer subspace of a scenario; it is
/// validated, never estimated.
struct SubspaceSpec {
  std::vector<CVector> basis;

  int dim() const { return static_cast<int>(basis.size()); }

  void validate(int ambient) const {
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (basis[i].size() != ambient)
        throw std::domain_error("subspace basis: wrong ambient dimension");
      for (std::size_t j = 0; j <= i; ++j) {
        const Complex ip = basis[j].dot(basis[i]);
        const double want = i == j ? 1.0 : 0.0;
        if (std::abs(ip - Complex(want, 0.0)) > 1e-10)
          throw std::domain_error("subspace basis: not orthonormal");
      }
    }
    if (dim() >= ambient)
      throw std::domain_error("subspace basis: must be a proper subspace");
  }
};

/// delta([v], [L]) = norm of the component of v orthogonal to span(L), over
/// ||v||; equals 1 for the zero subspace.
inline double dist_to_subspace(const CVector& v, const SubspaceSpec& L) {
  const double nv = v.norm();
  if (!(nv > 0.0)) throw std::domain_error("dist_to_subspace: zero vector");
  if (L.basis.empty()) return 1.0;
  L.validate(static_cast<int>(v.size()));
  CVector residual = v;
  for (const auto& b : L.basis) residual -= b * b.dot(v);
  return std::min(1.0, residual.norm() / nv);
}

/// True iff g L is contained in L (within tolerance) for every support matrix
/// of the law; the zero subspace is invariant by convention.
inline bool check_invariance(const SubspaceSpec& L, const IncrementLaw& law,
                             double tol = 1e-9) {
  if (L.basis.empty()) return true;
  L.validate(law.dim());
  for (const auto& g : law.support) {
    for (const auto& b : L.basis) {
      const CVector gb = g * b;
      CVector residual = gb;
      for (const auto& c : L.basis) residual -= c * c.dot(gb);
      if (residual.norm() > tol * gb.norm()) return false;
    }
  }
  return true;
}

}  // namespace lyaplab
