#pragma once

#include <Eigen/LU>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "lyaplab/monomial.hpp"
#include "lyaplab/rng.hpp"
#include "lyaplab/svd.hpp"
#include "lyaplab/types.hpp"

namespace lyaplab {

enum class LawKind { iid_finite, markov_finite };

/// Finitely supported increment law: either i.i.d. draws from `support` with
/// `weights`, or a finite Markov chain over support indices with a
/// row-stochastic `kernel` and an explicit `initial` distribution.
struct IncrementLaw {
  LawKind kind{LawKind::iid_finite};
  std::vector<CMatrix> support;
  std::vector<std::string> labels;  // optional, for diagnostics
  std::vector<double> weights;      // iid
  Eigen::MatrixXd kernel;           // markov, row-stochastic
  std::vector<double> initial;      // markov

  int dim() const {
    return support.empty() ? 0 : static_cast<int>(support.front().rows());
  }

  int states() const { return static_cast<int>(support.size()); }

  std::string state_name(int i) const {
    if (i >= 0 && i < static_cast<int>(labels.size())) return labels[i];
    return "state " + std::to_string(i);
  }

  /// True when every support matrix is exactly monomial; such laws admit the
  /// exact log-scale product representation.
  bool monomial_support() const {
    for (const auto& g : support)
      if (!as_monomial(g)) return false;
    return !support.empty();
  }

  std::vector<MonomialMatrix> monomial_views() const {
    std::vector<MonomialMatrix> out;
    out.reserve(support.size());
    for (const auto& g : support) {
      auto m = as_monomial(g);
      if (!m) throw std::domain_error("monomial_views: support not monomial");
      out.push_back(std::move(*m));
    }
    return out;
  }

  void validate() const;
};

namespace detail {

inline void check_probability_vector(const std::vector<double>& p,
                                     std::size_t want, const char* what) {
  if (p.size() != want)
    throw std::domain_error(std::string(what) + ": expected " +
                            std::to_string(want) + " entries, got " +
                            std::to_string(p.size()));
  double sum = 0.0;
  for (double w : p) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::domain_error(std::string(what) + ": negative or non-finite weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::domain_error(std::string(what) + ": entries sum to " +
                            std::to_string(sum) + ", expected 1");
}

}  // namespace detail

inline void IncrementLaw::validate() const {
  if (support.empty()) throw std::domain_error("law.support: empty");
  const int d = dim();
  for (std::size_t i = 0; i < support.size(); ++i) {
    const auto& g = support[i];
    if (g.rows() != d || g.cols() != d)
      throw std::domain_error("law.support[" + std::to_string(i) +
                              "]: dimension mismatch");
    try {
      (void)svd(g);  // invertibility + finiteness
    } catch (const std::domain_error& e) {
      throw std::domain_error("law.support[" + std::to_string(i) + "]: " +
                              e.what());
    }
  }
  if (kind == LawKind::iid_finite) {
    detail::check_probability_vector(weights, support.size(), "law.weights");
  } else {
    const int n = states();
    if (kernel.rows() != n || kernel.cols() != n)
      throw std::domain_error("law.kernel: expected " + std::to_string(n) +
                              "x" + std::to_string(n) + " matrix");
    for (int i = 0; i < n; ++i) {
      double sum = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p = kernel(i, j);
        if (!(p >= 0.0) || !std::isfinite(p))
          throw std::domain_error("law.kernel row " + state_name(i) +
                                  ": negative or non-finite entry");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-12)
        throw std::domain_error("law.kernel row " + state_name(i) +
                                ": sums to " + std::to_string(sum));
    }
    detail::check_probability_vector(initial, support.size(), "law.initial");
  }
}

namespace detail {

/// States reachable from `from` along positive-probability edges.
inline std::vector<bool> reachable(const Eigen::MatrixXd& kernel, int from) {
  const int n = static_cast<int>(kernel.rows());
  std::vector<bool> seen(n, false);
  std::vector<int> stack{from};
  seen[from] = true;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v = 0; v < n; ++v)
      if (kernel(u, v) > 0.0 && !seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
  }
  return seen;
}

}  // namespace detail

/// True iff the kernel's positive-transition graph is strongly connected.
inline bool kernel_irreducible(const Eigen::MatrixXd& kernel,
                               std::string* failing = nullptr) {
  const int n = static_cast<int>(kernel.rows());
  const auto fwd = detail::reachable(kernel, 0);
  for (int v = 0; v < n; ++v)
    if (!fwd[v]) {
      if (failing) *failing = "state 0 cannot reach state " + std::to_string(v);
      return false;
    }
  for (int u = 1; u < n; ++u) {
    if (!detail::reachable(kernel, u)[0]) {
      if (failing)
        *failing = "state " + std::to_string(u) + " cannot reach state 0";
      return false;
    }
  }
  return true;
}

/// Period of an irreducible kernel (1 = aperiodic): gcd over edges u->v of
/// level(u) + 1 - level(v) for a BFS level assignment.
inline int kernel_period(const Eigen::MatrixXd& kernel) {
  const int n = static_cast<int>(kernel.rows());
  std::vector<int> level(n, -1);
  std::vector<int> queue{0};
  level[0] = 0;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const int u = queue[h];
    for (int v = 0; v < n; ++v)
      if (kernel(u, v) > 0.0 && level[v] < 0) {
        level[v] = level[u] + 1;
        queue.push_back(v);
      }
  }
  int g = 0;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (kernel(u, v) > 0.0) g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
  return g == 0 ? 1 : g;
}

/// Left-fixed probability vector of the kernel: pi K = pi, entries >= 0,
/// sum 1, residual <= 1e-12. Throws for reducible kernels, naming the
/// failing states.
inline std::vector<double> stationary_distribution(const IncrementLaw& law) {
  if (law.kind != LawKind::markov_finite)
    throw std::domain_error("stationary_distribution: law is not markov");
  std::string why;
  if (!kernel_irreducible(law.kernel, &why))
    throw std::domain_error("stationary_distribution: kernel reducible (" +
                            why + ")");
  const int n = law.states();
  // Solve (K^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
  Eigen::MatrixXd m = law.kernel.transpose() - Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  m.row(n - 1).setOnes();
  b[n - 1] = 1.0;
  Eigen::VectorXd pi = m.fullPivLu().solve(b);
  const double residual =
      (Eigen::RowVectorXd(pi.transpose()) * law.kernel - pi.transpose())
          .cwiseAbs()
          .maxCoeff();
  if (residual > 1e-12)
    throw std::runtime_error("stationary_distribution: residual " +
                             std::to_string(residual));
  std::vector<double> out(pi.data(), pi.data() + n);
  for (double& p : out) p = std::max(0.0, p);
  return out;
}

/// Draws one increment at a time; holds the Markov chain's current state.
/// The first draw uses the initial distribution (markov) or the weights
/// (iid); results are deterministic given the rng stream.
class StepSampler {
 public:
  explicit StepSampler(const IncrementLaw& law) : law_(&law) {}

  /// Returns (support matrix, support index) of the next increment.
  std::pair<const CMatrix*, int> step(Rng& rng) {
    int idx;
    if (law_->kind == LawKind::iid_finite) {
      idx = static_cast<int>(rng.discrete(law_->weights));
    } else if (prev_ < 0) {
      idx = static_cast<int>(rng.discrete(law_->initial));
    } else {
      const Eigen::Index n = law_->kernel.cols();
      row_.resize(n);
      for (Eigen::Index j = 0; j < n; ++j) row_[j] = law_->kernel(prev_, j);
      idx = static_cast<int>(rng.discrete(row_));
    }
    prev_ = idx;
    return {&law_->support[idx], idx};
  }

  void reset() { prev_ = -1; }

 private:
  const IncrementLaw* law_;
  int prev_{-1};
  std::vector<double> row_;
};

}  // namespace lyaplab
