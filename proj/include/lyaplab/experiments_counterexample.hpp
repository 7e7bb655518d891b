#pragma once

// The Markov counterexample run and the deterministic-inequality fuzzer.
// Included via experiments.hpp.

#include <array>

namespace lyaplab {

struct CounterexampleReport {
  std::uint64_t master_seed{0};
  long n_max{0};
  int initial_state{0};

  // Windowed extremes of (1/n) log rho(L_n) over n in [n_max/2, n_max].
  double windowed_min{0.0};
  double windowed_max{0.0};
  // Spread of (1/n) log ||L_n|| over the same window.
  double norm_rate_fluctuation{0.0};

  double lambda1_hat{0.0};
  double lambda1_se{0.0};
  LyapunovEstimate qr;

  /// Fraction of steps with rho(L_n) = 1 (|log rho| <= 1e-9).
  double rho_one_fraction{0.0};
  /// Occupancy of the three cosets H, sigma H, omega H of the diagonal
  /// subgroup, read off the exact permutation part of L_n.
  std::array<double, 3> coset_occupancy{0.0, 0.0, 0.0};

  long returns_observed{0};
  bool return_gaps_in_1_3{true};
  bool tau_bound_ok{true};  // tau^(n) <= 3n + 1 for every n
  double max_exactness_violation{0.0};
};

/// Runs one long trajectory of the Markov chain on {a, sigma, omega} whose
/// spectral radius fails the law of large numbers while the norm obeys it.
/// The product is tracked exactly as a generalized permutation matrix in log
/// scale, so rho(L_n) is exact at every step for any horizon.
inline CounterexampleReport run_counterexample(long n_max, std::uint64_t seed) {
  ScenarioConfig cfg = builtin_scenario("paper-counterexample");
  cfg.n_max = n_max;
  cfg.master_seed = seed;
  cfg.validate();
  const auto monomials = cfg.law.monomial_views();

  CounterexampleReport rep;
  rep.master_seed = seed;
  rep.n_max = n_max;

  Rng rng(seed, 0);
  StepSampler sampler(cfg.law);
  MonomialProduct walk(cfg.dim);
  QrState qr(cfg.dim);
  ReturnClock clock{/*marked_state=*/0, {}};
  std::vector<double> norm_partials;
  norm_partials.reserve(n_max);

  const long window_lo = n_max / 2;
  double win_min = std::numeric_limits<double>::infinity();
  double win_max = -std::numeric_limits<double>::infinity();
  double norm_rate_min = std::numeric_limits<double>::infinity();
  double norm_rate_max = -std::numeric_limits<double>::infinity();
  long rho_one_steps = 0;
  std::array<long, 3> coset_steps{0, 0, 0};

  for (long i = 1; i <= n_max; ++i) {
    const auto [x, idx] = sampler.step(rng);
    if (i == 1) rep.initial_state = idx;
    walk.extend_left(monomials[idx]);
    qr.step(*x);
    clock.record(i, idx);

    const double log_rho = walk.log_spectral_radius();
    const double log_norm = walk.log_norm();
    norm_partials.push_back(log_norm);
    if (!(log_rho <= log_norm + 1e-9))
      throw std::logic_error("counterexample: rho <= norm violated");

    // Coset of L_n in G / H = Z/3: the permutation part is a power of the
    // 3-cycle, so the image of index 0 identifies it.
    const int coset = walk.perm()[0];
    ++coset_steps[coset];
    if (std::abs(log_rho) <= 1e-9) ++rho_one_steps;
    if (coset != 0)
      rep.max_exactness_violation =
          std::max(rep.max_exactness_violation, std::abs(log_rho));

    const double rho_rate = log_rho / static_cast<double>(i);
    const double norm_rate = log_norm / static_cast<double>(i);
    if (i >= window_lo) {
      win_min = std::min(win_min, rho_rate);
      win_max = std::max(win_max, rho_rate);
      norm_rate_min = std::min(norm_rate_min, norm_rate);
      norm_rate_max = std::max(norm_rate_max, norm_rate);
    }
  }

  rep.windowed_min = win_min;
  rep.windowed_max = win_max;
  rep.norm_rate_fluctuation = norm_rate_max - norm_rate_min;
  const auto [l1, se] = estimate_lambda1(norm_partials);
  rep.lambda1_hat = l1;
  rep.lambda1_se = se;
  rep.qr = estimate_spectrum(qr);
  rep.rho_one_fraction =
      static_cast<double>(rho_one_steps) / static_cast<double>(n_max);
  for (int c = 0; c < 3; ++c)
    rep.coset_occupancy[c] =
        static_cast<double>(coset_steps[c]) / static_cast<double>(n_max);

  rep.returns_observed = static_cast<long>(clock.return_times.size());
  long prev = 0;
  long count = 0;
  for (long tau : clock.return_times) {
    const long gap = tau - prev;
    if (prev == 0 ? gap > 3 : (gap != 1 && gap != 3))
      rep.return_gaps_in_1_3 = false;
    ++count;
    if (tau > 3 * count + 1) rep.tau_bound_ok = false;
    prev = tau;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Deterministic inequality fuzzing
// ---------------------------------------------------------------------------

struct FuzzViolation {
  std::string check;
  int dim{0};
  CMatrix input;  // the reproducing matrix
  CVector aux;    // probe vector where the check takes one
  double lhs{0.0};
  double rhs{0.0};
};

struct FuzzReport {
  long samples_run{0};
  long corpus_run{0};
  std::vector<FuzzViolation> violations;
  bool clean() const { return violations.empty(); }
};

namespace detail {

inline CMatrix gaussian_matrix(int d, Rng& rng) {
  CMatrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = rng.cgaussian();
  return g;
}

inline CVector gaussian_vector(int d, Rng& rng) {
  CVector v(d);
  for (int i = 0; i < d; ++i) v[i] = rng.cgaussian();
  return v;
}

inline void fuzz_one(const CMatrix& g, const CVector& u, const CVector& xv,
                     std::vector<FuzzViolation>& out) {
  const int d = static_cast<int>(g.rows());
  const auto gap = check_spectral_gap_bound(g);
  if (gap.applicable && !gap.holds)
    out.push_back({"spectral_gap_bound", d, g, CVector(), gap.lhs, gap.rhs});
  const auto align = check_adjoint_alignment_bound(g, u);
  if (!align.holds)
    out.push_back({"adjoint_alignment_bound", d, g, u, align.lhs, align.rhs});
  const auto contr = check_contraction_bound(g, ProjectivePoint(xv));
  if (!contr.holds)
    out.push_back({"contraction_bound", d, g, xv, contr.lhs, contr.rhs});
  for (int s = 1; s <= d; ++s) {
    const auto rb = check_radius_bounds(g, s);
    if (!rb.holds) {
      out.push_back({"radius_bounds(s=" + std::to_string(s) + ")", d, g,
                     CVector(), 0.0, 0.0});
      break;
    }
  }
}

/// All products of length 1..max_len of the counterexample matrices.
inline std::vector<CMatrix> counterexample_corpus(int max_len) {
  const std::vector<CMatrix> gens = {builtin::counterexample_a(),
                                     builtin::counterexample_sigma(),
                                     builtin::counterexample_omega()};
  std::vector<CMatrix> out = gens;
  std::size_t level_begin = 0;
  for (int len = 2; len <= max_len; ++len) {
    const std::size_t level_end = out.size();
    for (std::size_t i = level_begin; i < level_end; ++i)
      for (const auto& g : gens) out.push_back(g * out[i]);
    level_begin = level_end;
  }
  return out;
}

}  // namespace detail

/// Evaluates every deterministic inequality on `count` random complex
/// Gaussian invertible matrices per dimension (plus probe vectors), and
/// optionally on the counterexample product corpus. Each check is its own
/// oracle; any violation is returned with its reproducing input.
inline FuzzReport run_lemma_fuzz(long count, const std::vector<int>& dims,
                                 std::uint64_t seed,
                                 bool include_counterexample_corpus = true,
                                 int workers = 1) {
  FuzzReport rep;
  if (count > 0) {
    std::vector<std::vector<FuzzViolation>> found(dims.size());
    detail::run_trials(static_cast<long>(dims.size()), workers, [&](long di) {
      const int d = dims[di];
      Rng rng(seed, static_cast<std::uint64_t>(di));
      for (long i = 0; i < count; ++i) {
        CMatrix g = detail::gaussian_matrix(d, rng);
        const CVector u = detail::gaussian_vector(d, rng);
        const CVector xv = detail::gaussian_vector(d, rng);
        try {
          detail::fuzz_one(g, u, xv, found[di]);
        } catch (const std::domain_error&) {
          // vanishingly rare near-singular draw; skip rather than bias
        }
      }
    });
    for (auto& f : found)
      for (auto& v : f) rep.violations.push_back(std::move(v));
    rep.samples_run = count * static_cast<long>(dims.size());
  }
  if (include_counterexample_corpus) {
    const auto corpus = detail::counterexample_corpus(6);
    Rng rng(seed, 999);
    const CVector ones = detail::unit_ones(3);
    for (const auto& g : corpus) {
      const CVector u = detail::gaussian_vector(3, rng);
      detail::fuzz_one(g, u, ones, rep.violations);
      detail::fuzz_one(g, ones, u, rep.violations);
    }
    rep.corpus_run = static_cast<long>(2 * corpus.size());
  }
  return rep;
}

}  // namespace lyaplab
