#pragma once

#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "lyaplab/checks.hpp"
#include "lyaplab/estimators.hpp"
#include "lyaplab/exterior.hpp"
#include "lyaplab/monomial.hpp"
#include "lyaplab/qr_state.hpp"
#include "lyaplab/return_clock.hpp"
#include "lyaplab/scaled_matrix.hpp"
#include "lyaplab/scenario.hpp"
#include "lyaplab/spectral.hpp"
#include "lyaplab/svd.hpp"
#include "lyaplab/trajectory.hpp"

namespace lyaplab {

namespace detail {

/// Runs fn(trial) for trial = 0..trials-1 across up to `workers` threads.
/// Each trial owns its RNG stream, so scheduling cannot change results.
template <class Fn>
void run_trials(long trials, int workers, Fn&& fn) {
  workers = static_cast<int>(std::min<long>(std::max(1, workers), trials));
  if (workers == 1) {
    for (long t = 0; t < trials; ++t) fn(t);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&] {
    while (true) {
      const long t = next.fetch_add(1);
      if (t >= trials) return;
      try {
        fn(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline double logsumexp(const std::vector<double>& xs) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : xs) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

struct RunningStat {
  double sum{0.0}, sum2{0.0};
  double mn{std::numeric_limits<double>::infinity()};
  double mx{-std::numeric_limits<double>::infinity()};
  long n{0};

  void add(double x) {
    sum += x;
    sum2 += x * x;
    mn = std::min(mn, x);
    mx = std::max(mx, x);
    ++n;
  }
  double mean() const { return n > 0 ? sum / n : 0.0; }
  double stdev() const {
    if (n < 2) return 0.0;
    const double m = mean();
    return std::sqrt(std::max(0.0, (sum2 - n * m * m) / (n - 1)));
  }
};

/// Scaled-matrix walks of every exterior power Lambda^k, k = 1..max_k, driven
/// by precomputed exterior powers of the support. log ||Lambda^k product|| is
/// then available at any horizon without underflow, which gives the
/// log singular values by telescoping.
class ExteriorWalk {
 public:
  ExteriorWalk(const IncrementLaw& law, int max_k, WalkSide side)
      : side_(side) {
    const int d = law.dim();
    max_k_ = std::min(max_k, d);
    powers_.resize(max_k_);
    walks_.reserve(max_k_);
    for (int k = 1; k <= max_k_; ++k) {
      auto& per_support = powers_[k - 1];
      per_support.reserve(law.support.size());
      for (const auto& g : law.support) per_support.push_back(compound_matrix(g, k));
      walks_.push_back(ScaledMatrix::identity(per_support.front().rows()));
    }
  }

  void step(int support_index) {
    for (int k = 1; k <= max_k_; ++k) {
      const CMatrix& x = powers_[k - 1][support_index];
      if (side_ == WalkSide::left)
        walks_[k - 1].extend_left(x);
      else
        walks_[k - 1].extend_right(x);
    }
  }

  int max_k() const { return max_k_; }
  const ScaledMatrix& level(int k) const { return walks_[k - 1]; }
  double log_norm(int k) const { return walks_[k - 1].log_norm(); }

  /// log a_k of the represented product, from the exterior norm telescope.
  double log_singular_value(int k) const {
    return k == 1 ? log_norm(1) : log_norm(k) - log_norm(k - 1);
  }

  /// log rho_k of the represented product: top eigenvalue moduli of the
  /// normalized exterior products, telescoped. Stable whenever the exterior
  /// products' spectral radii are not astronomically below their norms.
  double log_rho_component(int k) const {
    return k == 1 ? log_rho_level(1) : log_rho_level(k) - log_rho_level(k - 1);
  }

  double log_rho_level(int k) const {
    const ScaledMatrix& w = walks_[k - 1];
    const double top = eigen_moduli(w.mat()).rho();
    if (!(top > 0.0) || !std::isfinite(top))
      throw std::runtime_error("ExteriorWalk: spectral radius below resolution");
    return w.log_scale() + std::log(top);
  }

 private:
  WalkSide side_;
  int max_k_{0};
  std::vector<std::vector<CMatrix>> powers_;  // [k-1][support index]
  std::vector<ScaledMatrix> walks_;
};

/// Per-support constants shared by the runs.
struct SupportConstants {
  std::vector<double> log_norm;      // log a_1(X_i)
  std::vector<double> log_ad;        // log a_d(X_i)
  std::vector<double> log_size_n;    // log N(X_i)
  std::vector<double> log_abs_det;

  explicit SupportConstants(const IncrementLaw& law) {
    for (const auto& g : law.support) {
      const SvdTriple t = svd(g);
      log_norm.push_back(std::log(t.a[0]));
      log_ad.push_back(std::log(t.a[t.a.size() - 1]));
      log_size_n.push_back(std::log(size_n(t)));
      log_abs_det.push_back(std::log(std::abs(g.determinant())));
    }
  }
};

inline CVector default_probe(int d) {
  CVector v(d);
  for (int i = 0; i < d; ++i) v[i] = Complex(1.0 + i, 0.0);
  v /= v.norm();
  return v;
}

inline CVector unit_ones(int d) {
  CVector v = CVector::Constant(d, Complex(1.0, 0.0));
  v /= v.norm();
  return v;
}

}  // namespace detail

/// Pooled spectrum across trials: componentwise mean, cross-trial standard
/// error when there are several trials, the single trial's batch-means error
/// otherwise.
inline LyapunovEstimate pool_spectra(const std::vector<LyapunovEstimate>& per_trial,
                                     double gap_tol = -1.0) {
  if (per_trial.empty()) throw std::domain_error("pool_spectra: empty");
  const Eigen::Index d = per_trial.front().lambda.size();
  const auto t = static_cast<long>(per_trial.size());
  LyapunovEstimate out;
  out.lambda = RVector::Zero(d);
  out.std_error = RVector::Zero(d);
  out.n_used = per_trial.front().n_used;
  for (const auto& e : per_trial) out.lambda += e.lambda;
  out.lambda /= static_cast<double>(t);
  if (t > 1) {
    RVector var = RVector::Zero(d);
    for (const auto& e : per_trial) {
      const RVector diff = e.lambda - out.lambda;
      var += diff.cwiseProduct(diff);
    }
    var /= static_cast<double>(t - 1);
    out.std_error = (var / static_cast<double>(t)).cwiseSqrt();
  } else {
    out.std_error = per_trial.front().std_error;
  }
  if (gap_tol < 0.0) gap_tol = 10.0 * out.std_error.maxCoeff();
  out.gap_index = gap_index_of(out.lambda, gap_tol);
  return out;
}

struct ScenarioSummary {
  std::string scenario;
  std::uint64_t master_seed{0};
  long trials{0};
  long n_max{0};
  long failed_trials{0};
  double lambda1_hat{0.0};
  double lambda1_se{0.0};
  LyapunovEstimate qr;
};

// ---------------------------------------------------------------------------
// Norm / spectral-radius law of large numbers
// ---------------------------------------------------------------------------

struct LlnCheckpointStats {
  long n{0};
  detail::RunningStat norm_rate;      // (1/n) log ||L_n||
  detail::RunningStat rho_rate;       // (1/n) log rho(L_n)
  detail::RunningStat abs_gap;        // (1/n) |log rho - log ||L_n|| |
  double mean_abs_dev_from_lambda1{0.0};
};

struct LlnReport {
  ScenarioSummary summary;
  std::vector<LlnCheckpointStats> per_n;
  std::vector<TrajectoryRecord> trajectories;

  const LlnCheckpointStats& at(long n) const {
    for (const auto& s : per_n)
      if (s.n == n) return s;
    throw std::out_of_range("LlnReport: no checkpoint n=" + std::to_string(n));
  }
};

/// Monte Carlo check of the norm and spectral-radius laws of large numbers:
/// per-checkpoint statistics of (1/n) log ||L_n|| and (1/n) log rho(L_n),
/// plus the trial-mean absolute deviation of the rho rate from lambda1_hat.
inline LlnReport run_lln(const ScenarioConfig& cfg, int workers = 1) {
  cfg.validate();
  const auto cps = cfg.checkpoints();
  const bool exact = cfg.law.monomial_support();
  const detail::SupportConstants consts(cfg.law);
  const auto monomials =
      exact ? cfg.law.monomial_views() : std::vector<MonomialMatrix>{};

  LlnReport rep;
  rep.trajectories.assign(cfg.trials, {});
  std::vector<double> final_norm_rate(cfg.trials, 0.0);
  std::vector<double> trial0_partials;
  std::vector<LyapunovEstimate> spectra(cfg.trials);

  detail::run_trials(cfg.trials, workers, [&](long t) {
    TrajectoryRecord& rec = rep.trajectories[t];
    rec.trial = t;
    try {
      Rng rng(cfg.master_seed, static_cast<std::uint64_t>(t));
      StepSampler sampler(cfg.law);
      ScaledMatrix walk = ScaledMatrix::identity(cfg.dim);
      MonomialProduct exact_walk(cfg.dim);
      QrState qr(cfg.dim);
      std::optional<ScaledVector> lv;
      if (cfg.probe_vector)
        lv.emplace(CVector(*cfg.probe_vector / cfg.probe_vector->norm()));
      std::vector<double> partials;
      partials.reserve(cfg.n_max);
      double sum_log_n = 0.0, sum_log_ad = 0.0;
      std::size_t cp = 0;
      for (long i = 1; i <= cfg.n_max; ++i) {
        const auto [x, idx] = sampler.step(rng);
        if (cfg.walk_side == WalkSide::left) {
          walk.extend_left(*x);
          if (exact) exact_walk.extend_left(monomials[idx]);
          qr.step(*x);
        } else {
          walk.extend_right(*x);
          if (exact) exact_walk.extend_right(monomials[idx]);
          qr.step(x->adjoint());  // singular values of R_n = those of R_n^*
        }
        if (lv) lv->apply(*x);
        sum_log_n += consts.log_size_n[idx];
        sum_log_ad += consts.log_ad[idx];
        partials.push_back(walk.log_scale());
        if (cp < cps.size() && cps[cp] == i) {
          CheckpointObservation obs;
          obs.n = i;
          obs.log_norm = walk.log_norm();
          if (exact) {
            obs.log_rho = exact_walk.log_spectral_radius();
          } else {
            const double top = eigen_moduli(walk.mat()).rho();
            if (!(top > 0.0) || !std::isfinite(top))
              throw std::runtime_error("spectral radius below fp resolution");
            obs.log_rho = walk.log_scale() + std::log(top);
          }
          const SvdTriple tr = svd_lenient(walk.mat());
          obs.degenerate = tr.degenerate_gap;
          if (!tr.degenerate_gap) {
            obs.delta_plus_hyper = delta_plus_hyper(tr);
            if (cfg.l_mu)
              obs.delta_to_lmu =
                  dist_to_subspace(attracting_point(tr).rep(), *cfg.l_mu);
          }
          if (lv) obs.vector_log_growth = lv->log_scale();
          if (cfg.law.kind == LawKind::markov_finite) obs.coset_label = idx;
          obs.assert_domination();
          // |log rho| <= sum log N(X_i) and sum log a_d(X_i) <= log rho:
          // deterministic consequences of submultiplicativity; violations
          // mean a broken measurement.
          const double slack = 1e-9 + 1e-12 * static_cast<double>(i);
          if (std::abs(obs.log_rho) > sum_log_n + slack)
            throw std::logic_error("uniform integrability bound violated");
          if (sum_log_ad > obs.log_rho + slack)
            throw std::logic_error("a_d path lower bound violated");
          rec.rows.push_back(obs);
          ++cp;
        }
      }
      final_norm_rate[t] = partials.back() / static_cast<double>(cfg.n_max);
      spectra[t] = estimate_spectrum(qr);
      if (t == 0) trial0_partials = std::move(partials);
    } catch (const std::exception& e) {
      rec.error = e.what();
      rec.rows.clear();
    }
  });

  // Pool lambda1 over successful trials.
  detail::RunningStat lam;
  std::vector<LyapunovEstimate> ok_spectra;
  for (long t = 0; t < cfg.trials; ++t) {
    if (!rep.trajectories[t].error.empty()) {
      ++rep.summary.failed_trials;
      continue;
    }
    lam.add(final_norm_rate[t]);
    ok_spectra.push_back(spectra[t]);
  }
  if (lam.n == 0) throw std::runtime_error("run_lln: every trial failed");
  rep.summary.scenario = cfg.name;
  rep.summary.master_seed = cfg.master_seed;
  rep.summary.trials = cfg.trials;
  rep.summary.n_max = cfg.n_max;
  rep.summary.lambda1_hat = lam.mean();
  rep.summary.lambda1_se =
      lam.n > 1 ? lam.stdev() / std::sqrt(static_cast<double>(lam.n))
                : detail::batch_means_stderr(trial0_partials);
  rep.summary.qr = pool_spectra(ok_spectra);

  rep.per_n.resize(cps.size());
  for (std::size_t c = 0; c < cps.size(); ++c) {
    auto& stats = rep.per_n[c];
    stats.n = cps[c];
    double dev = 0.0;
    long cnt = 0;
    for (const auto& rec : rep.trajectories) {
      if (!rec.error.empty()) continue;
      const auto& obs = rec.rows[c];
      const double inv_n = 1.0 / static_cast<double>(obs.n);
      stats.norm_rate.add(obs.log_norm * inv_n);
      stats.rho_rate.add(obs.log_rho * inv_n);
      stats.abs_gap.add(std::abs(obs.log_rho - obs.log_norm) * inv_n);
      dev += std::abs(obs.log_rho * inv_n - rep.summary.lambda1_hat);
      ++cnt;
    }
    stats.mean_abs_dev_from_lambda1 = cnt > 0 ? dev / cnt : 0.0;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Eigenvalue-moduli vector law of large numbers
// ---------------------------------------------------------------------------

struct EigvecCheckpointStats {
  long n{0};
  std::vector<detail::RunningStat> rho_rate;  // per component, (1/n) log rho_k
};

struct EigvecReport {
  ScenarioSummary summary;
  std::vector<EigvecCheckpointStats> per_n;
  /// max over trials of |per-trial component sum rate - mean log|det X||.
  double max_abs_sum_vs_logdet{0.0};
  /// max over components/checkpoints with n >= qr_compare_min_n of
  /// |(1/n) qr_sum_k - (1/n) log a_k| (QR vs exterior-telescope SVD route).
  double max_abs_qr_vs_svd{0.0};
  long qr_compare_min_n{1000};

  const EigvecCheckpointStats& at(long n) const {
    for (const auto& s : per_n)
      if (s.n == n) return s;
    throw std::out_of_range("EigvecReport: no checkpoint");
  }
};

/// Componentwise law of large numbers for the eigenvalue-moduli vector:
/// (1/n) log rho_k(L_n) for k = 1..d. Middle moduli come from the exterior
/// power telescope rho_1...rho_k = rho(Lambda^k L_n) (exact cycle sums when
/// the support is monomial), which stays measurable at horizons where the
/// moduli themselves are far outside double range.
inline EigvecReport run_eigen_vector_lln(const ScenarioConfig& cfg,
                                         int workers = 1) {
  cfg.validate();
  const auto cps = cfg.checkpoints();
  const int d = cfg.dim;
  const bool exact = cfg.law.monomial_support();
  const auto monomials =
      exact ? cfg.law.monomial_views() : std::vector<MonomialMatrix>{};
  const detail::SupportConstants consts(cfg.law);

  EigvecReport rep;
  struct TrialOut {
    std::string error;
    std::vector<RVector> rho_rates;  // per checkpoint
    double sum_vs_logdet{0.0};
    double qr_vs_svd{0.0};
    LyapunovEstimate spectrum;
    double final_norm_rate{0.0};
  };
  std::vector<TrialOut> outs(cfg.trials);

  detail::run_trials(cfg.trials, workers, [&](long t) {
    TrialOut& out = outs[t];
    try {
      Rng rng(cfg.master_seed, static_cast<std::uint64_t>(t));
      StepSampler sampler(cfg.law);
      detail::ExteriorWalk ext(cfg.law, d, cfg.walk_side);
      MonomialProduct exact_walk(d);
      QrState qr(d);
      double sum_log_det = 0.0;
      std::size_t cp = 0;
      for (long i = 1; i <= cfg.n_max; ++i) {
        const auto [x, idx] = sampler.step(rng);
        ext.step(idx);
        if (exact) {
          if (cfg.walk_side == WalkSide::left)
            exact_walk.extend_left(monomials[idx]);
          else
            exact_walk.extend_right(monomials[idx]);
        }
        qr.step(cfg.walk_side == WalkSide::left ? *x : CMatrix(x->adjoint()));
        sum_log_det += consts.log_abs_det[idx];
        if (cp < cps.size() && cps[cp] == i) {
          const double inv_n = 1.0 / static_cast<double>(i);
          RVector rates(d);
          if (exact) {
            const auto lm = exact_walk.log_eigen_moduli();
            for (int k = 0; k < d; ++k) rates[k] = lm[k] * inv_n;
          } else {
            for (int k = 1; k <= d; ++k)
              rates[k - 1] = ext.log_rho_component(k) * inv_n;
          }
          out.rho_rates.push_back(rates);
          out.sum_vs_logdet =
              std::max(out.sum_vs_logdet,
                       std::abs(rates.sum() - sum_log_det * inv_n));
          if (i >= rep.qr_compare_min_n) {
            // Singular values of a monomial product are its entry moduli.
            std::vector<double> log_a(d);
            if (exact) {
              log_a = exact_walk.log_mod();
              std::sort(log_a.begin(), log_a.end(), std::greater<double>());
            } else {
              for (int k = 1; k <= d; ++k)
                log_a[k - 1] = ext.log_singular_value(k);
            }
            // QR columns track the exponents as a set: on flag-degenerate
            // dynamics (monomial products) the column order is permuted, so
            // compare sorted against sorted, as estimate_spectrum does.
            std::vector<double> qr_sums(qr.log_r_sums().data(),
                                        qr.log_r_sums().data() + d);
            std::sort(qr_sums.begin(), qr_sums.end(), std::greater<double>());
            for (int k = 0; k < d; ++k)
              out.qr_vs_svd = std::max(
                  out.qr_vs_svd, std::abs(qr_sums[k] - log_a[k]) * inv_n);
          }
          ++cp;
        }
      }
      out.spectrum = estimate_spectrum(qr);
      out.final_norm_rate =
          (exact ? exact_walk.log_norm() : ext.log_norm(1)) /
          static_cast<double>(cfg.n_max);
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  });

  rep.per_n.resize(cps.size());
  for (std::size_t c = 0; c < cps.size(); ++c) {
    rep.per_n[c].n = cps[c];
    rep.per_n[c].rho_rate.resize(d);
  }
  detail::RunningStat lam;
  std::vector<LyapunovEstimate> ok_spectra;
  for (const auto& out : outs) {
    if (!out.error.empty()) {
      ++rep.summary.failed_trials;
      continue;
    }
    for (std::size_t c = 0; c < cps.size(); ++c)
      for (int k = 0; k < d; ++k)
        rep.per_n[c].rho_rate[k].add(out.rho_rates[c][k]);
    rep.max_abs_sum_vs_logdet =
        std::max(rep.max_abs_sum_vs_logdet, out.sum_vs_logdet);
    rep.max_abs_qr_vs_svd = std::max(rep.max_abs_qr_vs_svd, out.qr_vs_svd);
    lam.add(out.final_norm_rate);
    ok_spectra.push_back(out.spectrum);
  }
  if (lam.n == 0)
    throw std::runtime_error("run_eigen_vector_lln: every trial failed");
  rep.summary.scenario = cfg.name;
  rep.summary.master_seed = cfg.master_seed;
  rep.summary.trials = cfg.trials;
  rep.summary.n_max = cfg.n_max;
  rep.summary.lambda1_hat = lam.mean();
  rep.summary.lambda1_se =
      lam.n > 1 ? lam.stdev() / std::sqrt(static_cast<double>(lam.n)) : 0.0;
  rep.summary.qr = pool_spectra(ok_spectra);
  return rep;
}

}  // namespace lyaplab

#include "lyaplab/experiments_geometry.hpp"
#include "lyaplab/experiments_counterexample.hpp"
