#pragma once

// Tail-frequency experiments: exponential-closeness events for the attracting
// point / repelling hyperplane geometry, right-walk stabilization, and the
// vector/norm growth sandwich. Included via experiments.hpp.

#include <map>

namespace lyaplab {

namespace detail {

/// Keyed tally of bad events, merged deterministically across trials.
class TailAccumulator {
 public:
  void add(const std::string& event, double eps, long n, bool hit) {
    auto& cell = cells_[{event, eps, n}];
    cell.first += hit ? 1 : 0;
    cell.second += 1;
  }

  void merge(const TailAccumulator& other) {
    for (const auto& [key, val] : other.cells_) {
      auto& cell = cells_[key];
      cell.first += val.first;
      cell.second += val.second;
    }
  }

  std::vector<TailCell> cells() const {
    std::vector<TailCell> out;
    for (const auto& [key, val] : cells_) {
      TailCell c;
      c.event = std::get<0>(key);
      c.epsilon = std::get<1>(key);
      c.n = std::get<2>(key);
      c.hits = val.first;
      c.trials = val.second;
      out.push_back(c);
    }
    return out;
  }

 private:
  std::map<std::tuple<std::string, double, long>, std::pair<long, long>> cells_;
};

/// First-order log-space distance between the top singular direction of
/// R_{2n} = R_n * M and that of R_n. With R_n = U S V^* and G = (V^* M)(V^* M)^*,
///   delta ~ sqrt( sum_{i>=2} [ (s_i/s_1) |G_{i1}| / G_11 ]^2 ),
/// which is computable from log singular-value gaps and O(1) matrices at
/// horizons where delta itself is far below double resolution.
inline double log_stabilization_delta(const std::vector<double>& log_s,
                                      const CMatrix& v_star,
                                      const CMatrix& segment_mat) {
  const auto d = static_cast<int>(log_s.size());
  const CMatrix w = v_star * segment_mat;
  const CMatrix g = w * w.adjoint();
  const double g11 = std::real(g(0, 0));
  if (!(g11 > 0.0)) return 0.0;  // fully rotated: no decay certificate
  std::vector<double> terms;
  terms.reserve(d - 1);
  for (int i = 1; i < d; ++i) {
    const double gi1 = std::abs(g(i, 0));
    if (gi1 == 0.0) continue;
    terms.push_back(2.0 * (log_s[i] - log_s[0] + std::log(gi1) - std::log(g11)));
  }
  if (terms.empty()) return -std::numeric_limits<double>::infinity();
  return 0.5 * logsumexp(terms);
}

}  // namespace detail

struct GeometryReport {
  ScenarioSummary summary;
  TailReport tails;
  long degenerate_skipped{0};   // checkpoints skipped: a1 ~ a2
  long geometry_checkpoints{0};
  /// Per stabilization pair (n, 2n): log delta from the perturbation formula
  /// and the direct Fubini-Study value (saturates near fp resolution).
  struct StabilizationSample {
    long trial{0};
    long n{0};
    double log_delta_formula{0.0};
    double delta_direct{0.0};
  };
  std::vector<StabilizationSample> stabilization_samples;
};

/// Tail frequencies of the exponential-closeness events:
///   - "plus_hyper_le":      delta(x+_{L_n}, H<_{L_n})        <= e^{-eps n}
///   - "contraction_ge":     delta(x+_{L_n}, L_n . x)         >= e^{-eps n}
///   - "dist_lmu_le":        delta(x+_{L_n}, [L_mu])          <= e^{-eps n}
///   - "hyperplane_le":      delta(x+_{L_n}, (C u0)^perp)     <= e^{-eps n}
///   - "stabilization_ge":   delta(x+_{R_2n}, x+_{R_n})       >= e^{-eps n}
/// The contraction and stabilization events live far below double resolution
/// at the horizons of interest, so they are decided in log space: the former
/// via the deterministic contraction bound, the latter via the perturbation
/// formula above (cross-checked against the direct route at small n).
inline GeometryReport run_geometry_decay(const ScenarioConfig& cfg,
                                         int workers = 1) {
  cfg.validate();
  const int d = cfg.dim;
  const auto cps = cfg.checkpoints();
  std::vector<long> stab_ns;
  for (long n : cps)
    if (2 * n <= cfg.n_max) stab_ns.push_back(n);

  const CVector probe = cfg.probe_vector ? *cfg.probe_vector : detail::default_probe(d);
  if (cfg.l_mu && dist_to_subspace(probe, *cfg.l_mu) <= 1e-9)
    throw std::domain_error(
        "geometry probe vector lies in L_mu; the contraction event needs a "
        "transverse direction");
  const ProjectivePoint probe_point(probe);
  const ProjectiveHyperplane test_hyperplane{ProjectivePoint(detail::unit_ones(d))};
  if (cfg.l_mu_check) {
    // Hyperplane-return events require the normal to avoid L_mu-check.
    if (dist_to_subspace(test_hyperplane.normal.rep(), *cfg.l_mu_check) <= 1e-6)
      throw std::domain_error(
          "test hyperplane normal lies in L_mu of the adjoint law");
  }

  GeometryReport rep;
  std::vector<detail::TailAccumulator> tallies(cfg.trials);
  std::vector<std::vector<GeometryReport::StabilizationSample>> stabs(cfg.trials);
  std::vector<LyapunovEstimate> spectra(cfg.trials);
  std::vector<double> final_norm_rate(cfg.trials, 0.0);
  std::vector<long> skipped(cfg.trials, 0), geo_cps(cfg.trials, 0);
  std::vector<std::string> errors(cfg.trials);

  detail::run_trials(cfg.trials, workers, [&](long t) {
    try {
      Rng rng(cfg.master_seed, static_cast<std::uint64_t>(t));
      StepSampler sampler(cfg.law);
      ScaledMatrix left = ScaledMatrix::identity(d);
      detail::ExteriorWalk ext_left(cfg.law, 2, WalkSide::left);
      detail::ExteriorWalk ext_right(cfg.law, d, WalkSide::right);
      ScaledMatrix right = ScaledMatrix::identity(d);
      ScaledVector lv(probe / probe.norm());
      QrState qr(d);

      struct Snapshot {
        CMatrix v_star;
        ProjectivePoint x_plus;
        std::vector<double> log_s;
      };
      std::map<long, Snapshot> snapshots;  // keyed by n, pending pair (n, 2n)
      std::map<long, ScaledMatrix> segments;

      std::size_t cp = 0, stab = 0;
      for (long i = 1; i <= cfg.n_max; ++i) {
        const auto [x, idx] = sampler.step(rng);
        left.extend_left(*x);
        right.extend_right(*x);
        ext_left.step(idx);
        ext_right.step(idx);
        lv.apply(*x);
        qr.step(*x);
        for (auto& [m, seg] : segments) seg.extend_right(*x);

        if (stab < stab_ns.size() && stab_ns[stab] == i) {
          const SvdTriple tr = svd_lenient(right.mat());
          if (!tr.degenerate_gap) {  // x+ ill-defined otherwise
            Snapshot snap{tr.l, attracting_point(tr), {}};
            snap.log_s.resize(d);
            for (int k = 1; k <= d; ++k)
              snap.log_s[k - 1] = ext_right.log_singular_value(k);
            snapshots.emplace(i, std::move(snap));
            segments.emplace(i, ScaledMatrix::identity(d));
          } else {
            ++skipped[t];
          }
          ++stab;
        }
        if (auto it = snapshots.find(i / 2);
            i % 2 == 0 && it != snapshots.end()) {
          const Snapshot& snap = it->second;
          const ScaledMatrix& seg = segments.at(i / 2);
          const double log_delta = detail::log_stabilization_delta(
              snap.log_s, snap.v_star, seg.mat());
          const SvdTriple tr2 = svd_lenient(right.mat());
          const double direct = fubini_study(attracting_point(tr2), snap.x_plus);
          stabs[t].push_back({t, i / 2, log_delta, direct});
          for (double eps : cfg.epsilons)
            tallies[t].add("stabilization_ge", eps, i / 2,
                           log_delta >= -eps * static_cast<double>(i / 2));
          snapshots.erase(it);
          segments.erase(i / 2);
        }

        if (cp < cps.size() && cps[cp] == i) {
          const SvdTriple tr = svd_lenient(left.mat());
          if (tr.degenerate_gap) {
            ++skipped[t];
          } else {
            ++geo_cps[t];
            const auto x_plus = attracting_point(tr);
            const double dh = delta_plus_hyper(tr);
            const double d_act =
                fubini_study(x_plus, act(left.mat(), probe_point));
            // log upper bound: (a2/a1) ||L_n|| ||v|| / ||L_n v||.
            const double log_bound = ext_left.log_singular_value(2) -
                                     ext_left.log_singular_value(1) +
                                     left.log_norm() - lv.log_scale();
            const double log_contraction =
                std::min(d_act > 0.0 ? std::log(d_act)
                                     : -std::numeric_limits<double>::infinity(),
                         log_bound);
            const double d_lmu =
                cfg.l_mu ? dist_to_subspace(x_plus.rep(), *cfg.l_mu) : 1.0;
            const double d_hyp = dist_point_hyperplane(x_plus, test_hyperplane);
            for (double eps : cfg.epsilons) {
              const double thr = -eps * static_cast<double>(i);
              tallies[t].add("plus_hyper_le", eps, i,
                             dh > 0.0 ? std::log(dh) <= thr : true);
              tallies[t].add("contraction_ge", eps, i, log_contraction >= thr);
              if (cfg.l_mu)
                tallies[t].add("dist_lmu_le", eps, i,
                               d_lmu > 0.0 ? std::log(d_lmu) <= thr : true);
              tallies[t].add("hyperplane_le", eps, i,
                             d_hyp > 0.0 ? std::log(d_hyp) <= thr : true);
            }
          }
          ++cp;
        }
      }
      spectra[t] = estimate_spectrum(qr);
      final_norm_rate[t] = left.log_norm() / static_cast<double>(cfg.n_max);
    } catch (const std::exception& e) {
      errors[t] = e.what();
    }
  });

  detail::TailAccumulator total;
  detail::RunningStat lam;
  std::vector<LyapunovEstimate> ok_spectra;
  for (long t = 0; t < cfg.trials; ++t) {
    if (!errors[t].empty()) {
      ++rep.summary.failed_trials;
      continue;
    }
    total.merge(tallies[t]);
    rep.degenerate_skipped += skipped[t];
    rep.geometry_checkpoints += geo_cps[t];
    for (const auto& s : stabs[t]) rep.stabilization_samples.push_back(s);
    lam.add(final_norm_rate[t]);
    ok_spectra.push_back(spectra[t]);
  }
  if (lam.n == 0)
    throw std::runtime_error("run_geometry_decay: every trial failed");
  rep.tails.cells = total.cells();
  rep.summary.scenario = cfg.name;
  rep.summary.master_seed = cfg.master_seed;
  rep.summary.trials = cfg.trials;
  rep.summary.n_max = cfg.n_max;
  rep.summary.lambda1_hat = lam.mean();
  rep.summary.lambda1_se =
      lam.n > 1 ? lam.stdev() / std::sqrt(static_cast<double>(lam.n)) : 0.0;
  rep.summary.qr = pool_spectra(ok_spectra);
  if (rep.summary.qr.gap_index != 1) {
    rep.tails.gap_warning = true;
    rep.tails.gap_note =
        "no empirical first Lyapunov gap (s = " +
        std::to_string(rep.summary.qr.gap_index) +
        "); decay propositions assume lambda1 > lambda2, no claim is made";
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Growth bounds for ||L_n v|| and ||L_n||
// ---------------------------------------------------------------------------

struct GrowthReport {
  ScenarioSummary summary;
  TailReport tails;  // complement ("violation") frequencies
  double log_delta_v_lmu{0.0};
};

/// Complement frequencies of the two-sided growth sandwich
///   delta([v],[L_mu]) e^{n(l1-eps)} <= ||L_n v||/||v|| <= e^{n(l1+eps)}
/// and its norm analogue, plus (when a probe sequence v_n -> v is configured)
/// of |(1/n) log ||L_n v_n||/||v_n|| - l1| <= eps. lambda1 is estimated from
/// the run itself before events are evaluated.
inline GrowthReport run_growth_bounds(const ScenarioConfig& cfg,
                                      int workers = 1) {
  cfg.validate();
  const int d = cfg.dim;
  const auto cps = cfg.checkpoints();
  if (!cfg.probe_vector && !cfg.probe_sequence)
    throw std::domain_error(
        "run_growth_bounds: needs probe_vector or probe_sequence");
  const CVector probe =
      cfg.probe_vector ? *cfg.probe_vector : cfg.probe_sequence->limit;
  double delta_v = 1.0;
  if (cfg.l_mu) {
    delta_v = dist_to_subspace(probe, *cfg.l_mu);
    if (delta_v <= 1e-9)
      throw std::domain_error(
          "probe vector lies in L_mu: delta([v],[L_mu]) = 0 degenerates the "
          "lower growth bound; choose a transverse probe");
  }

  struct TrialOut {
    std::string error;
    std::vector<double> log_norm;     // per checkpoint
    std::vector<double> log_growth;   // log ||L_n v|| / ||v||
    std::vector<double> seq_rate;     // (1/n) log ||L_n v_n|| / ||v_n||
    double final_norm_rate{0.0};
    LyapunovEstimate spectrum;
  };
  std::vector<TrialOut> outs(cfg.trials);

  detail::run_trials(cfg.trials, workers, [&](long t) {
    TrialOut& out = outs[t];
    try {
      Rng rng(cfg.master_seed, static_cast<std::uint64_t>(t));
      StepSampler sampler(cfg.law);
      ScaledMatrix walk = ScaledMatrix::identity(d);
      ScaledVector lv(probe / probe.norm());
      QrState qr(d);
      std::size_t cp = 0;
      for (long i = 1; i <= cfg.n_max; ++i) {
        const auto [x, idx] = sampler.step(rng);
        if (cfg.walk_side == WalkSide::left) {
          walk.extend_left(*x);
          qr.step(*x);
        } else {
          walk.extend_right(*x);
          qr.step(CMatrix(x->adjoint()));
        }
        lv.apply(*x);
        if (cp < cps.size() && cps[cp] == i) {
          out.log_norm.push_back(walk.log_norm());
          out.log_growth.push_back(lv.log_scale());
          if (cfg.probe_sequence) {
            const CVector vn = cfg.probe_sequence->at(i);
            const double nvn = vn.norm();
            if (!(nvn > 0.0))
              throw std::domain_error("probe sequence hit the zero vector");
            out.seq_rate.push_back(
                (walk.log_scale() + std::log((walk.mat() * (vn / nvn)).norm())) /
                static_cast<double>(i));
          }
          ++cp;
        }
      }
      out.final_norm_rate = walk.log_norm() / static_cast<double>(cfg.n_max);
      out.spectrum = estimate_spectrum(qr);
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  });

  GrowthReport rep;
  rep.log_delta_v_lmu = std::log(delta_v);
  detail::RunningStat lam;
  std::vector<LyapunovEstimate> ok_spectra;
  for (const auto& out : outs) {
    if (out.error.empty()) {
      lam.add(out.final_norm_rate);
      ok_spectra.push_back(out.spectrum);
    } else {
      ++rep.summary.failed_trials;
    }
  }
  if (lam.n == 0)
    throw std::runtime_error("run_growth_bounds: every trial failed");
  const double l1 = lam.mean();

  detail::TailAccumulator tally;
  for (const auto& out : outs) {
    if (!out.error.empty()) continue;
    for (std::size_t c = 0; c < cps.size(); ++c) {
      const auto n = static_cast<double>(cps[c]);
      for (double eps : cfg.epsilons) {
        const bool vec_ok =
            rep.log_delta_v_lmu + n * (l1 - eps) <= out.log_growth[c] &&
            out.log_growth[c] <= n * (l1 + eps);
        tally.add("growth_vector_violation", eps, cps[c], !vec_ok);
        const bool norm_ok = n * (l1 - eps) <= out.log_norm[c] &&
                             out.log_norm[c] <= n * (l1 + eps);
        tally.add("growth_norm_violation", eps, cps[c], !norm_ok);
        if (cfg.probe_sequence)
          tally.add("probe_sequence_violation", eps, cps[c],
                    std::abs(out.seq_rate[c] - l1) > eps);
      }
    }
  }
  rep.tails.cells = tally.cells();
  rep.summary.scenario = cfg.name;
  rep.summary.master_seed = cfg.master_seed;
  rep.summary.trials = cfg.trials;
  rep.summary.n_max = cfg.n_max;
  rep.summary.lambda1_hat = l1;
  rep.summary.lambda1_se =
      lam.n > 1 ? lam.stdev() / std::sqrt(static_cast<double>(lam.n)) : 0.0;
  rep.summary.qr = pool_spectra(ok_spectra);
  return rep;
}

}  // namespace lyaplab
