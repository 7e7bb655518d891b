#pragma once

#include <set>

#include "lyaplab/config_io.hpp"
#include "lyaplab/experiments.hpp"
#include "lyaplab/result_table.hpp"

namespace lyaplab {

namespace detail {

inline Json summary_common(const ScenarioSummary& s) {
  Json j;
  j["scenario"] = s.scenario;
  j["master_seed"] = s.master_seed;
  j["trials"] = s.trials;
  j["n_max"] = s.n_max;
  j["failed_trials"] = s.failed_trials;
  j["lambda1_hat"] = s.lambda1_hat;
  j["lambda1_se"] = s.lambda1_se;
  Json lam = Json::array(), se = Json::array();
  for (Eigen::Index k = 0; k < s.qr.lambda.size(); ++k) {
    lam.push_back(s.qr.lambda[k]);
    se.push_back(s.qr.std_error[k]);
  }
  j["lambda_hat"] = std::move(lam);
  j["lambda_stderr"] = std::move(se);
  j["gap_index"] = s.qr.gap_index;
  return j;
}

inline void tail_cells_to_rows(const TailReport& tails, ResultTable& t) {
  std::set<std::string> event_names;
  std::set<std::pair<double, long>> keys;
  for (const auto& c : tails.cells) {
    event_names.insert(c.event);
    keys.insert({c.epsilon, c.n});
  }
  t.columns = {"epsilon", "n"};
  for (const auto& e : event_names)
    for (const char* suffix : {"_freq", "_hits", "_trials", "_wilson_lo", "_wilson_hi"})
      t.columns.push_back(e + suffix);
  for (const auto& [eps, n] : keys) {
    std::vector<std::optional<double>> row;
    row.emplace_back(eps);
    row.emplace_back(static_cast<double>(n));
    for (const auto& e : event_names) {
      const TailCell* cell = nullptr;
      for (const auto& c : tails.cells)
        if (c.event == e && c.n == n && c.epsilon == eps) cell = &c;
      if (cell) {
        const auto w = cell->wilson();
        row.emplace_back(cell->freq());
        row.emplace_back(static_cast<double>(cell->hits));
        row.emplace_back(static_cast<double>(cell->trials));
        row.emplace_back(w.lo);
        row.emplace_back(w.hi);
      } else {
        for (int i = 0; i < 5; ++i) row.emplace_back(std::nullopt);
      }
    }
    t.add_row(std::move(row));
  }
}

}  // namespace detail

inline ResultTable to_table(const LlnReport& rep, const ScenarioConfig& cfg) {
  ResultTable t;
  t.scenario_name = rep.summary.scenario;
  t.scenario_echo = scenario_to_json(cfg);
  t.columns = {"n",
               "norm_rate_mean",
               "norm_rate_std",
               "norm_rate_min",
               "norm_rate_max",
               "rho_rate_mean",
               "rho_rate_std",
               "rho_rate_min",
               "rho_rate_max",
               "abs_gap_mean",
               "abs_gap_max",
               "abs_dev_from_lambda1_mean"};
  for (const auto& s : rep.per_n) {
    t.add_row({static_cast<double>(s.n), s.norm_rate.mean(), s.norm_rate.stdev(),
               s.norm_rate.mn, s.norm_rate.mx, s.rho_rate.mean(),
               s.rho_rate.stdev(), s.rho_rate.mn, s.rho_rate.mx,
               s.abs_gap.mean(), s.abs_gap.mx, s.mean_abs_dev_from_lambda1});
  }
  t.summary = detail::summary_common(rep.summary);
  t.summary["checks"] = {{"no_failed_trials", rep.summary.failed_trials == 0}};
  return t;
}

inline ResultTable to_table(const EigvecReport& rep, const ScenarioConfig& cfg) {
  ResultTable t;
  t.scenario_name = rep.summary.scenario;
  t.scenario_echo = scenario_to_json(cfg);
  t.columns = {"n"};
  const int d = rep.per_n.empty() ? 0
                                  : static_cast<int>(rep.per_n.front().rho_rate.size());
  for (int k = 1; k <= d; ++k) {
    const std::string base = "rho" + std::to_string(k) + "_rate";
    t.columns.push_back(base + "_mean");
    t.columns.push_back(base + "_std");
    t.columns.push_back(base + "_min");
    t.columns.push_back(base + "_max");
  }
  for (const auto& s : rep.per_n) {
    std::vector<std::optional<double>> row{static_cast<double>(s.n)};
    for (int k = 0; k < d; ++k) {
      row.emplace_back(s.rho_rate[k].mean());
      row.emplace_back(s.rho_rate[k].stdev());
      row.emplace_back(s.rho_rate[k].mn);
      row.emplace_back(s.rho_rate[k].mx);
    }
    t.add_row(std::move(row));
  }
  t.summary = detail::summary_common(rep.summary);
  t.summary["max_abs_sum_vs_logdet"] = rep.max_abs_sum_vs_logdet;
  t.summary["max_abs_qr_vs_svd"] = rep.max_abs_qr_vs_svd;
  t.summary["qr_compare_min_n"] = rep.qr_compare_min_n;
  t.summary["checks"] = {
      {"no_failed_trials", rep.summary.failed_trials == 0},
      {"component_sum_matches_logdet", rep.max_abs_sum_vs_logdet <= 1e-9},
      {"qr_matches_svd_within_0.01", rep.max_abs_qr_vs_svd <= 0.01}};
  t.summary["thresholds"] = {{"component_sum_matches_logdet", 1e-9},
                             {"qr_matches_svd_within_0.01", 0.01}};
  return t;
}

inline ResultTable to_table(const GeometryReport& rep, const ScenarioConfig& cfg) {
  ResultTable t;
  t.scenario_name = rep.summary.scenario;
  t.scenario_echo = scenario_to_json(cfg);
  detail::tail_cells_to_rows(rep.tails, t);
  t.summary = detail::summary_common(rep.summary);
  t.summary["gap_warning"] = rep.tails.gap_warning;
  if (rep.tails.gap_warning) t.summary["gap_note"] = rep.tails.gap_note;
  t.summary["degenerate_skipped"] = rep.degenerate_skipped;
  t.summary["geometry_checkpoints"] = rep.geometry_checkpoints;
  t.summary["checks"] = {{"no_failed_trials", rep.summary.failed_trials == 0}};
  return t;
}

inline ResultTable to_table(const GrowthReport& rep, const ScenarioConfig& cfg) {
  ResultTable t;
  t.scenario_name = rep.summary.scenario;
  t.scenario_echo = scenario_to_json(cfg);
  detail::tail_cells_to_rows(rep.tails, t);
  t.summary = detail::summary_common(rep.summary);
  t.summary["log_delta_v_lmu"] = rep.log_delta_v_lmu;
  t.summary["checks"] = {{"no_failed_trials", rep.summary.failed_trials == 0}};
  return t;
}

inline ResultTable to_table(const CounterexampleReport& rep,
                            const ScenarioConfig& cfg) {
  ResultTable t;
  t.scenario_name = "paper-counterexample";
  t.scenario_echo = scenario_to_json(cfg);
  t.columns = {"n_max",
               "windowed_min",
               "windowed_max",
               "lambda1_hat",
               "lambda1_se",
               "rho_one_fraction",
               "norm_rate_fluctuation",
               "coset_H",
               "coset_sigmaH",
               "coset_omegaH",
               "returns_observed",
               "max_exactness_violation"};
  t.add_row({static_cast<double>(rep.n_max), rep.windowed_min, rep.windowed_max,
             rep.lambda1_hat, rep.lambda1_se, rep.rho_one_fraction,
             rep.norm_rate_fluctuation, rep.coset_occupancy[0],
             rep.coset_occupancy[1], rep.coset_occupancy[2],
             static_cast<double>(rep.returns_observed),
             rep.max_exactness_violation});
  t.summary["master_seed"] = rep.master_seed;
  t.summary["n_max"] = rep.n_max;
  t.summary["initial_state"] = rep.initial_state;
  t.summary["windowed_min"] = rep.windowed_min;
  t.summary["windowed_max"] = rep.windowed_max;
  t.summary["rho_one_fraction"] = rep.rho_one_fraction;
  t.summary["lambda1_hat"] = rep.lambda1_hat;
  t.summary["lambda1_se"] = rep.lambda1_se;
  t.summary["norm_rate_fluctuation"] = rep.norm_rate_fluctuation;
  Json lam = Json::array();
  for (Eigen::Index k = 0; k < rep.qr.lambda.size(); ++k)
    lam.push_back(rep.qr.lambda[k]);
  t.summary["lambda_hat"] = std::move(lam);
  t.summary["gap_index"] = rep.qr.gap_index;
  t.summary["checks"] = {
      {"return_gaps_in_1_3", rep.return_gaps_in_1_3},
      {"tau_bound", rep.tau_bound_ok},
      {"permutation_coset_rho_exactness", rep.max_exactness_violation <= 1e-9}};
  return t;
}

inline ResultTable to_table(const FuzzReport& rep) {
  ResultTable t;
  t.scenario_name = "lemma-fuzz";
  t.columns = {"samples_run", "corpus_run", "violations"};
  t.add_row({static_cast<double>(rep.samples_run),
             static_cast<double>(rep.corpus_run),
             static_cast<double>(rep.violations.size())});
  Json viols = Json::array();
  for (const auto& v : rep.violations) {
    Json jv;
    jv["check"] = v.check;
    jv["dim"] = v.dim;
    jv["input"] = detail::matrix_to_json(v.input);
    if (v.aux.size() > 0) jv["aux_vector"] = detail::vector_to_json(v.aux);
    jv["lhs"] = v.lhs;
    jv["rhs"] = v.rhs;
    viols.push_back(std::move(jv));
  }
  t.summary["violations"] = std::move(viols);
  t.summary["checks"] = {{"zero_violations", rep.clean()}};
  return t;
}

/// True iff every boolean under summary["checks"] is true.
inline bool all_checks_passed(const ResultTable& t) {
  if (!t.summary.contains("checks")) return true;
  for (const auto& [key, val] : t.summary["checks"].items()) {
    (void)key;
    if (val.is_boolean() && !val.get<bool>()) return false;
  }
  return true;
}

}  // namespace lyaplab
