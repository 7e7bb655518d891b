// Acceptance suite: desk-scale empirical targets with pinned tolerances,
// one printed PASS/FAIL line per criterion.

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

#include "lyaplab/lyaplab.hpp"

using namespace lyaplab;

namespace {

int hw_workers() {
  return std::max(2u, std::thread::hardware_concurrency());
}

bool report(int criterion, const char* what, bool ok, const std::string& detail) {
  std::printf("[acceptance] criterion %d (%s): %s — %s\n", criterion, what,
              ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  return ok;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

TEST_CASE("criterion 1: deterministic inequality suite") {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = run_lemma_fuzz(100000, {2, 3, 5}, 20240601, true, hw_workers());
  const double secs = elapsed_s(t0);
  const bool clean = rep.clean();
  CHECK(report(1, "zero violations over 3x1e5 fuzz + counterexample corpus", clean,
               "samples=" + std::to_string(rep.samples_run) +
                   " corpus=" + std::to_string(rep.corpus_run) +
                   " violations=" + std::to_string(rep.violations.size()) +
                   " runtime=" + fmt(secs) + "s"));
  CHECK(report(1, "runtime within 2 min", secs <= 120.0, fmt(secs) + "s"));
  for (const auto& v : rep.violations) {
    std::printf("  violation %s (d=%d) lhs=%.17g rhs=%.17g\n", v.check.c_str(),
                v.dim, v.lhs, v.rhs);
  }
}

TEST_CASE("criterion 2: deterministic Gelfand scenario") {
  const auto t0 = std::chrono::steady_clock::now();
  auto cfg = builtin_scenario("deterministic-gelfand");
  cfg.n_max = 10000;
  cfg.dense_checkpoints = true;  // every step is a checkpoint
  cfg.checkpoint_stride = 1;
  const auto rep = run_lln(cfg);
  double max_abs_rho_rate = 0.0;
  for (const auto& s : rep.per_n)
    max_abs_rho_rate = std::max(
        max_abs_rho_rate, std::max(std::abs(s.rho_rate.mn), std::abs(s.rho_rate.mx)));
  CHECK(report(2, "|lambda1_hat| <= 1e-3 at n=1e4",
               std::abs(rep.summary.lambda1_hat) <= 1e-3,
               "lambda1_hat=" + fmt(rep.summary.lambda1_hat)));
  CHECK(report(2, "(1/n) log rho(L_n) = 0 exactly at every checkpoint",
               max_abs_rho_rate == 0.0,
               "max |rho rate| = " + fmt(max_abs_rho_rate)));
  CHECK(report(2, "runtime within seconds", elapsed_s(t0) <= 30.0,
               fmt(elapsed_s(t0)) + "s"));
}

TEST_CASE("criterion 3: SL2 norm/radius gap and L1 proxy decay") {
  const auto t0 = std::chrono::steady_clock::now();
  auto cfg = builtin_scenario("sl2-irreducible");
  cfg.n_max = 10000;
  cfg.trials = 100;
  cfg.checkpoint_stride = 1000;  // geometric from 1000 hits 1000 and 10000
  const auto rep = run_lln(cfg, hw_workers());
  REQUIRE(rep.summary.failed_trials == 0);
  const double max_gap = rep.at(10000).abs_gap.mx;
  CHECK(report(3, "max over trials of (1/n)|log rho - log norm| <= 0.02",
               max_gap <= 0.02, "max gap = " + fmt(max_gap)));
  const double dev_1e3 = rep.at(1000).mean_abs_dev_from_lambda1;
  const double dev_1e4 = rep.at(10000).mean_abs_dev_from_lambda1;
  CHECK(report(3, "L1 proxy decreases by at least 2x from n=1e3 to n=1e4",
               dev_1e3 >= 2.0 * dev_1e4,
               "dev(1e3)=" + fmt(dev_1e3) + " dev(1e4)=" + fmt(dev_1e4) +
                   " ratio=" + fmt(dev_1e3 / dev_1e4)));
  CHECK(report(3, "runtime within 2 min", elapsed_s(t0) <= 120.0,
               fmt(elapsed_s(t0)) + "s"));
}

TEST_CASE("criterion 4: eigenvalue-vector LLN on the reducible scenario") {
  auto cfg = builtin_scenario("lower-triangular-reducible");
  cfg.n_max = 10000;
  cfg.trials = 100;
  cfg.checkpoint_stride = 1000;
  const auto rep = run_eigen_vector_lln(cfg, hw_workers());
  REQUIRE(rep.summary.failed_trials == 0);
  const auto& fin = rep.at(10000);
  const double log2 = std::log(2.0);
  const double dev1 = std::max(std::abs(fin.rho_rate[0].mn - log2),
                               std::abs(fin.rho_rate[0].mx - log2));
  const double dev2 = std::max(std::abs(fin.rho_rate[1].mn + log2),
                               std::abs(fin.rho_rate[1].mx + log2));
  CHECK(report(4, "(1/n) log rho_vec within 0.02 of (log2, -log2) at n=1e4",
               std::max(dev1, dev2) <= 0.02,
               "component deviations " + fmt(dev1) + ", " + fmt(dev2)));
  CHECK(report(4, "component sum within 1e-9 of the mean log determinant",
               rep.max_abs_sum_vs_logdet <= 1e-9,
               "max |sum - logdet| = " + fmt(rep.max_abs_sum_vs_logdet)));
}

TEST_CASE("criterion 5: geometry decay and right-walk stabilization") {
  const auto t0 = std::chrono::steady_clock::now();
  // Phase 1: estimate the Lyapunov gap to pin epsilon = (l1 - l2) / 2.
  auto est_cfg = builtin_scenario("sl2-irreducible");
  est_cfg.n_max = 2000;
  est_cfg.trials = 50;
  const auto est = run_lln(est_cfg, hw_workers());
  const double eps =
      (est.summary.qr.lambda[0] - est.summary.qr.lambda[1]) / 2.0;
  REQUIRE(eps > 0.1);

  // Phase 2: tail frequencies at n = 200 over 1e3 trials.
  auto cfg = builtin_scenario("sl2-irreducible");
  cfg.n_max = 400;  // the (200, 400) stabilization pair
  cfg.trials = 1000;
  cfg.checkpoint_stride = 200;
  cfg.dense_checkpoints = true;
  cfg.epsilons = {eps};
  const auto rep = run_geometry_decay(cfg, hw_workers());
  REQUIRE(rep.summary.failed_trials == 0);
  REQUIRE_FALSE(rep.tails.gap_warning);
  const auto& e1 = rep.tails.cell("plus_hyper_le", eps, 200);
  const auto& e3 = rep.tails.cell("stabilization_ge", eps, 200);
  CHECK(report(5, "freq of delta(x+, H<) <= e^{-eps n} at n=200 is <= 0.01",
               e1.freq() <= 0.01,
               "eps=" + fmt(eps) + " freq=" + fmt(e1.freq()) + " (" +
                   std::to_string(e1.hits) + "/" + std::to_string(e1.trials) +
                   ", wilson hi " + fmt(e1.wilson().hi) + ")"));
  CHECK(report(5, "freq of delta(x+_{R_2n}, x+_{R_n}) >= e^{-eps n} <= 0.01",
               e3.freq() <= 0.01,
               "freq=" + fmt(e3.freq()) + " (" + std::to_string(e3.hits) + "/" +
                   std::to_string(e3.trials) + ")"));
  CHECK(report(5, "runtime within 3 min", elapsed_s(t0) <= 180.0,
               fmt(elapsed_s(t0)) + "s"));
}

TEST_CASE("criterion 6: growth bounds on the reducible scenario") {
  auto cfg = builtin_scenario("lower-triangular-reducible");
  cfg.n_max = 1000;
  cfg.trials = 1000;
  cfg.epsilons = {0.1};
  cfg.checkpoint_stride = 250;
  cfg.dense_checkpoints = true;
  const auto rep = run_growth_bounds(cfg, hw_workers());
  REQUIRE(rep.summary.failed_trials == 0);
  const auto& vec = rep.tails.cell("growth_vector_violation", 0.1, 1000);
  const auto& nrm = rep.tails.cell("growth_norm_violation", 0.1, 1000);
  CHECK(report(6, "vector growth sandwich complement freq <= 0.01",
               vec.freq() <= 0.01,
               "freq=" + fmt(vec.freq()) + " lambda1_hat=" +
                   fmt(rep.summary.lambda1_hat)));
  CHECK(report(6, "norm growth sandwich complement freq <= 0.01",
               nrm.freq() <= 0.01, "freq=" + fmt(nrm.freq())));
}

TEST_CASE("criterion 7: Markov counterexample, single long trajectory") {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = run_counterexample(30000, 2024);
  const double third_log3 = std::log(3.0) / 3.0;
  const double half_log3 = std::log(3.0) / 2.0;
  CHECK(report(7, "windowed min of (1/n) log rho <= 0.01",
               rep.windowed_min <= 0.01, "min=" + fmt(rep.windowed_min)));
  CHECK(report(7, "windowed max >= (1/3) log 3",
               rep.windowed_max >= third_log3,
               "max=" + fmt(rep.windowed_max) + " bound=" + fmt(third_log3)));
  CHECK(report(7, "windowed max within 0.03 of lambda1_hat",
               std::abs(rep.windowed_max - rep.lambda1_hat) <= 0.03,
               "max=" + fmt(rep.windowed_max) +
                   " lambda1_hat=" + fmt(rep.lambda1_hat)));
  CHECK(report(7, "lambda1_hat within 0.02 of (log 3)/2",
               std::abs(rep.lambda1_hat - half_log3) <= 0.02,
               "lambda1_hat=" + fmt(rep.lambda1_hat) + " target=" +
                   fmt(half_log3)));
  // Pinned window [0.45, 0.55]. The exact coset analysis gives
  // sigma-occupancy 1/4 when X1 != omega (3/4 when X1 = omega), so the
  // faithful measurement cannot land in that window; the assertion is kept
  // as pinned and the measured value is printed alongside.
  CHECK(report(7, "fraction of steps with rho(L_n) = 1 in [0.45, 0.55]",
               rep.rho_one_fraction >= 0.45 && rep.rho_one_fraction <= 0.55,
               "fraction=" + fmt(rep.rho_one_fraction) +
                   " (initial state " + std::to_string(rep.initial_state) +
                   "; coset occupancy H/sigmaH/omegaH = " +
                   fmt(rep.coset_occupancy[0]) + "/" +
                   fmt(rep.coset_occupancy[1]) + "/" +
                   fmt(rep.coset_occupancy[2]) + ")"));
  CHECK(report(7, "every return gap in {1,3} and tau^(n) <= 3n+1",
               rep.return_gaps_in_1_3 && rep.tau_bound_ok,
               "returns=" + std::to_string(rep.returns_observed)));
  CHECK(report(7, "rho(L_n) = 1 exactly off the diagonal coset (1e-9)",
               rep.max_exactness_violation <= 1e-9,
               "max violation = " + fmt(rep.max_exactness_violation)));
  CHECK(report(7, "(1/n) log norm fluctuates < 0.02 over the window",
               rep.norm_rate_fluctuation < 0.02,
               "fluctuation=" + fmt(rep.norm_rate_fluctuation)));
  CHECK(report(7, "runtime within 1 min", elapsed_s(t0) <= 60.0,
               fmt(elapsed_s(t0)) + "s"));
}

TEST_CASE("criterion 8: cross-estimator consistency on every builtin") {
  bool all_lambda_ok = true, all_qr_svd_ok = true;
  std::string detail_lambda, detail_qr;
  for (const auto& id : builtin_scenario_ids()) {
    auto cfg = builtin_scenario(id);
    if (cfg.trials > 20) cfg.trials = 20;
    if (cfg.n_max < 2000) cfg.n_max = 5000;
    cfg.checkpoint_stride = 1000;
    const auto rep = run_eigen_vector_lln(cfg, hw_workers());
    REQUIRE(rep.summary.failed_trials == 0);
    const double diff =
        std::abs(rep.summary.qr.lambda[0] - rep.summary.lambda1_hat);
    const double budget =
        3.0 * (rep.summary.qr.std_error[0] + rep.summary.lambda1_se) + 1e-9;
    if (diff > budget) all_lambda_ok = false;
    detail_lambda += id + ": |diff|=" + fmt(diff) + " budget=" + fmt(budget) + "; ";
    if (rep.max_abs_qr_vs_svd > 0.01) all_qr_svd_ok = false;
    detail_qr += id + ": " + fmt(rep.max_abs_qr_vs_svd) + "; ";
  }
  CHECK(report(8, "QR lambda1 agrees with log-norm lambda1 within 3 se",
               all_lambda_ok, detail_lambda));
  CHECK(report(8, "QR sums match SVD log singular values within 0.01/step",
               all_qr_svd_ok, detail_qr));
}
