#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lyaplab/lyaplab.hpp"

using namespace lyaplab;
using Catch::Approx;

namespace {

ScenarioConfig single_matrix_scenario(const CMatrix& g, std::string name,
                                      long n_max, long trials = 1) {
  ScenarioConfig cfg;
  cfg.name = std::move(name);
  cfg.dim = static_cast<int>(g.rows());
  cfg.law.kind = LawKind::iid_finite;
  cfg.law.support = {g};
  cfg.law.weights = {1.0};
  cfg.n_max = n_max;
  cfg.trials = trials;
  cfg.master_seed = 9;
  return cfg;
}

}  // namespace

TEST_CASE("lln: order-two matrix has spectral radius rate exactly zero") {
  auto cfg = builtin_scenario("deterministic-gelfand");
  cfg.n_max = 2000;
  cfg.dense_checkpoints = true;  // every step
  const auto rep = run_lln(cfg);
  CHECK(rep.summary.failed_trials == 0);
  CHECK(rep.summary.lambda1_hat == 0.0);  // n_max even: L_n = I exactly
  for (const auto& s : rep.per_n) {
    CHECK(s.rho_rate.mn == 0.0);
    CHECK(s.rho_rate.mx == 0.0);
    CHECK(s.mean_abs_dev_from_lambda1 == 0.0);
  }
}

TEST_CASE("lln: unitary walk has both observables at fp zero") {
  auto cfg = builtin_scenario("unitary-null");
  cfg.n_max = 1000;
  cfg.trials = 5;
  const auto rep = run_lln(cfg);
  CHECK(rep.summary.failed_trials == 0);
  for (const auto& s : rep.per_n) {
    CHECK(std::abs(s.norm_rate.mx) <= 1e-9);
    CHECK(std::abs(s.rho_rate.mx) <= 1e-9);
    CHECK(std::abs(s.rho_rate.mn) <= 1e-9);
  }
}

TEST_CASE("lln: sl2 scenario norm/radius gap shrinks") {
  auto cfg = builtin_scenario("sl2-irreducible");
  cfg.n_max = 2000;
  cfg.trials = 20;
  cfg.checkpoint_stride = 500;
  cfg.dense_checkpoints = true;
  const auto rep = run_lln(cfg, 4);
  CHECK(rep.summary.failed_trials == 0);
  CHECK(rep.summary.lambda1_hat > 0.5);  // strongly expanding pair
  CHECK(rep.at(2000).abs_gap.mx <= 0.05);
  // L1 proxy decreases with n
  CHECK(rep.at(2000).mean_abs_dev_from_lambda1 <
        rep.at(500).mean_abs_dev_from_lambda1);
}

TEST_CASE("lln: right walk works and matches the left walk's exponent") {
  auto cfg = builtin_scenario("sl2-irreducible");
  cfg.n_max = 3000;
  cfg.trials = 10;
  auto right = cfg;
  right.walk_side = WalkSide::right;
  const auto rl = run_lln(cfg, 2);
  const auto rr = run_lln(right, 2);
  CHECK(rl.summary.lambda1_hat ==
        Approx(rr.summary.lambda1_hat)
            .margin(3 * (rl.summary.lambda1_se + rr.summary.lambda1_se) + 0.02));
}

TEST_CASE("eigvec lln: deterministic dilation is exact") {
  CMatrix g = CMatrix::Zero(2, 2);
  g(0, 0) = 2.0;
  g(1, 1) = 0.5;
  auto cfg = single_matrix_scenario(g, "diag-2-half", 500);
  const auto rep = run_eigen_vector_lln(cfg);
  CHECK(rep.summary.failed_trials == 0);
  for (const auto& s : rep.per_n) {
    CHECK(s.rho_rate[0].mean() == Approx(std::log(2.0)).margin(1e-12));
    CHECK(s.rho_rate[1].mean() == Approx(-std::log(2.0)).margin(1e-12));
  }
  CHECK(rep.max_abs_sum_vs_logdet <= 1e-9);
}

TEST_CASE("eigvec lln: sl2 component sums vanish") {
  auto cfg = builtin_scenario("sl2-irreducible");
  cfg.n_max = 1500;
  cfg.trials = 10;
  const auto rep = run_eigen_vector_lln(cfg, 2);
  CHECK(rep.summary.failed_trials == 0);
  CHECK(rep.max_abs_sum_vs_logdet <= 1e-9);
  CHECK(rep.max_abs_qr_vs_svd <= 0.01);
}

TEST_CASE("eigvec lln: lower-triangular scenario approaches (log2, -log2)") {
  auto cfg = builtin_scenario("lower-triangular-reducible");
  cfg.n_max = 3000;
  cfg.trials = 30;
  const auto rep = run_eigen_vector_lln(cfg, 4);
  CHECK(rep.summary.failed_trials == 0);
  const auto& fin = rep.at(3000);
  CHECK(fin.rho_rate[0].mean() == Approx(std::log(2.0)).margin(0.05));
  CHECK(fin.rho_rate[1].mean() == Approx(-std::log(2.0)).margin(0.05));
  CHECK(fin.rho_rate[0].mn >= fin.rho_rate[1].mx);  // ordering
  CHECK(rep.max_abs_sum_vs_logdet <= 1e-9);
}

TEST_CASE("geometry: deterministic dilation never gets close") {
  CMatrix g = CMatrix::Zero(2, 2);
  g(0, 0) = 9.0;
  g(1, 1) = 1.0 / 9.0;
  auto cfg = single_matrix_scenario(g, "diag-9", 64, 3);
  cfg.epsilons = {0.1};
  const auto rep = run_geometry_decay(cfg);
  CHECK(rep.summary.failed_trials == 0);
  CHECK_FALSE(rep.tails.gap_warning);
  for (const auto& c : rep.tails.cells)
    if (c.event == "plus_hyper_le") CHECK(c.hits == 0);
}

TEST_CASE("geometry: unitary scenario emits a gap warning, no claims") {
  auto cfg = builtin_scenario("unitary-null");
  cfg.n_max = 200;
  cfg.trials = 5;
  cfg.epsilons = {0.1};
  const auto rep = run_geometry_decay(cfg);
  CHECK(rep.tails.gap_warning);
  CHECK(rep.geometry_checkpoints == 0);  // all checkpoints degenerate
  CHECK(rep.degenerate_skipped > 0);
}

TEST_CASE("geometry: sl2 events are rare at the final horizon") {
  auto cfg = builtin_scenario("sl2-irreducible");
  cfg.n_max = 120;
  cfg.trials = 60;
  cfg.epsilons = {0.3};
  const auto rep = run_geometry_decay(cfg, 4);
  CHECK(rep.summary.failed_trials == 0);
  CHECK_FALSE(rep.tails.gap_warning);
  const auto& e1 = rep.tails.cell("plus_hyper_le", 0.3, 120);
  CHECK(e1.trials == 60);
  CHECK(e1.freq() <= 0.1);
  const auto& e2 = rep.tails.cell("contraction_ge", 0.3, 120);
  CHECK(e2.freq() <= 0.1);
  const auto& e3 = rep.tails.cell("stabilization_ge", 0.3, 58);
  CHECK(e3.freq() <= 0.1);
  const auto& e5 = rep.tails.cell("hyperplane_le", 0.3, 120);
  CHECK(e5.freq() <= 0.1);
}

TEST_CASE("geometry: stabilization formula matches the direct route while "
          "the direct route can still resolve it") {
  auto cfg = builtin_scenario("sl2-irreducible");
  cfg.n_max = 28;
  cfg.trials = 40;
  cfg.checkpoint_stride = 1;
  cfg.dense_checkpoints = true;
  cfg.epsilons = {0.1};
  const auto rep = run_geometry_decay(cfg, 4);
  long compared = 0;
  for (const auto& s : rep.stabilization_samples) {
    if (s.delta_direct >= 1e-11 && s.delta_direct <= 1e-3) {
      ++compared;
      CHECK(s.log_delta_formula ==
            Approx(std::log(s.delta_direct)).margin(0.02));
    }
  }
  INFO("pairs compared: " << compared);
  CHECK(compared >= 50);
}

TEST_CASE("geometry: probe inside L_mu is rejected") {
  auto cfg = builtin_scenario("lower-triangular-reducible");
  CVector e2(2);
  e2 << Complex(0, 0), Complex(1, 0);
  cfg.probe_vector = e2;  // exactly L_mu
  CHECK_THROWS_AS(run_geometry_decay(cfg), std::domain_error);
}

TEST_CASE("growth bounds: deterministic dilation satisfies every event") {
  CMatrix g = CMatrix::Zero(2, 2);
  g(0, 0) = 2.0;
  g(1, 1) = 0.5;
  auto cfg = single_matrix_scenario(g, "diag-growth", 400);
  SubspaceSpec lmu;
  CVector e2(2);
  e2 << Complex(0, 0), Complex(1, 0);
  lmu.basis = {e2};
  cfg.l_mu = lmu;
  CVector e1(2);
  e1 << Complex(1, 0), Complex(0, 0);
  cfg.probe_vector = e1;
  cfg.epsilons = {0.05, 0.2};
  const auto rep = run_growth_bounds(cfg);
  CHECK(rep.summary.failed_trials == 0);
  CHECK(rep.summary.lambda1_hat == Approx(std::log(2.0)).margin(1e-9));
  for (const auto& c : rep.tails.cells) CHECK(c.hits == 0);
}

TEST_CASE("growth bounds: probe in L_mu is rejected with explanation") {
  auto cfg = builtin_scenario("lower-triangular-reducible");
  CVector e2(2);
  e2 << Complex(0, 0), Complex(1, 0);
  cfg.probe_vector = e2;
  CHECK_THROWS_WITH(run_growth_bounds(cfg),
                    Catch::Matchers::ContainsSubstring("L_mu"));
}

TEST_CASE("growth bounds: lower-triangular complement frequencies are small") {
  auto cfg = builtin_scenario("lower-triangular-reducible");
  cfg.n_max = 300;
  cfg.trials = 100;
  cfg.epsilons = {0.1};
  const auto rep = run_growth_bounds(cfg, 4);
  CHECK(rep.summary.failed_trials == 0);
  CHECK(rep.tails.cell("growth_vector_violation", 0.1, 300).freq() <= 0.05);
  CHECK(rep.tails.cell("growth_norm_violation", 0.1, 300).freq() <= 0.05);
  CHECK(rep.log_delta_v_lmu == Approx(std::log(1.0 / std::sqrt(2.0))));
}

TEST_CASE("growth bounds: probe sequence v_n -> v tracks lambda1") {
  auto cfg = builtin_scenario("lower-triangular-reducible");
  cfg.n_max = 400;
  cfg.trials = 50;
  cfg.epsilons = {0.15};
  CVector limit(2), pert(2);
  limit << Complex(1, 0), Complex(1, 0);
  limit /= limit.norm();
  pert << Complex(0.3, 0.1), Complex(-0.2, 0.0);
  cfg.probe_sequence = ProbeSequence{limit, pert};
  const auto rep = run_growth_bounds(cfg, 4);
  CHECK(rep.summary.failed_trials == 0);
  CHECK(rep.tails.cell("probe_sequence_violation", 0.15, 400).freq() <= 0.1);
}

TEST_CASE("counterexample: exact trajectory diagnostics") {
  const auto rep = run_counterexample(6000, 2024);
  CHECK(rep.initial_state == 0);  // X1 = a for this seed
  CHECK(rep.windowed_min <= 0.02);
  CHECK(rep.windowed_max >= std::log(3.0) / 3.0);
  CHECK(rep.windowed_max == Approx(rep.lambda1_hat).margin(0.05));
  CHECK(rep.lambda1_hat == Approx(0.5 * std::log(3.0)).margin(0.05));
  CHECK(rep.norm_rate_fluctuation < 0.05);
  CHECK(rep.max_exactness_violation <= 1e-9);
  CHECK(rep.return_gaps_in_1_3);
  CHECK(rep.tau_bound_ok);
  CHECK(rep.returns_observed > 2000);
  CHECK(rep.qr.gap_index == 1);
  // rho = 1 exactly when the product sits outside the diagonal coset; with
  // X1 != omega that is the sigma-state occupancy, about 1/4.
  CHECK(rep.rho_one_fraction ==
        Approx(rep.coset_occupancy[1] + rep.coset_occupancy[2]).margin(0.01));
  CHECK(rep.rho_one_fraction == Approx(0.25).margin(0.05));
  const double occ_sum = rep.coset_occupancy[0] + rep.coset_occupancy[1] +
                         rep.coset_occupancy[2];
  CHECK(occ_sum == Approx(1.0).margin(1e-12));
}

TEST_CASE("counterexample: starting at omega flips the rho-one fraction") {
  // With X1 = omega the displacement is shifted by -1, so rho(L_n) = 1 at
  // a- and omega-times: fraction about 3/4.
  const auto rep = run_counterexample(6000, 1);
  CHECK(rep.initial_state == 2);
  CHECK(rep.rho_one_fraction == Approx(0.75).margin(0.05));
  CHECK(rep.windowed_min <= 0.02);
  CHECK(rep.windowed_max >= std::log(3.0) / 3.0);
  CHECK(rep.max_exactness_violation <= 1e-9);
}

TEST_CASE("lemma fuzz: empty run") {
  const auto rep = run_lemma_fuzz(0, {2, 3}, 1, false);
  CHECK(rep.samples_run == 0);
  CHECK(rep.corpus_run == 0);
  CHECK(rep.clean());
}

TEST_CASE("lemma fuzz: small run including the counterexample corpus") {
  const auto rep = run_lemma_fuzz(500, {2, 3}, 5, true, 2);
  CHECK(rep.samples_run == 1000);
  CHECK(rep.corpus_run == 2 * (3 + 9 + 27 + 81 + 243 + 729));
  CHECK(rep.clean());
}
