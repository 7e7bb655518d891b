#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lyaplab/estimators.hpp"
#include "lyaplab/increment_law.hpp"
#include "lyaplab/types.hpp"

namespace lyaplab {

enum class WalkSide { left, right };

/// Probe sequence v_n = limit + perturbation / n, used to exercise the
/// moving-target growth statements.
struct ProbeSequence {
  CVector limit;
  CVector perturbation;

  CVector at(long n) const {
    return limit + perturbation / static_cast<double>(n);
  }
};

/// Full description of one random-walk experiment.
struct ScenarioConfig {
  std::string name;
  IncrementLaw law;
  int dim{0};
  long n_max{10000};
  long trials{1};
  std::uint64_t master_seed{1};
  long checkpoint_stride{1};
  std::vector<double> epsilons{0.1};
  std::optional<SubspaceSpec> l_mu;        // Furstenberg-Kifer subspace of mu
  std::optional<SubspaceSpec> l_mu_check;  // same for the adjoint law
  std::optional<CVector> probe_vector;
  std::optional<ProbeSequence> probe_sequence;
  WalkSide walk_side{WalkSide::left};
  bool dense_checkpoints{false};  // arithmetic stride instead of geometric

  /// Checkpoints: geometric spacing (stride, then x1.2 rounded up) by
  /// default, arithmetic with the given stride when dense_checkpoints is
  /// set; always terminated at n_max.
  std::vector<long> checkpoints() const {
    std::vector<long> out;
    long n = checkpoint_stride;
    while (n < n_max) {
      out.push_back(n);
      if (dense_checkpoints) {
        n += checkpoint_stride;
      } else {
        const long next =
            static_cast<long>(std::ceil(1.2 * static_cast<double>(n)));
        n = std::max(n + 1, next);
      }
    }
    out.push_back(n_max);
    return out;
  }

  void validate() const {
    law.validate();
    if (dim != law.dim())
      throw std::domain_error("config.dim: does not match law support dimension");
    if (trials < 1) throw std::domain_error("config.trials: must be >= 1");
    if (checkpoint_stride < 1 || n_max < checkpoint_stride)
      throw std::domain_error(
          "config.n_max: need n_max >= checkpoint_stride >= 1");
    for (double e : epsilons)
      if (!(e > 0.0))
        throw std::domain_error("config.epsilons: must be positive");
    if (l_mu) l_mu->validate(dim);
    if (l_mu_check) l_mu_check->validate(dim);
    if (probe_vector && (probe_vector->size() != dim || !(probe_vector->norm() > 0)))
      throw std::domain_error("config.probe_vector: wrong size or zero");
    if (probe_sequence &&
        (probe_sequence->limit.size() != dim ||
         probe_sequence->perturbation.size() != dim ||
         !(probe_sequence->limit.norm() > 0)))
      throw std::domain_error("config.probe_sequence: wrong size or zero limit");
  }
};

namespace builtin {

inline CMatrix real_matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const auto d = static_cast<Eigen::Index>(rows.size());
  CMatrix m(d, rows.begin()->size());
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double x : row) m(i, j++) = Complex(x, 0.0);
    ++i;
  }
  return m;
}

/// The three SL_3 matrices of the Markov counterexample: a diagonal dilation
/// and the two mutually inverse 3-cycles.
inline CMatrix counterexample_a() {
  return real_matrix({{3, 0, 0}, {0, 1, 0}, {0, 0, 1.0 / 3.0}});
}
inline CMatrix counterexample_sigma() {
  return real_matrix({{0, 0, 1}, {1, 0, 0}, {0, 1, 0}});
}
inline CMatrix counterexample_omega() {
  return real_matrix({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
}

}  // namespace builtin

inline std::vector<std::string> builtin_scenario_ids() {
  return {"paper-counterexample", "sl2-irreducible", "lower-triangular-reducible",
          "unitary-null", "deterministic-gelfand"};
}

/// Built-in scenario registry. Each entry is a complete runnable config;
/// callers typically override n_max, trials and the seed.
inline ScenarioConfig builtin_scenario(std::string_view id) {
  ScenarioConfig cfg;
  cfg.name = std::string(id);
  if (id == "paper-counterexample") {
    cfg.dim = 3;
    cfg.law.kind = LawKind::markov_finite;
    cfg.law.support = {builtin::counterexample_a(), builtin::counterexample_sigma(),
                       builtin::counterexample_omega()};
    cfg.law.labels = {"a", "sigma", "omega"};
    cfg.law.kernel = Eigen::MatrixXd{{0.5, 0.5, 0.0}, {0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}};
    cfg.law.initial = {0.5, 0.25, 0.25};
    cfg.n_max = 30000;
    cfg.trials = 1;
  } else if (id == "sl2-irreducible") {
    cfg.dim = 2;
    cfg.law.kind = LawKind::iid_finite;
    cfg.law.support = {builtin::real_matrix({{2, 1}, {1, 1}}),
                       builtin::real_matrix({{1, 1}, {1, 2}})};
    cfg.law.weights = {0.5, 0.5};
    cfg.n_max = 10000;
    cfg.trials = 100;
    cfg.l_mu = SubspaceSpec{};  // strongly irreducible: L_mu = {0}
    CVector probe(2);
    probe << Complex(1, 0), Complex(0, 0);
    cfg.probe_vector = probe;
    cfg.epsilons = {0.1, 0.2};
  } else if (id == "lower-triangular-reducible") {
    cfg.dim = 2;
    cfg.law.kind = LawKind::iid_finite;
    cfg.law.support = {builtin::real_matrix({{2, 0}, {1, 0.5}}),
                       builtin::real_matrix({{2, 0}, {-1, 0.5}})};
    cfg.law.weights = {0.5, 0.5};
    cfg.n_max = 10000;
    cfg.trials = 100;
    SubspaceSpec lmu;
    CVector e2(2);
    e2 << Complex(0, 0), Complex(1, 0);
    lmu.basis = {e2};
    cfg.l_mu = lmu;
    cfg.l_mu_check = SubspaceSpec{};  // adjoint family has no slow subspace
    CVector probe(2);
    const double inv_sqrt2 = 0.7071067811865475244;
    probe << Complex(inv_sqrt2, 0), Complex(inv_sqrt2, 0);
    cfg.probe_vector = probe;
    cfg.epsilons = {0.1};
  } else if (id == "unitary-null") {
    cfg.dim = 2;
    cfg.law.kind = LawKind::iid_finite;
    const double t1 = 1.0, t2 = 0.5;
    CMatrix r1 = builtin::real_matrix(
        {{std::cos(t1), -std::sin(t1)}, {std::sin(t1), std::cos(t1)}});
    CMatrix r2 = builtin::real_matrix(
        {{std::cos(t2), -std::sin(t2)}, {std::sin(t2), std::cos(t2)}});
    CMatrix phase = CMatrix::Zero(2, 2);
    phase(0, 0) = std::polar(1.0, 1.0 / 3.0);
    phase(1, 1) = std::polar(1.0, -1.0 / 3.0);
    cfg.law.support = {r1, r2, phase};
    cfg.law.weights = {0.4, 0.4, 0.2};
    cfg.n_max = 5000;
    cfg.trials = 20;
  } else if (id == "deterministic-gelfand") {
    cfg.dim = 2;
    cfg.law.kind = LawKind::iid_finite;
    cfg.law.support = {builtin::real_matrix({{0, 2}, {0.5, 0}})};
    cfg.law.weights = {1.0};
    cfg.n_max = 10000;
    cfg.trials = 1;
  } else {
    throw std::domain_error("unknown builtin scenario: " + std::string(id));
  }
  cfg.validate();
  return cfg;
}

}  // namespace lyaplab
