// lyaplab command line: Monte Carlo laboratory for products of random
// invertible matrices (norm/spectral-radius laws of large numbers, projective
// geometry decay, growth bounds, the Markov counterexample, and the
// deterministic inequality fuzzer).

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "lyaplab/lyaplab.hpp"

namespace {

using namespace lyaplab;

struct CommonOpts {
  std::string config_path;
  std::string scenario_id;
  std::string out = "-";
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::optional<long> trials;
  std::optional<long> n_max;
  int workers = static_cast<int>(std::thread::hardware_concurrency());
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_scenario) {
  if (with_scenario) {
    cmd->add_option("--config", o.config_path, "JSON scenario config file");
    cmd->add_option("--scenario", o.scenario_id,
                    "built-in scenario id (" +
                        [] {
                          std::string s;
                          for (const auto& id : builtin_scenario_ids()) {
                            if (!s.empty()) s += ", ";
                            s += id;
                          }
                          return s;
                        }() +
                        ")");
    cmd->add_option("--trials", o.trials, "number of trials (override)");
  }
  cmd->add_option("--seed", o.seed, "master seed (override)");
  cmd->add_option("--n-max", o.n_max, "horizon (override)");
  cmd->add_option("--out", o.out, "output path, - for stdout")->capture_default_str();
  cmd->add_option("--format", o.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--workers", o.workers, "max concurrent trials")
      ->capture_default_str();
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("LYAPLAB_SEED");
  if (!s || !*s) return std::nullopt;
  return std::strtoull(s, nullptr, 10);
}

ScenarioConfig resolve_scenario(const CommonOpts& o) {
  ScenarioConfig cfg;
  bool config_has_seed = false;
  if (!o.config_path.empty() && !o.scenario_id.empty())
    throw ConfigError("config", "give either --config or --scenario, not both");
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw ConfigError("config", "cannot open " + o.config_path);
    Json j;
    try {
      in >> j;
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
    config_has_seed = j.is_object() && j.contains("seed");
    cfg = parse_config(j);
  } else if (!o.scenario_id.empty()) {
    cfg = builtin_scenario(o.scenario_id);
  } else {
    throw ConfigError("config", "need --config or --scenario");
  }
  if (o.seed) {
    cfg.master_seed = *o.seed;
  } else if (!config_has_seed) {
    if (auto s = env_seed()) cfg.master_seed = *s;
  }
  if (o.trials) cfg.trials = *o.trials;
  if (o.n_max) cfg.n_max = *o.n_max;
  cfg.validate();
  return cfg;
}

int finish(const ResultTable& table, const CommonOpts& o,
           std::uint64_t master_seed) {
  std::cerr << "master seed: " << master_seed << "\n";
  emit(table, o.format == "csv" ? EmitFormat::csv : EmitFormat::json, o.out);
  return all_checks_passed(table) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"laboratory for products of random invertible matrices"};
  app.require_subcommand(1);

  CommonOpts lln_opts, eig_opts, geo_opts, growth_opts, lyap_opts;
  CommonOpts ce_opts, fuzz_opts;
  long fuzz_count = 100000;
  std::vector<int> fuzz_dims = {2, 3, 5};
  bool fuzz_skip_corpus = false;

  auto* lemma = app.add_subcommand(
      "lemma-check", "fuzz the deterministic spectral-radius inequalities");
  lemma->add_option("--count", fuzz_count, "samples per dimension")
      ->capture_default_str();
  lemma->add_option("--dims", fuzz_dims, "dimensions to fuzz")
      ->capture_default_str();
  lemma->add_flag("--skip-counterexample-corpus", fuzz_skip_corpus,
                  "skip the built-in counterexample product corpus");
  add_common(lemma, fuzz_opts, /*with_scenario=*/false);

  auto* lyap = app.add_subcommand(
      "lyapunov", "estimate the Lyapunov spectrum of a scenario");
  add_common(lyap, lyap_opts, true);

  auto* lln = app.add_subcommand(
      "lln", "norm and spectral-radius laws of large numbers");
  add_common(lln, lln_opts, true);

  auto* eig = app.add_subcommand(
      "eigvec-lln", "componentwise eigenvalue-moduli law of large numbers");
  add_common(eig, eig_opts, true);

  auto* geo = app.add_subcommand(
      "geometry", "attracting point / repelling hyperplane decay frequencies");
  add_common(geo, geo_opts, true);

  auto* growth = app.add_subcommand(
      "growth-bounds", "two-sided growth sandwich for ||L_n v|| and ||L_n||");
  add_common(growth, growth_opts, true);

  auto* ce = app.add_subcommand(
      "counterexample",
      "single long trajectory of the Markov chain whose spectral radius "
      "fails the law of large numbers");
  add_common(ce, ce_opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (*lemma) {
      const std::uint64_t seed =
          fuzz_opts.seed ? *fuzz_opts.seed : env_seed().value_or(1);
      const auto rep = run_lemma_fuzz(fuzz_count, fuzz_dims, seed,
                                      !fuzz_skip_corpus, fuzz_opts.workers);
      return finish(to_table(rep), fuzz_opts, seed);
    }
    if (*lyap) {
      const auto cfg = resolve_scenario(lyap_opts);
      const auto rep = run_lln(cfg, lyap_opts.workers);
      // Spectrum-focused view of the run.
      ResultTable t;
      t.scenario_name = cfg.name;
      t.scenario_echo = scenario_to_json(cfg);
      t.columns = {"k", "lambda_hat", "stderr"};
      for (Eigen::Index k = 0; k < rep.summary.qr.lambda.size(); ++k)
        t.add_row({static_cast<double>(k + 1), rep.summary.qr.lambda[k],
                   rep.summary.qr.std_error[k]});
      t.summary = to_table(rep, cfg).summary;
      return finish(t, lyap_opts, cfg.master_seed);
    }
    if (*lln) {
      const auto cfg = resolve_scenario(lln_opts);
      return finish(to_table(run_lln(cfg, lln_opts.workers), cfg), lln_opts,
                    cfg.master_seed);
    }
    if (*eig) {
      const auto cfg = resolve_scenario(eig_opts);
      return finish(to_table(run_eigen_vector_lln(cfg, eig_opts.workers), cfg),
                    eig_opts, cfg.master_seed);
    }
    if (*geo) {
      const auto cfg = resolve_scenario(geo_opts);
      return finish(to_table(run_geometry_decay(cfg, geo_opts.workers), cfg),
                    geo_opts, cfg.master_seed);
    }
    if (*growth) {
      const auto cfg = resolve_scenario(growth_opts);
      return finish(to_table(run_growth_bounds(cfg, growth_opts.workers), cfg),
                    growth_opts, cfg.master_seed);
    }
    if (*ce) {
      const std::uint64_t seed =
          ce_opts.seed ? *ce_opts.seed : env_seed().value_or(1);
      const long n_max = ce_opts.n_max.value_or(30000);
      const auto rep = run_counterexample(n_max, seed);
      auto cfg = builtin_scenario("paper-counterexample");
      cfg.n_max = n_max;
      cfg.master_seed = seed;
      return finish(to_table(rep, cfg), ce_opts, seed);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
