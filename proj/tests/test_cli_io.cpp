#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lyaplab/lyaplab.hpp"

using namespace lyaplab;
using Catch::Approx;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("builtin counterexample scenario matches the built-in definition") {
  const auto cfg = builtin_scenario("paper-counterexample");
  REQUIRE(cfg.law.support.size() == 3);
  CHECK((cfg.law.support[0] - builtin::counterexample_a()).norm() == 0.0);
  CHECK((cfg.law.support[1] - builtin::counterexample_sigma()).norm() == 0.0);
  CHECK((cfg.law.support[2] - builtin::counterexample_omega()).norm() == 0.0);
  CHECK(cfg.law.kernel(0, 0) == 0.5);
  CHECK(cfg.law.kernel(0, 1) == 0.5);
  CHECK(cfg.law.kernel(0, 2) == 0.0);
  CHECK(cfg.law.kernel(1, 2) == 1.0);
  CHECK(cfg.law.kernel(2, 0) == 1.0);
  CHECK(cfg.law.initial == std::vector<double>{0.5, 0.25, 0.25});
  // omega = sigma^{-1} = sigma adjoint
  CHECK((cfg.law.support[1] * cfg.law.support[2] - CMatrix::Identity(3, 3))
            .norm() == 0.0);
}

TEST_CASE("every builtin scenario id resolves and validates") {
  for (const auto& id : builtin_scenario_ids()) {
    const auto cfg = builtin_scenario(id);
    CHECK(cfg.name == id);
    CHECK(cfg.dim >= 2);
  }
  CHECK_THROWS_AS(builtin_scenario("nope"), std::domain_error);
}

TEST_CASE("config parsing: minimal iid law") {
  const auto j = Json::parse(R"({
    "name": "tiny",
    "law": {"kind": "iid", "support": [[[1, 0], [0, 1]]], "weights": [1.0]},
    "n_max": 100, "trials": 2, "seed": 7
  })");
  const auto cfg = parse_config(j);
  CHECK(cfg.name == "tiny");
  CHECK(cfg.dim == 2);
  CHECK(cfg.master_seed == 7);
  CHECK(cfg.law.support[0](0, 0) == Complex(1, 0));
}

TEST_CASE("config parsing: complex entries as [re, im] pairs") {
  const auto j = Json::parse(R"({
    "law": {"kind": "iid",
            "support": [[[[0,0], [0,1]], [[1,0], [0,0]]]],
            "weights": [1]},
    "n_max": 10
  })");
  const auto cfg = parse_config(j);
  CHECK(cfg.law.support[0](0, 1) == Complex(0, 1));
  CHECK(cfg.law.support[0](1, 0) == Complex(1, 0));
}

TEST_CASE("config errors name the offending field") {
  const auto bad_weights = Json::parse(R"({
    "law": {"kind": "iid",
            "support": [[[2,0],[0,2]], [[1,0],[0,1]]],
            "weights": [0.5, 0.6]},
    "n_max": 10
  })");
  CHECK_THROWS_WITH(parse_config(bad_weights),
                    Catch::Matchers::ContainsSubstring("law.weights"));

  const auto singular = Json::parse(R"({
    "law": {"kind": "iid", "support": [[[1, 0], [1, 0]]], "weights": [1]},
    "n_max": 10
  })");
  CHECK_THROWS_WITH(parse_config(singular),
                    Catch::Matchers::ContainsSubstring("law.support[0]"));

  const auto bad_kind = Json::parse(R"({
    "law": {"kind": "gaussian", "support": [[[1,0],[0,1]]]}, "n_max": 10
  })");
  CHECK_THROWS_WITH(parse_config(bad_kind),
                    Catch::Matchers::ContainsSubstring("law.kind"));

  CHECK_THROWS_AS(parse_config_file(temp_path("does_not_exist_xyz.json")),
                  ConfigError);
}

TEST_CASE("config round-trips through the scenario echo") {
  const auto base = builtin_scenario("lower-triangular-reducible");
  const Json echo = scenario_to_json(base);
  const auto back = parse_config(echo);
  CHECK(back.name == base.name);
  CHECK(back.dim == base.dim);
  CHECK(back.n_max == base.n_max);
  CHECK(back.master_seed == base.master_seed);
  CHECK(back.law.weights == base.law.weights);
  for (std::size_t i = 0; i < base.law.support.size(); ++i)
    CHECK((back.law.support[i] - base.law.support[i]).norm() == 0.0);
  REQUIRE(back.l_mu.has_value());
  CHECK(back.l_mu->dim() == 1);
  REQUIRE(back.probe_vector.has_value());
  CHECK((*back.probe_vector - *base.probe_vector).norm() == 0.0);
}

TEST_CASE("builtin override via config") {
  const auto j = Json::parse(R"({
    "builtin": "sl2-irreducible", "n_max": 123, "trials": 4, "seed": 99
  })");
  const auto cfg = parse_config(j);
  CHECK(cfg.name == "sl2-irreducible");
  CHECK(cfg.n_max == 123);
  CHECK(cfg.trials == 4);
  CHECK(cfg.master_seed == 99);
}

TEST_CASE("csv emission: header only for empty rows, RFC 4180 quoting") {
  ResultTable t;
  t.scenario_name = "empty";
  t.columns = {"n", "value, with comma", "quote\"inside"};
  const std::string csv = to_csv(t);
  CHECK(csv == "n,\"value, with comma\",\"quote\"\"inside\"\r\n");
}

TEST_CASE("csv numbers carry 17 significant digits and round-trip") {
  ResultTable t;
  t.columns = {"x", "y"};
  const double x = 1.0 / 3.0, y = std::log(3.0);
  t.add_row({x, y});
  t.add_row({std::nullopt, 0.0});
  const std::string csv = to_csv(t);
  std::istringstream in(csv);
  std::string header, row1, row2;
  std::getline(in, header);
  std::getline(in, row1);
  std::getline(in, row2);
  const auto comma = row1.find(',');
  CHECK(std::stod(row1.substr(0, comma)) == x);  // exact round trip
  CHECK(std::stod(row1.substr(comma + 1)) == y);
  CHECK(row2.substr(0, 1) == ",");  // null -> empty field
}

TEST_CASE("json emission round-trips the whole table") {
  auto cfg = builtin_scenario("deterministic-gelfand");
  cfg.n_max = 64;
  cfg.dense_checkpoints = false;
  const auto rep = run_lln(cfg);
  const ResultTable t = to_table(rep, cfg);
  const Json j = to_json(t);
  const ResultTable back = table_from_json(j);
  CHECK(back == t);
  CHECK(j.contains("schema"));
  CHECK(j.contains("scenario"));
  CHECK(j.contains("rows"));
  CHECK(j.contains("summary"));
}

TEST_CASE("csv and json contain identical numeric values") {
  auto cfg = builtin_scenario("unitary-null");
  cfg.n_max = 200;
  cfg.trials = 3;
  const auto rep = run_lln(cfg);
  const ResultTable t = to_table(rep, cfg);
  const ResultTable back = table_from_json(to_json(t));
  REQUIRE(back.rows.size() == t.rows.size());
  std::istringstream csv(to_csv(t));
  std::string line;
  std::getline(csv, line);  // header
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    std::getline(csv, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string field;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      std::getline(fields, field, ',');
      if (field.empty()) {
        CHECK_FALSE(back.rows[r][c].has_value());
      } else {
        REQUIRE(back.rows[r][c].has_value());
        CHECK(std::stod(field) == *back.rows[r][c]);
      }
    }
  }
}

TEST_CASE("identical runs emit byte-identical output") {
  auto cfg = builtin_scenario("sl2-irreducible");
  cfg.n_max = 400;
  cfg.trials = 6;
  const auto a = to_csv(to_table(run_lln(cfg, 3), cfg));
  const auto b = to_csv(to_table(run_lln(cfg, 1), cfg));  // workers must not matter
  CHECK(a == b);
  const auto ja = to_json(to_table(run_lln(cfg, 2), cfg)).dump(2);
  const auto jb = to_json(to_table(run_lln(cfg, 4), cfg)).dump(2);
  CHECK(ja == jb);
}

TEST_CASE("counterexample table carries the required summary keys") {
  const auto rep = run_counterexample(1500, 2024);
  auto cfg = builtin_scenario("paper-counterexample");
  cfg.n_max = 1500;
  cfg.master_seed = 2024;
  const ResultTable t = to_table(rep, cfg);
  for (const char* key : {"windowed_min", "windowed_max", "rho_one_fraction",
                          "lambda1_hat"})
    CHECK(t.summary.contains(key));
  CHECK(all_checks_passed(t));
}

TEST_CASE("emit writes files and surfaces IO failures with the path") {
  ResultTable t;
  t.columns = {"x"};
  t.add_row({1.5});
  const std::string path = temp_path("lyaplab_emit_test.csv");
  emit(t, EmitFormat::csv, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header.substr(0, 1) == "x");
  std::filesystem::remove(path);
  CHECK_THROWS_WITH(emit(t, EmitFormat::csv, "/no/such/dir/file.csv"),
                    Catch::Matchers::ContainsSubstring("/no/such/dir/file.csv"));
}

TEST_CASE("fuzz report table flags violations in checks") {
  const auto rep = run_lemma_fuzz(50, {2}, 3, false);
  const ResultTable t = to_table(rep);
  CHECK(all_checks_passed(t));
  CHECK(t.summary["checks"]["zero_violations"].get<bool>());
}
