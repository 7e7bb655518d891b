#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lyaplab/result_table.hpp"
#include "lyaplab/scenario.hpp"

namespace lyaplab {

/// Configuration error carrying the offending field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

namespace detail {

inline Complex parse_complex(const Json& j, const std::string& path) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Complex(j[0].get<double>(), j[1].get<double>());
  throw ConfigError(path, "expected a real number or an [re, im] pair");
}

inline CVector parse_vector(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty())
    throw ConfigError(path, "expected a non-empty array");
  CVector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] =
        parse_complex(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

inline CMatrix parse_matrix(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty())
    throw ConfigError(path, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  CMatrix m;
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = j[r];
    const std::string rpath = path + "[" + std::to_string(r) + "]";
    if (!row.is_array() || row.empty())
      throw ConfigError(rpath, "expected a non-empty row");
    if (r == 0) {
      cols = row.size();
      m.resize(rows, cols);
    } else if (row.size() != cols) {
      throw ConfigError(rpath, "ragged rows");
    }
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_complex(row[c], rpath + "[" + std::to_string(c) + "]");
  }
  return m;
}

inline std::vector<double> parse_real_vector(const Json& j,
                                             const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw ConfigError(path + "[" + std::to_string(i) + "]",
                        "expected a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

inline SubspaceSpec parse_subspace(const Json& j, const std::string& path) {
  SubspaceSpec s;
  if (!j.is_array()) throw ConfigError(path, "expected an array of vectors");
  for (std::size_t i = 0; i < j.size(); ++i)
    s.basis.push_back(parse_vector(j[i], path + "[" + std::to_string(i) + "]"));
  return s;
}

inline Json complex_to_json(const Complex& z) {
  return Json::array({z.real(), z.imag()});
}

inline Json matrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json vector_to_json(const CVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out.push_back(complex_to_json(v[i]));
  return out;
}

}  // namespace detail

inline Json scenario_to_json(const ScenarioConfig& cfg) {
  Json j;
  j["name"] = cfg.name;
  j["dim"] = cfg.dim;
  Json law;
  law["kind"] = cfg.law.kind == LawKind::iid_finite ? "iid" : "markov";
  Json support = Json::array();
  for (const auto& g : cfg.law.support)
    support.push_back(detail::matrix_to_json(g));
  law["support"] = std::move(support);
  if (!cfg.law.labels.empty()) law["labels"] = cfg.law.labels;
  if (cfg.law.kind == LawKind::iid_finite) {
    law["weights"] = cfg.law.weights;
  } else {
    Json kernel = Json::array();
    for (Eigen::Index r = 0; r < cfg.law.kernel.rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < cfg.law.kernel.cols(); ++c)
        row.push_back(cfg.law.kernel(r, c));
      kernel.push_back(std::move(row));
    }
    law["kernel"] = std::move(kernel);
    law["initial"] = cfg.law.initial;
  }
  j["law"] = std::move(law);
  j["n_max"] = cfg.n_max;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.master_seed;
  j["checkpoint_stride"] = cfg.checkpoint_stride;
  j["dense_checkpoints"] = cfg.dense_checkpoints;
  j["epsilons"] = cfg.epsilons;
  auto subspace_json = [](const SubspaceSpec& s) {
    Json arr = Json::array();
    for (const auto& b : s.basis) arr.push_back(detail::vector_to_json(b));
    return arr;
  };
  if (cfg.l_mu) j["l_mu"] = subspace_json(*cfg.l_mu);
  if (cfg.l_mu_check) j["l_mu_check"] = subspace_json(*cfg.l_mu_check);
  if (cfg.probe_vector) j["probe_vector"] = detail::vector_to_json(*cfg.probe_vector);
  if (cfg.probe_sequence) {
    Json seq;
    seq["limit"] = detail::vector_to_json(cfg.probe_sequence->limit);
    seq["perturbation"] = detail::vector_to_json(cfg.probe_sequence->perturbation);
    j["probe_sequence"] = std::move(seq);
  }
  j["walk_side"] = cfg.walk_side == WalkSide::left ? "left" : "right";
  return j;
}

/// Builds a ScenarioConfig from JSON. A "builtin" key starts from the named
/// registry scenario; every other key overrides that base. Validation errors
/// name the offending field.
inline ScenarioConfig parse_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("config", "expected a JSON object");
  ScenarioConfig cfg;
  bool have_law = false;
  if (j.contains("builtin")) {
    if (!j["builtin"].is_string())
      throw ConfigError("builtin", "expected a scenario id string");
    try {
      cfg = builtin_scenario(j["builtin"].get<std::string>());
    } catch (const std::domain_error& e) {
      throw ConfigError("builtin", e.what());
    }
    have_law = true;
  }
  if (j.contains("name")) cfg.name = j["name"].get<std::string>();
  if (j.contains("law")) {
    const auto& jl = j["law"];
    IncrementLaw law;
    if (!jl.is_object()) throw ConfigError("law", "expected an object");
    const std::string kind = jl.value("kind", "iid");
    if (kind == "iid")
      law.kind = LawKind::iid_finite;
    else if (kind == "markov")
      law.kind = LawKind::markov_finite;
    else
      throw ConfigError("law.kind", "expected \"iid\" or \"markov\"");
    if (!jl.contains("support"))
      throw ConfigError("law.support", "missing");
    if (!jl["support"].is_array() || jl["support"].empty())
      throw ConfigError("law.support", "expected a non-empty array");
    for (std::size_t i = 0; i < jl["support"].size(); ++i)
      law.support.push_back(detail::parse_matrix(
          jl["support"][i], "law.support[" + std::to_string(i) + "]"));
    if (jl.contains("labels"))
      law.labels = jl["labels"].get<std::vector<std::string>>();
    if (law.kind == LawKind::iid_finite) {
      if (!jl.contains("weights"))
        throw ConfigError("law.weights", "missing for iid law");
      law.weights = detail::parse_real_vector(jl["weights"], "law.weights");
    } else {
      if (!jl.contains("kernel"))
        throw ConfigError("law.kernel", "missing for markov law");
      const auto& jk = jl["kernel"];
      const auto n = static_cast<Eigen::Index>(law.support.size());
      if (!jk.is_array() || static_cast<Eigen::Index>(jk.size()) != n)
        throw ConfigError("law.kernel", "expected one row per support state");
      law.kernel.resize(n, n);
      for (Eigen::Index r = 0; r < n; ++r) {
        const auto row = detail::parse_real_vector(
            jk[r], "law.kernel[" + std::to_string(r) + "]");
        if (static_cast<Eigen::Index>(row.size()) != n)
          throw ConfigError("law.kernel[" + std::to_string(r) + "]",
                            "wrong row length");
        for (Eigen::Index c = 0; c < n; ++c) law.kernel(r, c) = row[c];
      }
      if (!jl.contains("initial"))
        throw ConfigError("law.initial", "missing for markov law");
      law.initial = detail::parse_real_vector(jl["initial"], "law.initial");
    }
    cfg.law = std::move(law);
    cfg.dim = cfg.law.dim();
    have_law = true;
  }
  if (!have_law) throw ConfigError("law", "missing (and no builtin given)");
  if (j.contains("dim")) cfg.dim = j["dim"].get<int>();
  if (j.contains("n_max")) cfg.n_max = j["n_max"].get<long>();
  if (j.contains("trials")) cfg.trials = j["trials"].get<long>();
  if (j.contains("seed")) cfg.master_seed = j["seed"].get<std::uint64_t>();
  if (j.contains("checkpoint_stride"))
    cfg.checkpoint_stride = j["checkpoint_stride"].get<long>();
  if (j.contains("dense_checkpoints"))
    cfg.dense_checkpoints = j["dense_checkpoints"].get<bool>();
  if (j.contains("epsilons"))
    cfg.epsilons = detail::parse_real_vector(j["epsilons"], "epsilons");
  if (j.contains("l_mu")) cfg.l_mu = detail::parse_subspace(j["l_mu"], "l_mu");
  if (j.contains("l_mu_check"))
    cfg.l_mu_check = detail::parse_subspace(j["l_mu_check"], "l_mu_check");
  if (j.contains("probe_vector"))
    cfg.probe_vector = detail::parse_vector(j["probe_vector"], "probe_vector");
  if (j.contains("probe_sequence")) {
    const auto& js = j["probe_sequence"];
    if (!js.is_object() || !js.contains("limit") || !js.contains("perturbation"))
      throw ConfigError("probe_sequence", "expected {limit, perturbation}");
    ProbeSequence seq{detail::parse_vector(js["limit"], "probe_sequence.limit"),
                      detail::parse_vector(js["perturbation"],
                                           "probe_sequence.perturbation")};
    cfg.probe_sequence = std::move(seq);
  }
  if (j.contains("walk_side")) {
    const std::string side = j["walk_side"].get<std::string>();
    if (side == "left")
      cfg.walk_side = WalkSide::left;
    else if (side == "right")
      cfg.walk_side = WalkSide::right;
    else
      throw ConfigError("walk_side", "expected \"left\" or \"right\"");
  }
  try {
    cfg.validate();
  } catch (const std::domain_error& e) {
    // validate() prefixes messages with the offending field path
    const std::string what = e.what();
    const auto colon = what.find(':');
    throw ConfigError(what.substr(0, colon),
                      colon == std::string::npos ? what : what.substr(colon + 2));
  }
  return cfg;
}

inline ScenarioConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace lyaplab
