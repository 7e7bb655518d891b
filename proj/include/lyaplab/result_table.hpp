#pragma once
#include <cmath>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace lyaplab {

using Json = nlohmann::ordered_json;

enum class EmitFormat { csv, json };

/// Result table: named numeric columns (values finite or null), a scenario
/// echo, and a summary block. Serialization is deterministic: identical
/// tables emit byte-identical output.
struct ResultTable {
  int schema_version{1};
  std::string scenario_name;
  Json scenario_echo = Json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> rows;
  Json summary = Json::object();

  void add_row(std::vector<std::optional<double>> row) {
    if (row.size() != columns.size())
      throw std::logic_error("ResultTable: row width != column count");
    for (std::size_t c = 0; c < row.size(); ++c)
      if (row[c] && !std::isfinite(*row[c]))
        throw std::logic_error("ResultTable: non-finite value in column " +
                               columns[c]);
    rows.push_back(std::move(row));
  }

  bool operator==(const ResultTable& o) const {
    return schema_version == o.schema_version &&
           scenario_name == o.scenario_name && scenario_echo == o.scenario_echo &&
           columns == o.columns && rows == o.rows && summary == o.summary;
  }
};

namespace detail {

inline std::string format_double_17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// RFC 4180: quote fields containing comma, quote or newline; double quotes.
inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

}  // namespace detail

inline std::string to_csv(const ResultTable& t) {
  std::string out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (c) out += ',';
    out += detail::csv_escape(t.columns[c]);
  }
  out += "\r\n";
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      if (row[c]) out += detail::format_double_17(*row[c]);
    }
    out += "\r\n";
  }
  return out;
}

inline Json to_json(const ResultTable& t) {
  Json j;
  j["schema"] = t.schema_version;
  Json scen;
  scen["name"] = t.scenario_name;
  scen["config"] = t.scenario_echo;
  scen["columns"] = t.columns;
  j["scenario"] = std::move(scen);
  Json rows = Json::array();
  for (const auto& row : t.rows) {
    Json jr = Json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c])
        jr[t.columns[c]] = *row[c];
      else
        jr[t.columns[c]] = nullptr;
    }
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  j["summary"] = t.summary;
  return j;
}

inline ResultTable table_from_json(const Json& j) {
  ResultTable t;
  t.schema_version = j.at("schema").get<int>();
  const auto& scen = j.at("scenario");
  t.scenario_name = scen.at("name").get<std::string>();
  t.scenario_echo = scen.at("config");
  t.columns = scen.at("columns").get<std::vector<std::string>>();
  for (const auto& jr : j.at("rows")) {
    std::vector<std::optional<double>> row;
    row.reserve(t.columns.size());
    for (const auto& col : t.columns) {
      const auto& v = jr.at(col);
      if (v.is_null())
        row.push_back(std::nullopt);
      else
        row.push_back(v.get<double>());
    }
    t.rows.push_back(std::move(row));
  }
  t.summary = j.at("summary");
  return t;
}

/// Writes the table to `path` ("-" = stdout) in the requested format.
inline void emit(const ResultTable& t, EmitFormat format,
                 const std::string& path) {
  std::string payload;
  if (format == EmitFormat::csv)
    payload = to_csv(t);
  else
    payload = to_json(t).dump(2) + "\n";
  if (path == "-") {
    std::cout << payload;
    if (!std::cout) throw std::runtime_error("emit: write to stdout failed");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit: cannot open " + path);
  out << payload;
  if (!out) throw std::runtime_error("emit: write failed: " + path);
}

}  // namespace lyaplab
