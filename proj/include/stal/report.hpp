#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

// Check-run report: named residuals with tolerances, named numeric tables,
// and a deterministic JSON rendering. Emission is hand-ordered so identical
// runs produce identical bytes; parsing goes through the vendored reader.

namespace stal {

inline constexpr const char* kToolName = "stalcheck";
inline constexpr const char* kToolVersion = "0.1.0";

struct CheckEntry {
  std::string name;
  std::array<double, 4> point{};
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct NamedTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct CheckReport {
  std::string tool = kToolName;
  std::string version = kToolVersion;
  std::string metric;
  std::vector<std::pair<std::string, double>> parameters;
  std::uint64_t seed = 0;
  std::string timestamp;  // empty: field omitted from the rendering
  std::vector<std::string> notes;
  std::vector<CheckEntry> checks;
  std::vector<NamedTable> tables;

  void add_check(const std::string& name, const std::array<double, 4>& point,
                 double residual, double tolerance) {
    checks.push_back({name, point, residual, tolerance, residual <= tolerance});
  }

  int passed() const {
    int n = 0;
    for (const CheckEntry& c : checks) n += c.pass ? 1 : 0;
    return n;
  }

  bool all_pass() const { return passed() == int(checks.size()); }
};

// 17 significant digits: enough to reproduce any double exactly
inline std::string format_number(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("report numbers must be finite");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out;
}

inline std::string emit_report(const CheckReport& r) {
  std::string o;
  o += "{\n  \"metadata\": {\n";
  o += "    \"tool\": \"" + json_escape(r.tool) + "\",\n";
  o += "    \"version\": \"" + json_escape(r.version) + "\",\n";
  o += "    \"metric\": \"" + json_escape(r.metric) + "\",\n";
  o += "    \"parameters\": {";
  for (std::size_t i = 0; i < r.parameters.size(); ++i) {
    if (i) o += ", ";
    o += "\"" + json_escape(r.parameters[i].first) +
         "\": " + format_number(r.parameters[i].second);
  }
  o += "},\n";
  o += "    \"seed\": " + std::to_string(r.seed);
  if (!r.timestamp.empty())
    o += ",\n    \"timestamp\": \"" + json_escape(r.timestamp) + "\"";
  o += "\n  },\n";

  o += "  \"notes\": [";
  for (std::size_t i = 0; i < r.notes.size(); ++i) {
    if (i) o += ", ";
    o += "\"" + json_escape(r.notes[i]) + "\"";
  }
  o += "],\n";

  o += "  \"checks\": [";
  for (std::size_t i = 0; i < r.checks.size(); ++i) {
    const CheckEntry& c = r.checks[i];
    o += i ? ",\n    " : "\n    ";
    o += "{\"name\": \"" + json_escape(c.name) + "\", \"point\": [";
    for (int k = 0; k < 4; ++k) {
      if (k) o += ", ";
      o += format_number(c.point[std::size_t(k)]);
    }
    o += "], \"residual\": " + format_number(c.residual);
    o += ", \"tolerance\": " + format_number(c.tolerance);
    o += std::string(", \"pass\": ") + (c.pass ? "true" : "false") + "}";
  }
  o += r.checks.empty() ? "],\n" : "\n  ],\n";

  o += "  \"tables\": [";
  for (std::size_t i = 0; i < r.tables.size(); ++i) {
    const NamedTable& t = r.tables[i];
    o += i ? ",\n    " : "\n    ";
    o += "{\"name\": \"" + json_escape(t.name) + "\", \"columns\": [";
    for (std::size_t k = 0; k < t.columns.size(); ++k) {
      if (k) o += ", ";
      o += "\"" + json_escape(t.columns[k]) + "\"";
    }
    o += "], \"rows\": [";
    for (std::size_t rw = 0; rw < t.rows.size(); ++rw) {
      if (rw) o += ", ";
      o += "[";
      for (std::size_t k = 0; k < t.rows[rw].size(); ++k) {
        if (k) o += ", ";
        o += format_number(t.rows[rw][k]);
      }
      o += "]";
    }
    o += "]}";
  }
  o += r.tables.empty() ? "],\n" : "\n  ],\n";

  int total = int(r.checks.size());
  int passed = r.passed();
  o += "  \"summary\": {\"total\": " + std::to_string(total) +
       ", \"passed\": " + std::to_string(passed) +
       ", \"failed\": " + std::to_string(total - passed) + "}\n}\n";
  return o;
}

struct report_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline CheckReport parse_report(const std::string& text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw report_error(std::string("report parse: ") + e.what());
  }
  try {
    CheckReport r;
    const auto& md = j.at("metadata");
    r.tool = md.at("tool").get<std::string>();
    r.version = md.at("version").get<std::string>();
    r.metric = md.at("metric").get<std::string>();
    for (const auto& kv : md.at("parameters").items())
      r.parameters.emplace_back(kv.key(), kv.value().get<double>());
    r.seed = md.at("seed").get<std::uint64_t>();
    if (md.contains("timestamp")) r.timestamp = md.at("timestamp").get<std::string>();
    for (const auto& n : j.at("notes")) r.notes.push_back(n.get<std::string>());
    for (const auto& c : j.at("checks")) {
      CheckEntry e;
      e.name = c.at("name").get<std::string>();
      for (int k = 0; k < 4; ++k) e.point[std::size_t(k)] = c.at("point").at(std::size_t(k)).get<double>();
      e.residual = c.at("residual").get<double>();
      e.tolerance = c.at("tolerance").get<double>();
      e.pass = c.at("pass").get<bool>();
      r.checks.push_back(e);
    }
    for (const auto& t : j.at("tables")) {
      NamedTable nt;
      nt.name = t.at("name").get<std::string>();
      for (const auto& col : t.at("columns")) nt.columns.push_back(col.get<std::string>());
      for (const auto& row : t.at("rows")) {
        std::vector<double> vals;
        for (const auto& v : row) vals.push_back(v.get<double>());
        nt.rows.push_back(std::move(vals));
      }
      r.tables.push_back(std::move(nt));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw report_error(std::string("report schema: ") + e.what());
  }
}

}  // namespace stal
