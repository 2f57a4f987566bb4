#pragma once

#include <array>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "stal/expr.hpp"

namespace stal {

// Parse or validation failure in a metric description; carries the 1-based
// source line so drivers can point at the offending entry.
struct metric_error : std::runtime_error {
  int line;
  metric_error(int l, const std::string& message)
      : std::runtime_error("line " + std::to_string(l) + ": " + message),
        line(l) {}
};

enum class StressType { vacuum, dust, perfect_fluid };

// A chart: four named coordinates, named constant parameters, the metric
// components as bound expressions (upper triangle given, mirror implied),
// sampling ranges, and the matter preset the chart is checked against.
struct MetricSpec {
  std::string label;
  std::array<std::string, 4> coords;
  std::vector<std::pair<std::string, double>> params;
  std::array<std::array<std::optional<Expr>, 4>, 4> g;
  bool diagonal = true;
  bool asymptotically_flat = false;
  bool quasi_cartesian = false;
  std::array<std::array<double, 2>, 4> domain{{{0.0, 1.0},
                                               {0.0, 1.0},
                                               {0.0, 1.0},
                                               {0.0, 1.0}}};
  StressType stress = StressType::vacuum;
  std::optional<Expr> rho;
  std::optional<Expr> pressure;
  std::optional<double> expected_mass;
  double mass_tol = 1e-2;

  std::vector<double> param_values() const {
    std::vector<double> v;
    v.reserve(params.size());
    for (const auto& p : params) v.push_back(p.second);
    return v;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// strips a trailing comment; '#' inside a quoted string does not count
inline std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

struct RawValue {
  enum class Kind { text, number, boolean, number_list, text_list } kind;
  std::string text;
  double number = 0.0;
  bool boolean = false;
  std::vector<double> numbers;
  std::vector<std::string> texts;
};

inline double parse_number(const std::string& s, int line) {
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || trim(std::string(end)) != "")
    throw metric_error(line, "expected a number, got '" + s + "'");
  return v;
}

inline RawValue parse_value(const std::string& raw, int line) {
  std::string s = trim(raw);
  if (s.empty()) throw metric_error(line, "missing value");
  RawValue v{};
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"')
      throw metric_error(line, "unterminated string");
    v.kind = RawValue::Kind::text;
    v.text = s.substr(1, s.size() - 2);
    return v;
  }
  if (s == "true" || s == "false") {
    v.kind = RawValue::Kind::boolean;
    v.boolean = (s == "true");
    return v;
  }
  if (s.front() == '[') {
    if (s.back() != ']') throw metric_error(line, "unterminated list");
    std::string body = s.substr(1, s.size() - 2);
    std::vector<std::string> items;
    std::string cur;
    bool quoted = false;
    for (char c : body) {
      if (c == '"') quoted = !quoted;
      if (c == ',' && !quoted) {
        items.push_back(trim(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!trim(cur).empty()) items.push_back(trim(cur));
    bool all_text = !items.empty();
    for (const std::string& it : items)
      if (it.empty() || it.front() != '"') all_text = false;
    if (all_text) {
      v.kind = RawValue::Kind::text_list;
      for (const std::string& it : items) {
        if (it.size() < 2 || it.back() != '"')
          throw metric_error(line, "unterminated string in list");
        v.texts.push_back(it.substr(1, it.size() - 2));
      }
    } else {
      v.kind = RawValue::Kind::number_list;
      for (const std::string& it : items)
        v.numbers.push_back(parse_number(it, line));
    }
    return v;
  }
  v.kind = RawValue::Kind::number;
  v.number = parse_number(s, line);
  return v;
}

}  // namespace detail

// Reads the sectioned key/value format:
//   label = "name"
//   [coordinates] names = ["t","r","theta","phi"]
//   [parameters]  m = 1.0
//   [metric]      g.0.0 = "1 - 2*m/r"      (upper triangle)
//   [flags]       asymptotically_flat = true
//   [domain]      r = [4.0, 50.0]
//   [stress]      type = "dust"  rho = "4/(3*t^2)"
//   [energy]      expected_mass = 1.0  mass_tol = 1e-2
// Expressions are parsed and bound against the declared names immediately.
inline MetricSpec parse_metric(const std::string& text) {
  MetricSpec spec;
  std::string section;
  bool have_coords = false;
  std::vector<std::tuple<int, int, int, std::string>> metric_entries;
  std::vector<std::pair<int, std::array<std::string, 2>>> stress_exprs;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = detail::trim(detail::strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw metric_error(line, "unterminated section header");
      section = detail::trim(s.substr(1, s.size() - 2));
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw metric_error(line, "expected 'key = value'");
    std::string key = detail::trim(s.substr(0, eq));
    detail::RawValue val = detail::parse_value(s.substr(eq + 1), line);
    if (key.empty()) throw metric_error(line, "missing key");

    if (section.empty()) {
      if (key == "label" && val.kind == detail::RawValue::Kind::text)
        spec.label = val.text;
      else
        throw metric_error(line, "unknown top-level key '" + key + "'");
    } else if (section == "coordinates") {
      if (key != "names" || val.kind != detail::RawValue::Kind::text_list)
        throw metric_error(line, "coordinates section expects names = [\"..\"]");
      if (val.texts.size() != 4)
        throw metric_error(line, "exactly 4 coordinate names required");
      for (int i = 0; i < 4; ++i) spec.coords[std::size_t(i)] = val.texts[std::size_t(i)];
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
          if (spec.coords[std::size_t(i)] == spec.coords[std::size_t(j)])
            throw metric_error(line, "duplicate coordinate name '" +
                                         spec.coords[std::size_t(i)] + "'");
      have_coords = true;
    } else if (section == "parameters") {
      if (val.kind != detail::RawValue::Kind::number)
        throw metric_error(line, "parameter '" + key + "' expects a number");
      for (const auto& p : spec.params)
        if (p.first == key)
          throw metric_error(line, "duplicate parameter '" + key + "'");
      spec.params.emplace_back(key, val.number);
    } else if (section == "metric") {
      if (val.kind != detail::RawValue::Kind::text)
        throw metric_error(line, "metric entry expects a quoted expression");
      int i = -1, j = -1;
      if (key.size() == 5 && key.compare(0, 2, "g.") == 0 && key[3] == '.' &&
          key[2] >= '0' && key[2] <= '3' && key[4] >= '0' && key[4] <= '3') {
        i = key[2] - '0';
        j = key[4] - '0';
      }
      if (i < 0) throw metric_error(line, "metric key must be g.<i>.<j>");
      if (i > j) throw metric_error(line, "store the upper triangle: g." +
                                              std::to_string(j) + "." +
                                              std::to_string(i));
      metric_entries.emplace_back(line, i, j, val.text);
    } else if (section == "flags") {
      if (val.kind != detail::RawValue::Kind::boolean)
        throw metric_error(line, "flag '" + key + "' expects true/false");
      if (key == "asymptotically_flat")
        spec.asymptotically_flat = val.boolean;
      else if (key == "quasi_cartesian")
        spec.quasi_cartesian = val.boolean;
      else
        throw metric_error(line, "unknown flag '" + key + "'");
    } else if (section == "domain") {
      if (!have_coords)
        throw metric_error(line, "domain section must follow coordinates");
      if (val.kind != detail::RawValue::Kind::number_list ||
          val.numbers.size() != 2)
        throw metric_error(line, "domain entry expects [lo, hi]");
      int idx = -1;
      for (int i = 0; i < 4; ++i)
        if (spec.coords[std::size_t(i)] == key) idx = i;
      if (idx < 0)
        throw metric_error(line, "domain names unknown coordinate '" + key + "'");
      if (!(val.numbers[0] < val.numbers[1]))
        throw metric_error(line, "empty domain for '" + key + "'");
      spec.domain[std::size_t(idx)] = {val.numbers[0], val.numbers[1]};
    } else if (section == "stress") {
      if (key == "type" && val.kind == detail::RawValue::Kind::text) {
        if (val.text == "vacuum")
          spec.stress = StressType::vacuum;
        else if (val.text == "dust")
          spec.stress = StressType::dust;
        else if (val.text == "perfect_fluid")
          spec.stress = StressType::perfect_fluid;
        else
          throw metric_error(line, "unknown stress type '" + val.text + "'");
      } else if ((key == "rho" || key == "pressure") &&
                 val.kind == detail::RawValue::Kind::text) {
        stress_exprs.push_back({line, {key, val.text}});
      } else {
        throw metric_error(line, "unknown stress key '" + key + "'");
      }
    } else if (section == "energy") {
      if (val.kind != detail::RawValue::Kind::number)
        throw metric_error(line, "energy entry expects a number");
      if (key == "expected_mass")
        spec.expected_mass = val.number;
      else if (key == "mass_tol")
        spec.mass_tol = val.number;
      else
        throw metric_error(line, "unknown energy key '" + key + "'");
    } else {
      throw metric_error(line, "unknown section [" + section + "]");
    }
  }

  if (!have_coords) throw metric_error(line, "missing [coordinates] section");
  if (metric_entries.empty()) throw metric_error(line, "missing [metric] section");

  Bindings b;
  b.coords = spec.coords;
  for (const auto& p : spec.params) b.params.push_back(p.first);

  for (const auto& [eline, i, j, src] : metric_entries) {
    try {
      Expr e = parse(src);
      bind(e, b);
      if (spec.g[std::size_t(i)][std::size_t(j)])
        throw metric_error(eline, "duplicate metric entry g." +
                                      std::to_string(i) + "." + std::to_string(j));
      if (i != j) spec.diagonal = false;
      spec.g[std::size_t(i)][std::size_t(j)] = e;
      spec.g[std::size_t(j)][std::size_t(i)] = std::move(e);
    } catch (const parse_error& pe) {
      throw metric_error(eline, "g." + std::to_string(i) + "." +
                                    std::to_string(j) + ": " + pe.what());
    } catch (const bind_error& be) {
      throw metric_error(eline, "g." + std::to_string(i) + "." +
                                    std::to_string(j) + ": " + be.what());
    }
  }
  for (int i = 0; i < 4; ++i)
    if (!spec.g[std::size_t(i)][std::size_t(i)])
      throw metric_error(line, "missing diagonal entry g." + std::to_string(i) +
                                   "." + std::to_string(i));

  for (const auto& [eline, kv] : stress_exprs) {
    try {
      Expr e = parse(kv[1]);
      bind(e, b);
      if (kv[0] == "rho")
        spec.rho = std::move(e);
      else
        spec.pressure = std::move(e);
    } catch (const parse_error& pe) {
      throw metric_error(eline, kv[0] + ": " + pe.what());
    } catch (const bind_error& be) {
      throw metric_error(eline, kv[0] + ": " + be.what());
    }
  }
  if (spec.stress != StressType::vacuum && !spec.rho)
    throw metric_error(line, "non-vacuum stress requires rho");

  return spec;
}

inline MetricSpec load_metric_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw metric_error(0, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  MetricSpec spec = parse_metric(ss.str());
  if (spec.label.empty()) {
    std::size_t slash = path.find_last_of("/\\");
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    std::size_t dot = base.find_last_of('.');
    spec.label = dot == std::string::npos ? base : base.substr(0, dot);
  }
  return spec;
}

}  // namespace stal
