#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "laguerre/critical_function.hpp"
#include "laguerre/errors.hpp"
#include "laguerre/special_functions.hpp"

namespace laguerre {

/// Raised for invalid configuration; the message names the offending field.
class ConfigError : public UsageError {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : UsageError("config field '" + field + "': " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Everything a suite run depends on. The text form is one `key = value` per
/// line (TOML subset: numbers, quoted strings, [a, b] arrays, # comments);
/// `tolerance.<check> = value` overrides a check tolerance.
struct SuiteConfig {
  std::size_t dimension = 1;
  std::vector<double> nu{0.5};
  std::vector<double> box_lower{0.5};
  std::vector<double> box_upper{3.0};
  double x_max = 14.0;         // quadrature grids cover [0, x_max]^n
  int nodes_per_unit = 64;     // Gauss-Legendre nodes per unit length
  double t_min = 0.01;         // bound-fit time range
  double t_max = 10.0;
  int t_count = 20;
  int k_max = -1;              // spectral truncation, -1 = 60 / 40 / 24 by dimension
  std::map<std::string, double> tolerances;
  unsigned long long seed = 1;
  int jobs = 1;
  std::string out = "laguerre_out";

  static SuiteConfig defaults(std::size_t n) {
    SuiteConfig c;
    c.dimension = n;
    c.nu.assign(n, 0.5);
    c.box_lower.assign(n, 0.5);
    c.box_upper.assign(n, 3.0);
    return c;
  }

  MultiOrder order() const { return MultiOrder(nu); }
  Box box() const { return Box{box_lower, box_upper}; }
  int effective_k_max() const { return k_max >= 0 ? k_max : (dimension == 1 ? 60 : dimension == 2 ? 40 : 24); }
  double tolerance(const std::string& check, double fallback) const {
    auto it = tolerances.find(check);
    return it == tolerances.end() ? fallback : it->second;
  }

  /// Checks every downstream constraint; throws ConfigError naming the field.
  void validate() const {
    if (dimension < 1 || dimension > 3) throw ConfigError("dimension", "must be 1, 2 or 3");
    if (nu.size() != dimension) throw ConfigError("nu", "needs exactly `dimension` components");
    for (double v : nu)
      if (!std::isfinite(v) || v < -0.5) throw ConfigError("nu", "components must be finite and >= -1/2");
    if (box_lower.size() != dimension) throw ConfigError("box_lower", "needs exactly `dimension` components");
    if (box_upper.size() != dimension) throw ConfigError("box_upper", "needs exactly `dimension` components");
    for (std::size_t j = 0; j < dimension; ++j) {
      if (!(box_lower[j] >= 0.05)) throw ConfigError("box_lower", "must stay >= 0.05 away from the boundary");
      if (!(box_upper[j] > box_lower[j])) throw ConfigError("box_upper", "must exceed box_lower on every axis");
      if (!(box_upper[j] < x_max)) throw ConfigError("box_upper", "must lie below x_max");
    }
    if (!(x_max > 0) || !std::isfinite(x_max)) throw ConfigError("x_max", "must be positive");
    if (nodes_per_unit < 16 || nodes_per_unit % 16) throw ConfigError("nodes_per_unit", "must be a positive multiple of 16");
    if (!(t_min > 0)) throw ConfigError("t_min", "must be > 0");
    if (!(t_max > t_min) || !std::isfinite(t_max)) throw ConfigError("t_max", "must exceed t_min");
    if (t_count < 1) throw ConfigError("t_count", "must be >= 1");
    if (k_max < -1 || k_max > 200) throw ConfigError("k_max", "must be -1 (default) or in [0, 200]");
    if (jobs < 1) throw ConfigError("jobs", "must be >= 1");
    if (out.empty()) throw ConfigError("out", "must not be empty");
    for (const auto& [k, v] : tolerances)
      if (!(v > 0) || !std::isfinite(v)) throw ConfigError("tolerance." + k, "must be a positive number");
  }

  bool operator==(const SuiteConfig&) const = default;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

inline std::string format_array(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
  return s + "]";
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline double parse_number(const std::string& field, const std::string& text) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(field, "expected a number, got '" + text + "'");
  }
  if (used != text.size()) throw ConfigError(field, "expected a number, got '" + text + "'");
  return v;
}

inline long long parse_integer(const std::string& field, const std::string& text) {
  const double v = parse_number(field, text);
  if (v != std::floor(v) || std::fabs(v) > 9e15) throw ConfigError(field, "expected an integer, got '" + text + "'");
  return (long long)v;
}

inline std::vector<double> parse_array(const std::string& field, const std::string& text) {
  if (text.size() < 2 || text.front() != '[' || text.back() != ']')
    throw ConfigError(field, "expected an array like [0.5, 1.0]");
  std::vector<double> out;
  std::stringstream ss(text.substr(1, text.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError(field, "empty array entry");
    out.push_back(parse_number(field, item));
  }
  return out;
}

inline std::string parse_string(const std::string& field, const std::string& text) {
  if (text.size() < 2 || text.front() != '"' || text.back() != '"') throw ConfigError(field, "expected a quoted string");
  return text.substr(1, text.size() - 2);
}

}  // namespace detail

/// Applies one `key = value` assignment.
inline void apply_setting(SuiteConfig& c, const std::string& key, const std::string& value) {
  using namespace detail;
  if (key == "dimension") {
    const long long n = parse_integer(key, value);
    if (n < 1) throw ConfigError(key, "must be >= 1");
    c.dimension = std::size_t(n);
  } else if (key == "nu") {
    c.nu = parse_array(key, value);
  } else if (key == "box_lower") {
    c.box_lower = parse_array(key, value);
  } else if (key == "box_upper") {
    c.box_upper = parse_array(key, value);
  } else if (key == "x_max") {
    c.x_max = parse_number(key, value);
  } else if (key == "nodes_per_unit") {
    c.nodes_per_unit = int(parse_integer(key, value));
  } else if (key == "t_min") {
    c.t_min = parse_number(key, value);
  } else if (key == "t_max") {
    c.t_max = parse_number(key, value);
  } else if (key == "t_count") {
    c.t_count = int(parse_integer(key, value));
  } else if (key == "k_max") {
    c.k_max = int(parse_integer(key, value));
  } else if (key == "seed") {
    const long long s = parse_integer(key, value);
    if (s < 0) throw ConfigError(key, "must be >= 0");
    c.seed = (unsigned long long)s;
  } else if (key == "jobs") {
    c.jobs = int(parse_integer(key, value));
  } else if (key == "out") {
    c.out = parse_string(key, value);
  } else if (key.rfind("tolerance.", 0) == 0 && key.size() > 10) {
    c.tolerances[key.substr(10)] = parse_number(key, value);
  } else {
    throw ConfigError(key, "unknown key");
  }
}

/// Parses the text form on top of `base` (the defaults for its dimension
/// unless given). A `dimension` line re-seeds the per-axis defaults, so it
/// must come before per-axis keys.
inline SuiteConfig parse_config(const std::string& text, SuiteConfig base = SuiteConfig::defaults(1)) {
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    const std::string key = detail::trim(line.substr(0, eq)), value = detail::trim(line.substr(eq + 1));
    if (key == "dimension") {
      SuiteConfig fresh = SuiteConfig::defaults(std::size_t(std::max(1LL, detail::parse_integer(key, value))));
      fresh.x_max = base.x_max, fresh.nodes_per_unit = base.nodes_per_unit, fresh.t_min = base.t_min;
      fresh.t_max = base.t_max, fresh.t_count = base.t_count, fresh.k_max = base.k_max;
      fresh.tolerances = base.tolerances, fresh.seed = base.seed, fresh.jobs = base.jobs, fresh.out = base.out;
      base = fresh;
    }
    apply_setting(base, key, value);
  }
  return base;
}

inline SuiteConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Text form; parse_config(to_text(c)) == c.
inline std::string to_text(const SuiteConfig& c) {
  using namespace detail;
  std::string s;
  s += "dimension = " + std::to_string(c.dimension) + "\n";
  s += "nu = " + format_array(c.nu) + "\n";
  s += "box_lower = " + format_array(c.box_lower) + "\n";
  s += "box_upper = " + format_array(c.box_upper) + "\n";
  s += "x_max = " + format_double(c.x_max) + "\n";
  s += "nodes_per_unit = " + std::to_string(c.nodes_per_unit) + "\n";
  s += "t_min = " + format_double(c.t_min) + "\n";
  s += "t_max = " + format_double(c.t_max) + "\n";
  s += "t_count = " + std::to_string(c.t_count) + "\n";
  s += "k_max = " + std::to_string(c.k_max) + "\n";
  s += "seed = " + std::to_string(c.seed) + "\n";
  s += "jobs = " + std::to_string(c.jobs) + "\n";
  s += "out = \"" + c.out + "\"\n";
  for (const auto& [k, v] : c.tolerances) s += "tolerance." + k + " = " + format_double(v) + "\n";
  return s;
}

}  // namespace laguerre
