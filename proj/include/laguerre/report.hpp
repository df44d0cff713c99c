#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "laguerre/bound_fit.hpp"
#include "laguerre/config.hpp"
#include "laguerre/critical_function.hpp"
#include "laguerre/hardy_bmo.hpp"

#ifndef LAGUERRE_VERSION
#define LAGUERRE_VERSION "0.0.0"
#endif

namespace laguerre {

inline constexpr int report_schema_version = 1;
inline std::string version_stamp() { return std::string("laguerre ") + LAGUERRE_VERSION; }

/// One pass/fail line of a suite: `value` is compared against `tolerance` in
/// the sense stated by `detail`.
struct CheckResult {
  std::string name;
  bool passed = false;
  double value = std::numeric_limits<double>::quiet_NaN();
  double tolerance = std::numeric_limits<double>::quiet_NaN();
  std::string detail;
  double seconds = 0;
};

struct SuiteReport {
  std::string suite_id;
  std::vector<CheckResult> checks;
  std::vector<BoundFitReport> bound_fits;
  std::vector<NormReport> norms;
  std::map<std::string, double> timings;  // seconds per check group
  SuiteConfig config;
  std::vector<std::string> artifacts;     // files written next to the report

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

/// Wall-clock stopwatch for check timings.
class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_;
};

namespace detail {
// NaN and infinities become null, which JSON can represent.
inline nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }
inline double number_from(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}
inline nlohmann::json number_map(const std::map<std::string, double>& m) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : m) j[k] = number(v);
  return j;
}
}  // namespace detail

inline constexpr std::size_t max_reported_violations = 20;

inline void to_json(nlohmann::json& j, const Sample& s) { j = {{"t", s.t}, {"x", s.x}, {"y", s.y}}; }
inline void from_json(const nlohmann::json& j, Sample& s) {
  s.t = j.at("t").get<double>();
  s.x = j.at("x").get<std::vector<double>>();
  s.y = j.at("y").get<std::vector<double>>();
}

inline void to_json(nlohmann::json& j, const BoundFitReport& r) {
  nlohmann::json v = nlohmann::json::array();
  for (std::size_t i = 0; i < r.violations.size() && i < max_reported_violations; ++i)
    v.push_back({{"sample", r.violations[i].sample},
                 {"ratio", detail::number(r.violations[i].ratio)},
                 {"reason", r.violations[i].reason}});
  j = {{"family_id", r.family_id},
       {"fitted_C", detail::number(r.fitted_C)},
       {"fixed_c", detail::number(r.fixed_c)},
       {"exponent_gamma", r.exponent_gamma},
       {"n_samples", r.n_samples},
       {"max_ratio", detail::number(r.max_ratio)},
       {"violation_count", r.violations.size()},
       {"violations", v},
       {"extras", detail::number_map(r.extras)},
       {"passed", r.passed()}};
}

inline void from_json(const nlohmann::json& j, BoundFitReport& r) {
  r.family_id = j.at("family_id").get<std::string>();
  r.fitted_C = detail::number_from(j.at("fitted_C"));
  r.fixed_c = detail::number_from(j.at("fixed_c"));
  r.exponent_gamma = j.at("exponent_gamma").get<double>();
  r.n_samples = j.at("n_samples").get<long>();
  r.max_ratio = detail::number_from(j.at("max_ratio"));
  r.violations.clear();
  for (const auto& v : j.at("violations"))
    r.violations.push_back({v.at("sample").get<Sample>(), detail::number_from(v.at("ratio")), v.at("reason")});
  r.extras.clear();
  for (const auto& [k, v] : j.at("extras").items()) r.extras[k] = detail::number_from(v);
}

inline void to_json(nlohmann::json& j, const Ball& b) { j = {{"center", b.center}, {"radius", b.radius}}; }
inline void from_json(const nlohmann::json& j, Ball& b) {
  b.center = j.at("center").get<std::vector<double>>();
  b.radius = j.at("radius").get<double>();
}

inline void to_json(nlohmann::json& j, const NormReport& r) {
  j = {{"kind", to_string(r.kind)},
       {"value", detail::number(r.value)},
       {"parameters", detail::number_map(r.parameters)},
       {"balls",
        {{"count", r.balls.balls},
         {"small", r.balls.small},
         {"large", r.balls.large},
         {"small_sup", detail::number(r.balls.small_sup)},
         {"large_sup", detail::number(r.balls.large_sup)},
         {"argmax", r.balls.argmax}}}};
}

inline void to_json(nlohmann::json& j, const CheckResult& c) {
  j = {{"name", c.name},
       {"passed", c.passed},
       {"value", detail::number(c.value)},
       {"tolerance", detail::number(c.tolerance)},
       {"detail", c.detail},
       {"seconds", c.seconds}};
}

inline nlohmann::json config_json(const SuiteConfig& c) {
  return {{"dimension", c.dimension},   {"nu", c.nu},           {"box_lower", c.box_lower},
          {"box_upper", c.box_upper},   {"x_max", c.x_max},     {"nodes_per_unit", c.nodes_per_unit},
          {"t_min", c.t_min},           {"t_max", c.t_max},     {"t_count", c.t_count},
          {"k_max", c.k_max},           {"seed", c.seed},       {"jobs", c.jobs},
          {"out", c.out},               {"tolerances", c.tolerances}};
}

inline void to_json(nlohmann::json& j, const SuiteReport& r) {
  j = {{"schema_version", report_schema_version},
       {"version", version_stamp()},
       {"suite_id", r.suite_id},
       {"passed", r.passed()},
       {"seed", r.config.seed},
       {"checks", r.checks},
       {"bound_fit_reports", r.bound_fits},
       {"norm_reports", r.norms},
       {"timings", detail::number_map(r.timings)},
       {"config", config_json(r.config)},
       {"artifacts", r.artifacts}};
}

/// Atoms round-trip exactly: grid axes (nodes and weights) plus values.
inline void to_json(nlohmann::json& j, const Atom& a) {
  nlohmann::json axes = nlohmann::json::array();
  for (const auto& ax : a.values.grid.axes) axes.push_back({{"nodes", ax.nodes}, {"weights", ax.weights}});
  j = {{"ball", a.ball}, {"p", a.p}, {"moment_order", a.moment_order}, {"axes", axes}, {"values", a.values.values}};
}

inline void from_json(const nlohmann::json& j, Atom& a) {
  a.ball = j.at("ball").get<Ball>();
  a.p = j.at("p").get<double>();
  a.moment_order = j.at("moment_order").get<int>();
  TensorGrid g;
  for (const auto& ax : j.at("axes")) {
    QuadratureRule q;
    q.nodes = ax.at("nodes").get<std::vector<double>>();
    q.weights = ax.at("weights").get<std::vector<double>>();
    g.axes.push_back(std::move(q));
  }
  g.validate();
  a.values = GridFunction(std::move(g), j.at("values").get<std::vector<double>>());
}

inline void to_json(nlohmann::json& j, const CoveringCheck& c) {
  j = {{"balls", c.balls},
       {"points", c.points},
       {"covers", c.covers},
       {"fifth_disjoint", c.fifth_disjoint},
       {"bumps_supported", c.bumps_supported},
       {"max_overlap", c.max_overlap},
       {"partition_error", c.partition_error},
       {"psi_min", c.psi_min},
       {"psi_max", c.psi_max},
       {"passed", c.passed()}};
}

/// Report with every wall-clock field removed; what golden files compare.
inline nlohmann::json strip_timings(nlohmann::json j) {
  j.erase("timings");
  if (j.contains("checks"))
    for (auto& c : j["checks"]) c.erase("seconds");
  return j;
}

}  // namespace laguerre
