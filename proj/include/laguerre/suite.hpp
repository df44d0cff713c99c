#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "laguerre/checks.hpp"
#include "laguerre/config.hpp"
#include "laguerre/report.hpp"

namespace laguerre {

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"special", "kernel", "critical", "operators", "hardy", "all"};
  return names;
}

/// Files produced by a run, written only after every check has finished.
using Artifacts = std::map<std::string, std::string>;  // file name -> contents

enum class DumpKind { heat, riesz };

struct DumpParams {
  DumpKind kind = DumpKind::heat;
  double t = 0.5;            // heat only
  std::vector<int> k;        // riesz only; empty = e_1
  int points = -1;           // per axis; -1 = 40 (1-D), 8 (2-D), 4 (3-D)
};

namespace detail {

inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<double> dump_axis(double lo, double hi, int points) {
  std::vector<double> v(points);
  for (int i = 0; i < points; ++i) v[i] = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
  return v;
}

/// All points of the per-axis lattices of the config box, last axis fastest.
inline std::vector<std::vector<double>> dump_points(const SuiteConfig& c, int points) {
  std::vector<std::vector<double>> axes;
  for (std::size_t j = 0; j < c.dimension; ++j) axes.push_back(dump_axis(c.box_lower[j], c.box_upper[j], points));
  std::vector<std::vector<double>> out{{}};
  for (const auto& ax : axes) {
    std::vector<std::vector<double>> next;
    for (const auto& p : out)
      for (double v : ax) {
        next.push_back(p);
        next.back().push_back(v);
      }
    out = std::move(next);
  }
  return out;
}

inline std::string coordinate_header(std::size_t n, const char* name) {
  if (n == 1) return name;
  std::string s;
  for (std::size_t j = 0; j < n; ++j) s += (j ? "," : "") + std::string(name) + std::to_string(j + 1);
  return s;
}

inline void append_coordinates(std::string& row, const std::vector<double>& p) {
  for (double v : p) row += csv_number(v) + ",";
}

}  // namespace detail

/// Kernel sample grid as CSV text.
///  heat:  t,x...,y...,value,family       one row per (x, y) lattice pair
///  riesz: x...,y...,k,value,warning      diagonal rows keep their place but
///         leave `value` empty and say why in `warning`
inline std::string kernel_csv(const SuiteConfig& c, const DumpParams& p) {
  c.validate();
  const MultiOrder order = c.order();
  const int points = p.points > 0 ? p.points : (c.dimension == 1 ? 40 : c.dimension == 2 ? 8 : 4);
  const auto pts = detail::dump_points(c, points);
  const std::string xs = detail::coordinate_header(c.dimension, "x"), ys = detail::coordinate_header(c.dimension, "y");
  std::string out;
  if (p.kind == DumpKind::heat) {
    if (!(p.t > 0)) throw DomainError("dump: t must be > 0");
    const std::string family = "heat" + checks::detail::order_label(order);
    out = "t," + xs + "," + ys + ",value,family\n";
    for (const auto& x : pts)
      for (const auto& y : pts) {
        std::string row = detail::csv_number(p.t) + ",";
        detail::append_coordinates(row, x);
        detail::append_coordinates(row, y);
        out += row + detail::csv_number(kernel_nd(order, p.t, x, y)) + ",\"" + family + "\"\n";
      }
    return out;
  }
  std::vector<int> k = p.k;
  if (k.empty()) k.assign(c.dimension, 0), k[0] = 1;
  const RieszKernel kernel(order, k);
  const std::string key = "\"" + SpectralCoefficients::key(k) + "\"";
  out = xs + "," + ys + ",k,value,warning\n";
  for (const auto& x : pts)
    for (const auto& y : pts) {
      std::string row;
      detail::append_coordinates(row, x);
      detail::append_coordinates(row, y);
      if (x == y)
        out += row + key + ",,x=y: kernel is singular on the diagonal; value omitted\n";
      else
        out += row + key + "," + detail::csv_number(kernel(x, y)) + ",\n";
    }
  return out;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

/// Writes the dump into `dir` (config.out when empty); returns the file path.
inline std::filesystem::path dump_kernel(const SuiteConfig& c, const DumpParams& p, std::string dir = "") {
  const std::string text = kernel_csv(c, p);
  const std::filesystem::path path =
      std::filesystem::path(dir.empty() ? c.out : dir) / (p.kind == DumpKind::heat ? "heat_kernel.csv" : "riesz_kernel.csv");
  write_text_file(path, text);
  return path;
}

namespace detail {

inline void run_special(SuiteReport& r, const SuiteConfig& c, Artifacts&) {
  checks::bessel_oracle(r, c.tolerance("bessel.oracle", 5e-13));
  checks::bessel_identities(r, c.tolerance("bessel.difference_identity", 1e-12),
                            c.tolerance("bessel.derivative_identity", 1e-6), c.tolerance("bessel.small_z", 1e-4));
  checks::laguerre_rational_oracle(r, c.tolerance("laguerre.rational_oracle", 1e-12));
  std::vector<double> nus = c.nu;
  std::sort(nus.begin(), nus.end());
  nus.erase(std::unique(nus.begin(), nus.end()), nus.end());
  checks::laguerre_orthonormality(r, nus, 20, c.x_max, c.nodes_per_unit, c.tolerance("laguerre.orthonormality", 1e-10));
}

inline void run_kernel(SuiteReport& r, const SuiteConfig& c, Artifacts& a) {
  const MultiOrder order = c.order();
  checks::kernel_symmetry(r, order);
  checks::closed_vs_spectral(r, order, {0.25, 0.5, 1.0}, c.effective_k_max(), c.dimension <= 2 ? 20 : 5, 0.1, 2.5,
                             c.tolerance("heat.closed_vs_spectral", 1e-8), c.jobs);
  checks::semigroup_law(r, order, {0.1, 0.5}, c.nodes_per_unit, 8, c.seed, c.tolerance("heat.semigroup_law", 1e-6));
  checks::delta_vs_fd(r, c.nu, 100, c.seed, c.tolerance("heat.delta_vs_finite_differences", 1e-5));
  checks::heat_bound_fits(r, order, 10000, c.seed, c.jobs, {c.t_min, c.t_max, c.t_count});
  a["heat_kernel.csv"] = kernel_csv(c, DumpParams{DumpKind::heat, 0.5, {}, -1});
}

inline void run_critical(SuiteReport& r, const SuiteConfig& c, Artifacts& a) {
  const MultiOrder order = c.order();
  checks::slow_variation(r, order, c.box(), 10000, c.seed);
  const auto cov = build_covering(order, c.box());
  const auto chk = checks::covering(r, order, c.box());
  nlohmann::json balls = nlohmann::json::array();
  for (const auto& b : cov.balls()) balls.push_back(b);
  a["covering.json"] = nlohmann::json{{"box", {{"lower", c.box_lower}, {"upper", c.box_upper}}},
                                      {"check", chk},
                                      {"balls", balls}}
                           .dump(1) +
                       "\n";
}

inline void run_operators(SuiteReport& r, const SuiteConfig& c, Artifacts& a) {
  const MultiOrder order = c.order();
  std::vector<int> e1(c.dimension, 0);
  e1[0] = 1;
  checks::eigen_relation(r, order, 10, {0.1, 1.0}, c.x_max, c.nodes_per_unit, c.tolerance("heat.eigen_relation", 1e-6),
                         c.jobs);
  checks::riesz_contraction(r, order, 200, c.seed, c.effective_k_max());
  checks::riesz_bound_fits(r, order, e1, 10000, c.seed, c.jobs, {c.t_min, c.t_max, c.t_count});
  // lattice pairs grow like points^(2n): 2-D and 3-D use the largest affordable lattices
  checks::calderon_zygmund(r, order, e1, c.dimension == 1 ? 40 : c.dimension == 2 ? 5 : 2, c.seed, c.jobs,
                           c.tolerance("riesz.cz_size", 0.05));
  nlohmann::json table = nlohmann::json::object();
  for (const auto& [key, m] : riesz_multiplier_table(order, e1, c.effective_k_max())) table[key] = m;
  a["riesz_multipliers.json"] = nlohmann::json{{"k", e1}, {"multipliers", table}}.dump(1) + "\n";
  a["riesz_kernel.csv"] = kernel_csv(c, DumpParams{DumpKind::riesz, 0.5, e1, -1});
}

inline void run_hardy(SuiteReport& r, const SuiteConfig& c, Artifacts& a) {
  const MultiOrder order = c.order();
  const double pc = critical_exponent(order);
  std::vector<double> ps;
  for (double p : {0.8, 0.9, 1.0})
    if (p > pc) ps.push_back(p);
  nlohmann::json library = nlohmann::json::array();
  for (double p : ps)
    for (const auto& atom : checks::atom_library(r, order, c.box(), p, 10, c.seed)) library.push_back(atom);
  a["atoms.json"] = nlohmann::json{{"nu", c.nu}, {"atoms", library}}.dump() + "\n";
  for (double p : ps)
    if (p != 0.9) checks::atom_maximal_bound(r, order, c.box(), p, 50, c.seed, 40, c.jobs);
  checks::duality_bound(r, order, c.box(), ps.front() <= 0.9 ? 0.9 : 1.0, 100, c.seed, c.jobs);
}

}  // namespace detail

/// Runs the named suite ("all" runs every module suite in order). Checks that
/// throw are recorded as failures, so a report is always complete.
inline SuiteReport run_suite(const SuiteConfig& c, const std::string& suite, Artifacts* artifacts = nullptr) {
  c.validate();
  if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
    throw UsageError("unknown suite '" + suite + "' (expected special, kernel, critical, operators, hardy or all)");
  using Runner = void (*)(SuiteReport&, const SuiteConfig&, Artifacts&);
  const std::vector<std::pair<std::string, Runner>> all{{"special", detail::run_special},
                                                        {"kernel", detail::run_kernel},
                                                        {"critical", detail::run_critical},
                                                        {"operators", detail::run_operators},
                                                        {"hardy", detail::run_hardy}};
  SuiteReport rep;
  rep.suite_id = suite;
  rep.config = c;
  Artifacts local;
  Artifacts& out = artifacts ? *artifacts : local;
  for (const auto& [name, run] : all) {
    if (suite != "all" && suite != name) continue;
    const Stopwatch sw;
    try {
      run(rep, c, out);
    } catch (const std::exception& e) {
      rep.checks.push_back({name + ".error", false, std::numeric_limits<double>::quiet_NaN(),
                            std::numeric_limits<double>::quiet_NaN(), e.what(), sw.seconds()});
    }
    rep.timings[name] = sw.seconds();
  }
  for (const auto& [file, text] : out) rep.artifacts.push_back(file);
  return rep;
}

/// Runs the suite and writes report_<suite>.json plus its artifacts to `dir`.
inline SuiteReport run_suite_to(const SuiteConfig& c, const std::string& suite, const std::string& dir) {
  Artifacts artifacts;
  SuiteReport rep = run_suite(c, suite, &artifacts);
  for (const auto& [file, text] : artifacts) write_text_file(std::filesystem::path(dir) / file, text);
  write_text_file(std::filesystem::path(dir) / ("report_" + suite + ".json"), nlohmann::json(rep).dump(2) + "\n");
  return rep;
}

}  // namespace laguerre
