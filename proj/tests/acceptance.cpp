// Acceptance suite: one PASS/FAIL line per criterion. A criterion passes when
// every check it runs passes and it finishes within its time limit.
//
//   acceptance [--only N[,M...]] [--jobs N] [--json PATH] [--verbose]

#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "laguerre/checks.hpp"

using namespace laguerre;
namespace ck = laguerre::checks;

namespace {

struct Criterion {
  int id;
  std::string title;
  double limit_seconds;
  std::function<void(SuiteReport&, int jobs)> run;
};

using V = std::vector<double>;
using I = std::vector<int>;

const Box box_1d{{0.5}, {2.0}}, box_2d{{0.5, 0.5}, {2.0, 2.0}};
const Box atom_box_1d{{0.2}, {3.0}};

std::vector<Criterion> criteria() {
  return {
      {1, "eigen relation of the heat semigroup", 5,
       [](SuiteReport& r, int jobs) {
         for (double nu : {-0.5, 0.0, 1.3}) ck::eigen_relation(r, MultiOrder({nu}), 10, {0.1, 1.0}, 14.0, 64, 1e-6, jobs);
       }},
      {2, "closed-form vs spectral heat kernel", 30,
       [](SuiteReport& r, int jobs) {
         for (V nu : {V{-0.5}, V{0.0}, V{1.3}})
           ck::closed_vs_spectral(r, MultiOrder(nu), {0.25, 0.5, 1.0}, 60, 20, 0.1, 2.5, 1e-8, jobs);
         ck::closed_vs_spectral(r, MultiOrder({-0.5, 0.5}), {0.25, 0.5, 1.0}, 40, 20, 0.1, 2.5, 1e-8, jobs);
       }},
      {3, "semigroup law under quadrature", 60,
       [](SuiteReport& r, int) {
         for (V nu : {V{-0.5}, V{0.5}, V{1.3}, V{0.0, 0.5}, V{-0.5, 1.0}})
           ck::semigroup_law(r, MultiOrder(nu), {0.1, 0.5}, 64, 8, 1, 1e-6);
       }},
      {4, "Bessel identities", 2, [](SuiteReport& r, int) { ck::bessel_identities(r); }},
      {5, "delta-derivative kernels vs finite differences", 10,
       [](SuiteReport& r, int) { ck::delta_vs_fd(r, {-0.5, 0.0, 1.3}, 100, 1, 1e-5); }},
      {6, "bound-fit suite (heat and Riesz families)", 300,
       [](SuiteReport& r, int jobs) {
         for (V nu : {V{-0.5}, V{0.0}, V{0.5}, V{1.3}, V{-0.5, 0.5}, V{0.3, 1.0}})
           ck::heat_bound_fits(r, MultiOrder(nu), 10000, 1, jobs);
         ck::riesz_bound_fits(r, MultiOrder({-0.5}), I{1}, 10000, 1, jobs);
         ck::riesz_bound_fits(r, MultiOrder({0.5}), I{1}, 10000, 1, jobs);
         ck::riesz_bound_fits(r, MultiOrder({0.0, 0.5}), I{1, 0}, 10000, 1, jobs);
       }},
      {7, "spectral Riesz contraction", 10,
       [](SuiteReport& r, int) {
         for (V nu : {V{-0.5}, V{0.0}, V{1.5}, V{0.0, -0.5}, V{0.5, 0.5}})
           ck::riesz_contraction(r, MultiOrder(nu), 200, 1);
       }},
      {8, "Calderon-Zygmund size and smoothness", 180,
       [](SuiteReport& r, int jobs) {
         for (double nu : {0.0, 0.5, 1.0}) ck::calderon_zygmund(r, MultiOrder({nu}), I{1}, 40, 3, jobs);
       }},
      {9, "uniform maximal bound on atoms", 120,
       [](SuiteReport& r, int jobs) {
         for (double p : {0.8, 1.0}) {
           ck::atom_maximal_bound(r, MultiOrder({0.5}), atom_box_1d, p, 50, 1, 40, jobs);
           ck::atom_maximal_bound(r, MultiOrder({0.5, 0.5}), box_2d, p, 50, 1, 40, jobs);
         }
       }},
      {10, "duality pairing bound", 120,
       [](SuiteReport& r, int jobs) {
         ck::duality_bound(r, MultiOrder({0.5}), atom_box_1d, 0.9, 100, 1, jobs);
         ck::duality_bound(r, MultiOrder({0.5, 0.5}), box_2d, 0.9, 100, 1, jobs);
       }},
      {11, "slow variation of the critical function", 2,
       [](SuiteReport& r, int) {
         for (double nu : {-0.5, 0.0, 0.5, 1.3}) ck::slow_variation(r, MultiOrder({nu}), box_1d, 10000, 1);
         for (V nu : {V{-0.5, 0.5}, V{0.3, 1.0}}) ck::slow_variation(r, MultiOrder(nu), box_2d, 10000, 1);
       }},
      {12, "covering invariants", 10,
       [](SuiteReport& r, int) {
         ck::covering(r, MultiOrder({0.5}), box_1d);
         ck::covering(r, MultiOrder({0.5, 0.5}), box_2d);
       }},
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria, one PASS/FAIL line each"};
  std::vector<int> only;
  int jobs = 1;
  std::string json_path;
  bool verbose = false;
  app.add_option("--only", only, "run only these criteria")->delimiter(',');
  app.add_option("--jobs", jobs, "worker threads for data-parallel sweeps")->check(CLI::PositiveNumber);
  app.add_option("--json", json_path, "write every criterion's SuiteReport to this file");
  app.add_flag("--verbose", verbose, "print every check");
  CLI11_PARSE(app, argc, argv);

  const std::set<int> selected(only.begin(), only.end());
  nlohmann::json all = nlohmann::json::array();
  bool ok = true;
  for (const auto& c : criteria()) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    SuiteReport rep;
    rep.suite_id = "acceptance." + std::to_string(c.id);
    const Stopwatch sw;
    std::string error;
    try {
      c.run(rep, jobs);
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs = sw.seconds();
    rep.timings["total"] = secs;
    const bool in_time = secs < c.limit_seconds;
    const bool pass = error.empty() && !rep.checks.empty() && rep.passed() && in_time;
    ok = ok && pass;
    std::printf("%s %2d  %-48s %8.2f s (limit %g s)\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(), secs,
                c.limit_seconds);
    if (!error.empty()) std::printf("       error: %s\n", error.c_str());
    if (!in_time) std::printf("       over the time limit\n");
    for (const auto& chk : rep.checks)
      if (verbose || !chk.passed)
        std::printf("       %s %s value=%.6g %s\n", chk.passed ? "ok  " : "FAIL", chk.name.c_str(), chk.value,
                    chk.detail.c_str());
    std::fflush(stdout);
    all.push_back(rep);
  }
  if (!json_path.empty()) std::ofstream(json_path) << all.dump(2) << "\n";
  return ok ? 0 : 1;
}
