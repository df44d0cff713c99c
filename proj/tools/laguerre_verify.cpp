// laguerre_verify: batch verification runs, kernel dumps and config checks.
//
// Exit status: 0 every check passed, 1 some check failed, 2 usage or config
// error, 3 I/O error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "laguerre/suite.hpp"

using namespace laguerre;

namespace {

struct CommonFlags {
  std::string config_path, out;
  std::optional<unsigned long long> seed;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "key = value config file (defaults below when omitted)");
  cmd->add_option("--out", f.out, "output directory (overrides `out`)");
  cmd->add_option("--seed", f.seed, "random seed (overrides `seed`)");
  cmd->add_option("--jobs", f.jobs, "worker threads for data-parallel sweeps (overrides `jobs`)");
}

/// Config file, then flag overrides, then validation: nothing is written
/// before this succeeds.
SuiteConfig resolve(const CommonFlags& f) {
  SuiteConfig c = f.config_path.empty() ? SuiteConfig::defaults(1) : load_config(f.config_path);
  if (!f.out.empty()) c.out = f.out;
  if (f.seed) c.seed = *f.seed;
  if (f.jobs) c.jobs = *f.jobs;
  c.validate();
  return c;
}

std::vector<int> parse_index(const std::string& text) {
  std::vector<int> k;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      k.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--k: expected a comma-separated multi-index like 1,0");
    }
  }
  return k;
}

std::string help_footer() {
  return "Config file format: one `key = value` per line, # comments, arrays as [a, b].\n"
         "`dimension` must precede per-axis keys; `tolerance.<check> = value` overrides a check tolerance.\n"
         "Defaults:\n" +
         to_text(SuiteConfig::defaults(1)) +
         "k_max = -1 selects 60 / 40 / 24 for dimension 1 / 2 / 3.\n"
         "Exit status: 0 all checks passed, 1 a check failed, 2 usage/config error, 3 I/O error.";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification suites for Laguerre heat kernels, Riesz transforms and Hardy/BMO norms"};
  app.footer(help_footer());
  app.require_subcommand(1);

  CommonFlags run_flags, dump_flags, check_flags;
  std::string suite = "all";
  auto* run = app.add_subcommand("run", "run a verification suite and write report_<suite>.json plus artifacts");
  run->add_option("--suite", suite, "special | kernel | critical | operators | hardy | all")
      ->check(CLI::IsMember(suite_names()))
      ->capture_default_str();
  add_common(run, run_flags);

  std::string kind = "heat", k_text;
  DumpParams params;
  auto* dump = app.add_subcommand("dump", "write a kernel sample grid as CSV");
  dump->add_option("--kind", kind, "heat | riesz")->check(CLI::IsMember({"heat", "riesz"}))->capture_default_str();
  dump->add_option("--t", params.t, "heat time")->capture_default_str();
  dump->add_option("--k", k_text, "Riesz multi-index, e.g. 1,0 (default e_1)");
  dump->add_option("--points", params.points, "lattice points per axis over the config box (default 40/8/4 by dimension)");
  add_common(dump, dump_flags);

  auto* check = app.add_subcommand("config-check", "validate a config and print its normalized form");
  add_common(check, check_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const SuiteConfig c = resolve(run_flags);
      const SuiteReport rep = run_suite_to(c, suite, c.out);
      for (const auto& chk : rep.checks)
        std::printf("%s %s  value=%.6g  %s\n", chk.passed ? "PASS" : "FAIL", chk.name.c_str(), chk.value,
                    chk.detail.c_str());
      std::size_t failed = 0;
      for (const auto& chk : rep.checks) failed += !chk.passed;
      std::printf("suite %s: %zu checks, %zu failed; report %s/report_%s.json\n", suite.c_str(), rep.checks.size(),
                  failed, c.out.c_str(), suite.c_str());
      return rep.passed() ? 0 : 1;
    }
    if (*dump) {
      const SuiteConfig c = resolve(dump_flags);
      params.kind = kind == "heat" ? DumpKind::heat : DumpKind::riesz;
      if (!k_text.empty()) params.k = parse_index(k_text);
      std::printf("%s\n", dump_kernel(c, params).string().c_str());
      return 0;
    }
    const SuiteConfig c = resolve(check_flags);
    std::cout << to_text(c);
    return 0;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
