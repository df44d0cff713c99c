#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "laguerre/report.hpp"
#include "laguerre/suite.hpp"

using namespace laguerre;
namespace fs = std::filesystem;

namespace {

const std::string cli = LAGUERRE_VERIFY_PATH;
const fs::path golden_dir = LAGUERRE_GOLDEN_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("laguerre_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct Result {
  int status;
  std::string out;
};

Result run(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "stdout.txt";
  const int raw = std::system((cli + " " + args + " > " + log.string() + " 2>&1").c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(log)};
}

// Same structure and strings; numbers equal to 1e-9 relative (1e-12 absolute
// for rounding-level values).
bool same_json(const nlohmann::json& a, const nlohmann::json& b, std::string path, std::string& why) {
  if (a.is_number() && b.is_number()) {
    const double x = a.get<double>(), y = b.get<double>();
    if (std::fabs(x - y) <= 1e-9 * std::max(std::fabs(x), std::fabs(y)) + 1e-12) return true;
    why = path + ": " + a.dump() + " vs " + b.dump();
    return false;
  }
  if (a.type() != b.type()) {
    why = path + ": type differs";
    return false;
  }
  if (a.is_object()) {
    if (a.size() != b.size()) {
      why = path + ": key sets differ";
      return false;
    }
    for (const auto& [k, v] : a.items())
      if (!b.contains(k) || !same_json(v, b.at(k), path + "." + k, why)) {
        if (why.empty()) why = path + "." + k + ": missing";
        return false;
      }
    return true;
  }
  if (a.is_array()) {
    if (a.size() != b.size()) {
      why = path + ": array length differs";
      return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!same_json(a[i], b[i], path + "[" + std::to_string(i) + "]", why)) return false;
    return true;
  }
  if (a != b) why = path + ": " + a.dump() + " vs " + b.dump();
  return a == b;
}

// Golden comparison of a report with its wall-clock fields removed; the output
// directory differs between runs and is not part of the comparison either.
void check_golden(const fs::path& produced, const std::string& golden_name) {
  nlohmann::json got = strip_timings(nlohmann::json::parse(slurp(produced)));
  got["config"].erase("out");
  const fs::path golden = golden_dir / golden_name;
  if (std::getenv("LAGUERRE_UPDATE_GOLDEN")) std::ofstream(golden) << got.dump(2) << "\n";
  REQUIRE(fs::exists(golden));
  std::string why;
  INFO(golden_name << ": " << why);
  const bool same = same_json(got, nlohmann::json::parse(slurp(golden)), "", why);
  INFO(why);
  REQUIRE(same);
}

}  // namespace

TEST_CASE("config text round-trips losslessly", "[config]") {
  SuiteConfig c = SuiteConfig::defaults(2);
  c.nu = {0.1, -0.5};
  c.x_max = 12.5;
  c.t_min = 1.0 / 3.0;
  c.seed = 123456789012345ull;
  c.tolerances["heat.semigroup_law"] = 2.5e-7;
  c.out = "some dir/x";
  REQUIRE(parse_config(to_text(c)) == c);
  REQUIRE(parse_config(to_text(SuiteConfig::defaults(1))) == SuiteConfig::defaults(1));
  REQUIRE(parse_config("") == SuiteConfig::defaults(1));
  const auto d = parse_config("# comment\n dimension = 2 \nnu = [0.5, 1]  # trailing\n");
  REQUIRE(d.dimension == 2);
  REQUIRE(d.box_lower.size() == 2);
  REQUIRE(d.nu == std::vector<double>{0.5, 1.0});
}

TEST_CASE("config errors name the offending field", "[config]") {
  auto field_of = [](const std::string& text) {
    try {
      parse_config(text).validate();
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  REQUIRE(field_of("nu = [-0.7]") == "nu");
  REQUIRE(field_of("nu = [0.5, 0.5]") == "nu");
  REQUIRE(field_of("nu = [abc]") == "nu");
  REQUIRE(field_of("x_max = 1e400x") == "x_max");
  REQUIRE(field_of("colour = 3") == "colour");
  REQUIRE(field_of("seed = 1.5") == "seed");
  REQUIRE(field_of("box_lower = [0.0]") == "box_lower");
  REQUIRE(field_of("box_upper = [0.2]") == "box_upper");
  REQUIRE(field_of("t_max = 0.001") == "t_max");
  REQUIRE(field_of("nodes_per_unit = 20") == "nodes_per_unit");
  REQUIRE(field_of("jobs = 0") == "jobs");
  REQUIRE(field_of("out = unquoted") == "out");
  REQUIRE(field_of("tolerance.x = -1") == "tolerance.x");
  REQUIRE(field_of("just words") == "line 1");
  REQUIRE(field_of("dimension = 4") == "dimension");
  REQUIRE(field_of("nu = [0.25]") == "<none>");
}

TEST_CASE("reports serialize to JSON", "[report]") {
  BoundFitReport r;
  r.family_id = "demo";
  r.fitted_C = 2.5;
  r.n_samples = 10;
  r.extras["min_decay_c"] = 3.0;
  r.violations.push_back(Violation{Sample{0.5, {1.0}, {2.0}}, 7.0, "too big"});
  const nlohmann::json j = r;
  REQUIRE(j.at("fixed_c").is_null());  // NaN
  REQUIRE(j.at("passed") == false);
  const auto back = j.get<BoundFitReport>();
  REQUIRE(back.family_id == "demo");
  REQUIRE(back.violations.size() == 1);
  REQUIRE(back.violations[0].sample.y == std::vector<double>{2.0});
  REQUIRE(std::isnan(back.fixed_c));
  REQUIRE(back.extras.at("min_decay_c") == 3.0);

  const MultiOrder order({0.5});
  const Atom a = random_atom(order, Ball{{1.0}, 0.05}, 0.9, 4);
  const Atom b = nlohmann::json(a).get<Atom>();
  REQUIRE(b.values.values == a.values.values);
  REQUIRE(b.values.grid.axes[0].weights == a.values.grid.axes[0].weights);
  REQUIRE(b.ball.center == a.ball.center);
  REQUIRE(check_atom(b, order).valid());

  SuiteReport s;
  s.suite_id = "x";
  s.checks.push_back({"c", true, 1.0, 2.0, "d", 0.1});
  s.timings["x"] = 0.1;
  const nlohmann::json sj = s;
  for (const char* key : {"schema_version", "version", "suite_id", "passed", "seed", "checks", "bound_fit_reports",
                          "norm_reports", "timings", "config", "artifacts"})
    REQUIRE(sj.contains(key));
  const auto stripped = strip_timings(sj);
  REQUIRE(!stripped.contains("timings"));
  REQUIRE(!stripped["checks"][0].contains("seconds"));
}

TEST_CASE("run_suite records thrown checks as failures", "[suite]") {
  SuiteConfig c = SuiteConfig::defaults(1);
  c.tolerances["bessel.oracle"] = 1e-30;
  const auto rep = run_suite(c, "special");
  REQUIRE(!rep.passed());
  REQUIRE(rep.checks.size() == 7);
  REQUIRE_THROWS_AS(run_suite(c, "nonsense"), UsageError);
  c.nu = {-1.0};
  REQUIRE_THROWS_AS(run_suite(c, "all"), ConfigError);
}

TEST_CASE("CLI run: reports, exit status and golden files", "[cli]") {
  const fs::path dir = scratch("run");
  const auto special = run("run --suite special --out " + (dir / "special").string(), dir);
  INFO(special.out);
  REQUIRE(special.status == 0);
  REQUIRE(special.out.find("FAIL") == std::string::npos);
  check_golden(dir / "special" / "report_special.json", "report_special.json");

  const auto critical = run("run --suite critical --seed 7 --out " + (dir / "critical").string(), dir);
  REQUIRE(critical.status == 0);
  check_golden(dir / "critical" / "report_critical.json", "report_critical.json");
  const auto rep = nlohmann::json::parse(slurp(dir / "critical" / "report_critical.json"));
  REQUIRE(rep.at("seed") == 7);  // flag overrides the config
  REQUIRE(rep.at("config").at("seed") == 7);
  REQUIRE(fs::exists(dir / "critical" / "covering.json"));

  // a failing check still writes the full report and exits 1
  std::ofstream(dir / "strict.toml") << "tolerance.bessel.oracle = 1e-30\n";
  const auto strict = run("run --suite special --config " + (dir / "strict.toml").string() + " --out " +
                              (dir / "strict").string(),
                          dir);
  REQUIRE(strict.status == 1);
  const auto srep = nlohmann::json::parse(slurp(dir / "strict" / "report_special.json"));
  REQUIRE(srep.at("passed") == false);
  REQUIRE(srep.at("checks").size() == 7);
}

TEST_CASE("CLI rejects invalid configs before writing anything", "[cli]") {
  const fs::path dir = scratch("invalid");
  std::ofstream(dir / "bad.toml") << "nu = [-0.7]\n";
  const auto r = run("run --suite all --config " + (dir / "bad.toml").string() + " --out " + (dir / "out").string(), dir);
  REQUIRE(r.status == 2);
  REQUIRE(r.out.find("'nu'") != std::string::npos);
  REQUIRE(!fs::exists(dir / "out"));
  REQUIRE(run("run --suite bogus", dir).status != 0);
  REQUIRE(run("config-check --config " + (dir / "missing.toml").string(), dir).status == 3);
  REQUIRE(run("run --suite special --jobs 0 --out " + (dir / "out").string(), dir).status == 2);
  REQUIRE(!fs::exists(dir / "out"));
}

TEST_CASE("CLI config-check prints the normalized config", "[cli]") {
  const fs::path dir = scratch("check");
  std::ofstream(dir / "c.toml") << "dimension = 2\nnu = [0, 1]\n";
  const auto r = run("config-check --config " + (dir / "c.toml").string() + " --seed 5", dir);
  REQUIRE(r.status == 0);
  SuiteConfig want = SuiteConfig::defaults(2);
  want.nu = {0.0, 1.0};
  want.seed = 5;
  REQUIRE(parse_config(r.out) == want);
}

TEST_CASE("CLI dump: schema, size, determinism and errors", "[cli][dump]") {
  const fs::path dir = scratch("dump");
  REQUIRE(run("dump --kind heat --t 0.5 --out " + (dir / "a").string(), dir).status == 0);
  REQUIRE(run("dump --kind heat --t 0.5 --out " + (dir / "b").string(), dir).status == 0);
  const std::string a = slurp(dir / "a" / "heat_kernel.csv");
  REQUIRE(a == slurp(dir / "b" / "heat_kernel.csv"));  // byte-identical
  std::istringstream lines(a);
  std::string header, line;
  std::getline(lines, header);
  REQUIRE(header == "t,x,y,value,family");
  std::size_t rows = 0;
  while (std::getline(lines, line)) ++rows;
  REQUIRE(rows == 40 * 40);

  std::ofstream(dir / "two.toml") << "dimension = 2\nnu = [0.5, -0.5]\n";
  REQUIRE(run("dump --kind riesz --k 1,0 --points 3 --config " + (dir / "two.toml").string() + " --out " +
                  (dir / "r").string(),
              dir)
              .status == 0);
  const std::string r = slurp(dir / "r" / "riesz_kernel.csv");
  if (std::getenv("LAGUERRE_UPDATE_GOLDEN")) std::ofstream(golden_dir / "riesz_kernel_2d.csv") << r;
  REQUIRE(r == slurp(golden_dir / "riesz_kernel_2d.csv"));
  REQUIRE(r.rfind("x1,x2,y1,y2,k,value,warning\n", 0) == 0);
  REQUIRE(r.find("\"1,0\",,x=y") != std::string::npos);

  const auto small = run("dump --kind heat --points 4 --out " + (dir / "s").string(), dir);
  REQUIRE(small.status == 0);
  const std::string s = slurp(dir / "s" / "heat_kernel.csv");
  if (std::getenv("LAGUERRE_UPDATE_GOLDEN")) std::ofstream(golden_dir / "heat_kernel_1d.csv") << s;
  REQUIRE(s == slurp(golden_dir / "heat_kernel_1d.csv"));

  REQUIRE(run("dump --out /proc/laguerre_cannot_write", dir).status == 3);
  REQUIRE(run("dump --kind riesz --k 1,x", dir).status == 2);
}
