#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <unistd.h>

#include "kef/experiments.hpp"

using namespace kef;
using namespace kef::exp;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& tag) {
  auto p = fs::temp_directory_path() / ("kef-unit-" + std::to_string(::getpid()) + "-" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

SuiteReport toy_report() {
  SuiteReport r;
  r.suite = "toy";
  SuiteConfig c;
  c.suite = "witness";
  r.config = config_to_json(c);
  CaseRecord a;
  a.id = "toy-000";
  a.inputs = {{"model", "sphere"}, {"index", 0}};
  a.value("x", 0.1 + 0.2);
  a.value("missing", std::numeric_limits<double>::quiet_NaN());
  a.residual("r", 3e-12, 1e-10);
  a.margin("m", -1e-300, -1e-10);
  Series s;
  s.columns = {"t", "c_t", "I-J", "E_0", "E_1", "F", "extra"};
  s.rows = {{0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0}, {0.5, -1.0, 1.0 / 3.0, 1e-17, 1e300, -0.0, 7.0}};
  a.series.emplace_back("trajectory", s);
  CaseRecord b;
  b.id = "toy-001";
  b.diagnostic = "SolverError: no convergence";
  r.cases = {a, b};
  return r;
}

}  // namespace

TEST_CASE("config text sets typed keys and rejects unknown ones") {
  SuiteConfig c;
  load_config_text(c,
                   "# comment\n"
                   "[run]\n"
                   "seed = 99\n"
                   "output_dir = \"out # not a comment\"\n"
                   "[model]\n"
                   "sphere_l = 32  # trailing\n"
                   "[identity]\n"
                   "toric = false\n"
                   "[tolerances]\n"
                   "identity_sphere = 2.5e-8\n",
                   "inline");
  CHECK(c.seed == 99u);
  CHECK(c.output_dir == "out # not a comment");
  CHECK(c.sphere_l == 32);
  CHECK_FALSE(c.identity_toric);
  CHECK(c.tol.identity_sphere == 2.5e-8);

  CHECK_THROWS_AS(load_config_text(c, "[mto]\nbogus = 1\n", "x"), ConfigError);
  CHECK_THROWS_AS(set_key(c, "model.sphere_l", "12abc"), ConfigError);
  CHECK_THROWS_AS(set_key(c, "identity.toric", "maybe"), ConfigError);
  CHECK_THROWS_AS(load_config_text(c, "[run\n", "x"), ConfigError);
  CHECK_THROWS_AS(load_config_text(c, "seed 3\n", "x"), ConfigError);
  CHECK_THROWS_AS(load_config_file(c, "/nonexistent/kef.toml"), ConfigError);

  set_key(c, "model.sphere_l", "40");
  CHECK(c.sphere_l == 40);
  try {
    set_key(c, "mto.bogus", "1");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("mto.bogus") != std::string::npos);
  }
}

TEST_CASE("every registered key round trips through config_to_json") {
  SuiteConfig c;
  auto j = config_to_json(c);
  std::size_t n = 0;
  for (auto& [k, ref] : config_keys(c)) {
    (void)ref;
    CHECK(k.find('.') != std::string::npos);
    CHECK(j.contains(k));
    ++n;
  }
  CHECK(n > 40);
}

TEST_CASE("validate rejects out-of-range values") {
  SuiteConfig c;
  c.suite = "identity";
  CHECK_NOTHROW(validate(c));
  c.toric_n = 4;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = SuiteConfig{};
  c.suite = "nope";
  CHECK_THROWS_AS(run_suite(c), ConfigError);
  c = SuiteConfig{};
  c.suite = "mto";
  c.format = "xml";
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("worker resolution") {
  CHECK(resolve_workers(3) == 3);
  ::setenv("KEF_WORKERS", "5", 1);
  CHECK(resolve_workers(0) == 5);
  ::setenv("KEF_WORKERS", "zero", 1);
  CHECK_THROWS_AS(resolve_workers(0), ConfigError);
  ::unsetenv("KEF_WORKERS");
  CHECK(resolve_workers(0) >= 1);
}

TEST_CASE("parallel_for fills every slot once and rethrows the first error") {
  for (int w : {1, 2, 7}) {
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), w, [&](std::size_t i) { hits[i] += int(i); });
    for (std::size_t i = 0; i < hits.size(); ++i) CHECK(hits[i] == int(i));
  }
  std::atomic<int> ran{0};
  try {
    parallel_for(20, 4, [&](std::size_t i) {
      ++ran;
      if (i == 3 || i == 11) throw SolverError("case " + std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const SolverError& e) {
    CHECK(std::string(e.what()) == "case 3");
  }
  CHECK(ran == 20);
}

TEST_CASE("derived seeds separate streams and indices") {
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
  CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
}

TEST_CASE("relative residual and t1") {
  CHECK(relative_residual(0.0, 0.0, 0.0) == 0.0);
  CHECK(relative_residual(1.0, 1.5, 0.0) == doctest::Approx(1.0 / 3.0));
  CHECK(relative_residual(1e-9, 2e-9, 1.0) == doctest::Approx(1e-9));
  CHECK(continuity_t1(1) == 0.0);
  CHECK(continuity_t1(2) == 0.0);
  CHECK(continuity_t1(3) == doctest::Approx(0.25).epsilon(1e-12));
  // at t1 for n = 3 the binding term j = 1 is exactly n
  double t = continuity_t1(3);
  CHECK((1 - t) * 2 * 2 == doctest::Approx(3.0));
}

TEST_CASE("report JSON round trip preserves every number") {
  auto r = toy_report();
  auto back = report_from_json(Json::parse(to_json(r).dump()));
  std::string diff;
  CHECK(same_numbers(r, back, &diff));
  CHECK(diff.empty());
  CHECK(std::isnan(back.cases[0].values[1].second));
  CHECK(back.cases[1].diagnostic == r.cases[1].diagnostic);
  CHECK_FALSE(back.cases[1].pass());
  CHECK(back.cases[0].pass());

  auto s = r.summary();
  CHECK(s.cases == 2);
  CHECK(s.passed == 1);
  CHECK_FALSE(s.pass);

  auto changed = r;
  changed.cases[0].residuals[0].value = std::nextafter(3e-12, 1.0);
  CHECK_FALSE(same_numbers(r, changed, &diff));
  CHECK(diff.find("toy-000") != std::string::npos);

  auto timed = r;
  timed.timing["wall_seconds"] = 12.0;
  timed.environment["workers"] = 8;
  timed.config["run.workers"] = 8;
  CHECK(same_numbers(r, timed));
}

TEST_CASE("write_report and read_report agree") {
  auto dir = scratch_dir("report");
  SuiteConfig c;
  c.output_dir = dir.string();
  auto r = toy_report();
  auto path = write_report(r, c);
  CHECK(fs::exists(path));
  CHECK(fs::exists(dir / "index.json"));
  auto back = read_report(path);
  CHECK(same_numbers(r, back));
  auto csv = fs::path(path).replace_extension(".csv");
  REQUIRE(fs::exists(csv));
  CHECK(slurp(csv).rfind("case,field,name,value,bound,pass\n", 0) == 0);
  auto series = fs::path(path).replace_extension("").string() + ".toy-000.trajectory.csv";
  CHECK(fs::exists(series));
  auto second = write_report(r, c);
  CHECK(second != path);
  for (auto& e : fs::directory_iterator(dir / "toy"))
    CHECK(e.path().extension() != ".tmp");
  fs::remove_all(dir);
}

TEST_CASE("write_atomic replaces content") {
  auto dir = scratch_dir("atomic");
  auto p = (dir / "f.txt").string();
  write_atomic(p, "one");
  write_atomic(p, "two");
  CHECK(slurp(p) == "two");
  write_atomic((dir / "nested" / "g.txt").string(), "x");
  CHECK(slurp(dir / "nested" / "g.txt") == "x");
  CHECK_FALSE(fs::exists(dir / "f.txt.tmp"));
  fs::remove_all(dir);
}

TEST_CASE("plot data columns") {
  auto dir = scratch_dir("plot");
  auto r = toy_report();
  auto files = emit_plot_data(r, "continuity", dir.string());
  REQUIRE(files.size() == 1);
  auto text = slurp(files[0]);
  CHECK(text.rfind("# t c_t I-J E_0 E_1 F\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);

  auto empty = emit_plot_data(r, "witness", dir.string());
  REQUIRE(empty.size() == 1);
  CHECK(slurp(empty[0]) == "# b I E_n\n");
  CHECK_THROWS_AS(emit_plot_data(r, "histogram", dir.string()), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("a small suite does not depend on the worker count") {
  SuiteConfig c;
  c.suite = "mto";
  c.sphere_l = 24;
  c.mto_samples = 6;
  c.mto_members = 2;
  c.mobius_cases = 3;
  c.workers = 1;
  auto a = run_suite(c);
  c.workers = 3;
  auto b = run_suite(c);
  std::string diff;
  CHECK(same_numbers(a, b, &diff));
  CHECK(diff.empty());
  CHECK(a.pass());
}
