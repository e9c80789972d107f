// kef-lab: runs the experiment suites and exports plot data.
//
// Exit codes: 0 all selected suites pass, 1 a suite failed or errored,
// 2 bad command line or configuration.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kef/experiments.hpp"

namespace {

using namespace kef::exp;

struct Overrides {
  std::string config_file;
  std::vector<std::string> sets;
  std::vector<std::string> tols;
  std::optional<int> grid_l, toric_points, samples, workers;
  std::optional<double> toric_box;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir, format;
};

void add_run_options(CLI::App* sub, Overrides& o) {
  sub->add_option("-c,--config", o.config_file, "TOML-style config file");
  sub->add_option("--set", o.sets, "Override any config key: section.key=value (repeatable)");
  sub->add_option("--tol", o.tols, "Override a tolerance: name=value (repeatable)");
  sub->add_option("--grid-l", o.grid_l, "Sphere degree cap L");
  sub->add_option("--toric-points", o.toric_points, "Toric quadrature points per axis");
  sub->add_option("--toric-box", o.toric_box, "Toric box half width");
  sub->add_option("--samples", o.samples, "Primary sample count of the suite");
  sub->add_option("--seed", o.seed, "Base seed");
  sub->add_option("-j,--workers", o.workers, "Worker threads (default: KEF_WORKERS or all cores)");
  sub->add_option("-o,--output-dir", o.output_dir, "Report directory");
  sub->add_option("--format", o.format, "json | csv | both")
      ->check(CLI::IsMember({"json", "csv", "both"}));
}

std::pair<std::string, std::string> split_assignment(const std::string& s, const char* flag) {
  auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0)
    throw kef::ConfigError(std::string(flag) + " expects name=value, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

const char* samples_key(const std::string& suite) {
  if (suite == "identity") return "identity.sphere_pairs";
  if (suite == "inequality") return "inequality.samples";
  if (suite == "mto") return "mto.samples";
  if (suite == "continuity") return "continuity.bases";
  if (suite == "witness") return "witness.steps";
  return nullptr;
}

SuiteConfig build_config(const std::string& suite, const Overrides& o) {
  SuiteConfig c;
  if (!o.config_file.empty()) load_config_file(c, o.config_file);
  c.suite = suite;
  for (const auto& s : o.sets) {
    auto [k, v] = split_assignment(s, "--set");
    set_key(c, k, v);
  }
  for (const auto& s : o.tols) {
    auto [k, v] = split_assignment(s, "--tol");
    set_key(c, "tolerances." + k, v);
  }
  if (o.grid_l) c.sphere_l = *o.grid_l;
  if (o.toric_points) c.toric_points = *o.toric_points;
  if (o.toric_box) c.toric_box = *o.toric_box;
  if (o.seed) c.seed = *o.seed;
  if (o.workers) c.workers = *o.workers;
  if (o.output_dir) c.output_dir = *o.output_dir;
  if (o.format) c.format = *o.format;
  if (o.samples) {
    const char* key = samples_key(suite);
    if (!key) throw kef::ConfigError("--samples does not apply to the " + suite + " suite");
    set_key(c, key, std::to_string(*o.samples));
  }
  c.workers = resolve_workers(c.workers);
  validate(c);
  return c;
}

bool run_one(const std::string& suite, const Overrides& o) {
  SuiteConfig c = build_config(suite, o);
  SuiteReport r = run_suite(c);
  std::string path = write_report(r, c);
  Summary s = r.summary();
  std::printf("%-11s %s  %zu/%zu cases  max residual %.3e  min margin %.3e  %.1fs\n  report %s\n",
              suite.c_str(), s.pass ? "PASS" : "FAIL", s.passed, s.cases, s.max_residual,
              s.min_margin, r.timing.value("wall_seconds", 0.0), path.c_str());
  for (const auto& cs : r.cases)
    if (!cs.pass()) {
      std::printf("  failed %s", cs.id.c_str());
      if (!cs.diagnostic.empty()) std::printf(": %s", cs.diagnostic.c_str());
      for (const auto& x : cs.residuals)
        if (!x.pass()) std::printf(" [%s %.3e > %.1e]", x.name.c_str(), x.value, x.bound);
      for (const auto& x : cs.margins)
        if (!(x.value >= x.bound)) std::printf(" [%s %.3e < %.1e]", x.name.c_str(), x.value, x.bound);
      std::printf("\n");
    }
  std::fflush(stdout);
  return s.pass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kef-lab: numerical checks for energy functionals on Fano manifolds"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "kef-lab 1.0");

  struct Cmd {
    const char* name;
    const char* suite;
    const char* help;
  };
  const std::vector<Cmd> cmds = {
      {"verify-identities", "identity", "Identity suite (sphere and toric)"},
      {"inequalities", "inequality", "Inequality suite"},
      {"mto", "mto", "Moser-Trudinger-Onofri suite"},
      {"continuity", "continuity", "Continuity-path suite"},
      {"witness", "witness", "Unboundedness witness sweeps"},
      {"futaki", "futaki", "Futaki character suite"},
  };
  Overrides o;
  std::vector<std::pair<CLI::App*, std::string>> subs;
  for (const auto& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_run_options(sub, o);
    subs.emplace_back(sub, c.suite);
  }
  auto* all = app.add_subcommand("all", "Run every suite");
  add_run_options(all, o);

  std::string report_path, kind = "continuity", plot_dir = "plots";
  auto* plots = app.add_subcommand("emit-plots", "Write .dat plot files from a report");
  plots->add_option("report", report_path, "Report JSON")->required();
  plots->add_option("-k,--kind", kind, "continuity | witness");
  plots->add_option("-o,--output-dir", plot_dir, "Directory for .dat files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (plots->parsed()) {
      plot_columns(kind);  // rejects unknown kinds before touching files
      auto files = emit_plot_data(read_report(report_path), kind, plot_dir);
      for (const auto& f : files) std::printf("%s\n", f.c_str());
      return 0;
    }
    bool ok = true;
    if (all->parsed()) {
      for (const auto& s : suite_names()) ok = run_one(s, o) && ok;
      return ok ? 0 : 1;
    }
    for (auto& [sub, suite] : subs)
      if (sub->parsed()) ok = run_one(suite, o);
    return ok ? 0 : 1;
  } catch (const kef::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
