#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "kef/core.hpp"

// Named scenario suites producing pass/fail reports. A SuiteConfig fully
// determines the numbers in a report; the worker count only changes timing.
namespace kef::exp {

using Json = nlohmann::ordered_json;

// Every tolerance used by a suite lives here and nowhere else.
struct Tolerances {
  double identity_sphere = 1e-7;   // relative
  double identity_toric = 1e-6;    // relative
  double mixed_discriminant = 1e-12;
  double variation_residual = 1e-6;
  double variation_order = 1.9;
  double margin = 1e-10;  // inequality margins
  double exact = 1e-10;   // exact specializations
  double mobius = 1e-7;   // equality cases on Mobius orbits
  double mto_classical = 1e-10;
  double mto_generalized = 1e-8;
  double path_residual = 1e-8;
  double monotone = 1e-10;
  double ezero = 1e-6;
  double limit = 2e-2;  // truncated t -> 1 limits
  double futaki = 1e-6;
  double futaki_coincide = 1e-8;
  double witness_factor = 10.0;
};

struct SuiteConfig {
  std::string suite;  // identity | inequality | mto | continuity | witness | futaki
  std::uint64_t seed = 1;
  int workers = 0;  // 0: resolve_workers()
  std::string output_dir = "results";
  std::string format = "both";  // json | csv | both

  // models
  int sphere_l = 48;
  int toric_n = 2;
  double toric_box = 40.0;
  int toric_points = 64;
  int path_nodes = 33;

  // identity
  int identity_sphere_pairs = 25;
  int identity_toric_pairs = 10;
  int identity_triples = 3;
  int identity_variation_paths = 4;
  int identity_md_samples = 40;
  int sphere_lp = 4;
  double sphere_amplitude = 0.04;
  double toric_amplitude = 0.05;         // base of a pair, must be Ricci-positive
  double toric_target_amplitude = 0.2;  // other endpoint
  bool identity_sphere = true;
  bool identity_toric = true;

  // inequality
  int inequality_samples = 100;
  int inequality_toric_samples = 40;
  double inequality_amplitude = 0.3;
  double inequality_toric_amplitude = 0.1;
  int mobius_cases = 10;

  // mto
  int mto_samples = 100;
  int mto_lp = 16;
  double mto_amplitude = 2.0;
  int mto_members = 20;
  double mto_toric_amplitude = 0.1;

  // continuity
  int continuity_bases = 2;  // perturbed bases besides the Kahler-Einstein one
  int continuity_lp = 4;
  double continuity_amplitude = 0.3;
  double continuity_dt = 0.02;
  double continuity_t_max = 0.99;

  // witness
  int witness_steps = 8;
  double witness_sphere_width = 0.5;
  double witness_toric_radius = 3.0;
  double witness_di_scale = 0.5;
  double witness_en_scale = 2.5;

  // futaki
  double futaki_step = 1e-3;

  Tolerances tol;
};

// Flat typed key registry ("section.key") shared by the config file reader,
// the CLI overrides and the config echo in every report.
using KeyRef = std::variant<int*, double*, std::uint64_t*, std::string*, bool*>;
std::vector<std::pair<std::string, KeyRef>> config_keys(SuiteConfig& c);
// Throws ConfigError naming the key on unknown keys or malformed values.
void set_key(SuiteConfig& c, const std::string& key, const std::string& value);
Json config_to_json(const SuiteConfig& c);
// TOML-style text: [section] headers, key = value, # comments.
void load_config_file(SuiteConfig& c, const std::string& path);
void load_config_text(SuiteConfig& c, const std::string& text, const std::string& origin);
void validate(const SuiteConfig& c);

// KEF_WORKERS if set, else the hardware concurrency.
int resolve_workers(int requested);

// Runs fn(0..n-1) on `workers` threads. Each index writes only its own slot,
// so results do not depend on the schedule. The first exception by index is
// rethrown after all threads join.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// ---------------------------------------------------------------- reports

struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass() const;
};

struct Series {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct CaseRecord {
  std::string id;
  Json inputs = Json::object();
  std::vector<std::pair<std::string, double>> values;
  std::vector<Check> residuals;  // pass iff value <= bound
  std::vector<Check> margins;    // pass iff value >= bound
  std::string diagnostic;        // non-empty: the case errored
  std::vector<std::pair<std::string, Series>> series;

  void value(const std::string& k, double v) { values.emplace_back(k, v); }
  void residual(const std::string& k, double v, double tol) { residuals.push_back({k, v, tol}); }
  void margin(const std::string& k, double v, double floor) { margins.push_back({k, v, floor}); }
  bool pass() const;
};

struct Summary {
  std::size_t cases = 0;
  std::size_t passed = 0;
  double max_residual = 0.0;
  double min_margin = 0.0;
  bool pass = false;
};

struct SuiteReport {
  std::string suite;
  Json config = Json::object();
  std::vector<CaseRecord> cases;
  Json environment = Json::object();  // excluded from determinism comparisons
  Json timing = Json::object();       // idem

  Summary summary() const;
  bool pass() const { return summary().pass; }
};

Json to_json(const CaseRecord& c);
CaseRecord case_from_json(const Json& j);
Json to_json(const SuiteReport& r);
SuiteReport report_from_json(const Json& j);
std::string to_csv(const SuiteReport& r);
std::string series_csv(const Series& s);

// Compares config, cases and summary bit-exactly (NaN equals NaN).
bool same_numbers(const SuiteReport& a, const SuiteReport& b, std::string* first_difference = nullptr);

// Writes <dir>/<suite>/<stamp>.json and .csv (as selected by cfg.format),
// per-series CSV files, and updates <dir>/index.json; each file goes through
// a temporary and a rename. Returns the JSON path.
std::string write_report(const SuiteReport& r, const SuiteConfig& cfg);
SuiteReport read_report(const std::string& path);
void write_atomic(const std::string& path, const std::string& content);

// One whitespace-separated .dat per plotted series, with a header comment
// naming the columns:
//   continuity   t c_t I-J E_0 .. E_n F
//   witness      b I E_n   (nan where a sweep does not define the column)
// A report without such series yields a header-only file. Throws ConfigError
// on any other kind.
std::vector<std::string> plot_columns(const std::string& kind);
std::vector<std::string> emit_plot_data(const SuiteReport& r, const std::string& kind,
                                        const std::string& dir);

// ---------------------------------------------------------------- suites

SuiteReport identity_suite(const SuiteConfig& c);
SuiteReport inequality_suite(const SuiteConfig& c);
SuiteReport mto_suite(const SuiteConfig& c);
SuiteReport witness_suite(const SuiteConfig& c);
SuiteReport continuity_suite(const SuiteConfig& c);
SuiteReport futaki_suite(const SuiteConfig& c);

const std::vector<std::string>& suite_names();
SuiteReport run_suite(const SuiteConfig& c);

// Smallest t1 in [0,1) with (1-t)^j (n-1) C(n-1,j) < n for all t >= t1 and
// j = 0..n-1.
double continuity_t1(int n);

// |x - y| / max(|x|, |y|, scale), and 0 when all three vanish.
double relative_residual(double x, double y, double scale);

}  // namespace kef::exp
