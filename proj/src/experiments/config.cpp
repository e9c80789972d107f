#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "kef/experiments.hpp"

namespace kef::exp {

std::vector<std::pair<std::string, KeyRef>> config_keys(SuiteConfig& c) {
  Tolerances& t = c.tol;
  return {
      {"run.suite", &c.suite},
      {"run.seed", &c.seed},
      {"run.workers", &c.workers},
      {"run.output_dir", &c.output_dir},
      {"run.format", &c.format},
      {"model.sphere_l", &c.sphere_l},
      {"model.toric_n", &c.toric_n},
      {"model.toric_box", &c.toric_box},
      {"model.toric_points", &c.toric_points},
      {"model.path_nodes", &c.path_nodes},
      {"identity.sphere_pairs", &c.identity_sphere_pairs},
      {"identity.toric_pairs", &c.identity_toric_pairs},
      {"identity.triples", &c.identity_triples},
      {"identity.variation_paths", &c.identity_variation_paths},
      {"identity.md_samples", &c.identity_md_samples},
      {"identity.sphere_lp", &c.sphere_lp},
      {"identity.sphere_amplitude", &c.sphere_amplitude},
      {"identity.toric_amplitude", &c.toric_amplitude},
      {"identity.toric_target_amplitude", &c.toric_target_amplitude},
      {"identity.sphere", &c.identity_sphere},
      {"identity.toric", &c.identity_toric},
      {"inequality.samples", &c.inequality_samples},
      {"inequality.toric_samples", &c.inequality_toric_samples},
      {"inequality.amplitude", &c.inequality_amplitude},
      {"inequality.toric_amplitude", &c.inequality_toric_amplitude},
      {"inequality.mobius_cases", &c.mobius_cases},
      {"mto.samples", &c.mto_samples},
      {"mto.lp", &c.mto_lp},
      {"mto.amplitude", &c.mto_amplitude},
      {"mto.members", &c.mto_members},
      {"mto.toric_amplitude", &c.mto_toric_amplitude},
      {"continuity.bases", &c.continuity_bases},
      {"continuity.lp", &c.continuity_lp},
      {"continuity.amplitude", &c.continuity_amplitude},
      {"continuity.dt", &c.continuity_dt},
      {"continuity.t_max", &c.continuity_t_max},
      {"witness.steps", &c.witness_steps},
      {"witness.sphere_width", &c.witness_sphere_width},
      {"witness.toric_radius", &c.witness_toric_radius},
      {"witness.di_scale", &c.witness_di_scale},
      {"witness.en_scale", &c.witness_en_scale},
      {"futaki.step", &c.futaki_step},
      {"tolerances.identity_sphere", &t.identity_sphere},
      {"tolerances.identity_toric", &t.identity_toric},
      {"tolerances.mixed_discriminant", &t.mixed_discriminant},
      {"tolerances.variation_residual", &t.variation_residual},
      {"tolerances.variation_order", &t.variation_order},
      {"tolerances.margin", &t.margin},
      {"tolerances.exact", &t.exact},
      {"tolerances.mobius", &t.mobius},
      {"tolerances.mto_classical", &t.mto_classical},
      {"tolerances.mto_generalized", &t.mto_generalized},
      {"tolerances.path_residual", &t.path_residual},
      {"tolerances.monotone", &t.monotone},
      {"tolerances.ezero", &t.ezero},
      {"tolerances.limit", &t.limit},
      {"tolerances.futaki", &t.futaki},
      {"tolerances.futaki_coincide", &t.futaki_coincide},
      {"tolerances.witness_factor", &t.witness_factor},
  };
}

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& v, const char* what) {
  throw ConfigError("config key '" + key + "': cannot parse '" + v + "' as " + what);
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    return s.substr(1, s.size() - 2);
  return s;
}

struct Assign {
  const std::string& key;
  const std::string& raw;
  void operator()(int* p) const {
    errno = 0;
    char* end = nullptr;
    long v = std::strtol(raw.c_str(), &end, 10);
    if (raw.empty() || *end || errno) bad_value(key, raw, "an integer");
    *p = int(v);
  }
  void operator()(std::uint64_t* p) const {
    errno = 0;
    char* end = nullptr;
    if (raw.empty() || raw[0] == '-') bad_value(key, raw, "an unsigned integer");
    unsigned long long v = std::strtoull(raw.c_str(), &end, 10);
    if (*end || errno) bad_value(key, raw, "an unsigned integer");
    *p = v;
  }
  void operator()(double* p) const {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(raw.c_str(), &end);
    if (raw.empty() || *end || errno || !std::isfinite(v)) bad_value(key, raw, "a number");
    *p = v;
  }
  void operator()(std::string* p) const { *p = unquote(raw); }
  void operator()(bool* p) const {
    if (raw == "true" || raw == "1")
      *p = true;
    else if (raw == "false" || raw == "0")
      *p = false;
    else
      bad_value(key, raw, "a boolean");
  }
};

}  // namespace

void set_key(SuiteConfig& c, const std::string& key, const std::string& value) {
  for (auto& [name, ref] : config_keys(c)) {
    if (name != key) continue;
    std::visit(Assign{key, trim(value)}, ref);
    return;
  }
  throw ConfigError("unknown config key '" + key + "'");
}

Json config_to_json(const SuiteConfig& c) {
  SuiteConfig copy = c;
  Json j = Json::object();
  for (auto& [name, ref] : config_keys(copy)) std::visit([&](auto* p) { j[name] = *p; }, ref);
  return j;
}

void load_config_text(SuiteConfig& c, const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // '#' starts a comment unless it sits inside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    set_key(c, key, line.substr(eq + 1));
  }
}

void load_config_file(SuiteConfig& c, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  load_config_text(c, ss.str(), path);
}

void validate(const SuiteConfig& c) {
  auto need = [](bool ok, const char* key, const char* what) {
    if (!ok) throw ConfigError(std::string("config key '") + key + "': " + what);
  };
  need(c.format == "json" || c.format == "csv" || c.format == "both", "run.format",
       "must be json, csv or both");
  need(c.workers >= 0, "run.workers", "must be >= 0");
  need(c.sphere_l >= 8 && c.sphere_l <= 256, "model.sphere_l", "must lie in [8, 256]");
  need(c.toric_n >= 1 && c.toric_n <= 3, "model.toric_n", "must lie in [1, 3]");
  need(c.toric_box > 0.0, "model.toric_box", "must be positive");
  need(c.toric_points >= 8, "model.toric_points", "must be >= 8");
  need(c.path_nodes >= 2, "model.path_nodes", "must be >= 2");
  need(c.sphere_lp >= 1 && c.sphere_lp < c.sphere_l, "identity.sphere_lp", "must lie in [1, L)");
  need(c.mto_lp >= 1 && c.mto_lp < c.sphere_l, "mto.lp", "must lie in [1, L)");
  need(c.continuity_lp >= 1 && c.continuity_lp < c.sphere_l, "continuity.lp", "must lie in [1, L)");
  need(c.continuity_dt > 0.0 && c.continuity_dt < 0.5, "continuity.dt", "must lie in (0, 0.5)");
  need(c.continuity_t_max > 0.0 && c.continuity_t_max < 1.0, "continuity.t_max",
       "must lie in (0, 1)");
  need(c.witness_steps >= 2, "witness.steps", "must be >= 2");
  need(c.futaki_step > 0.0, "futaki.step", "must be positive");
  for (int v : {c.identity_sphere_pairs, c.identity_toric_pairs, c.identity_triples,
                c.identity_variation_paths, c.identity_md_samples, c.inequality_samples,
                c.inequality_toric_samples, c.mobius_cases, c.mto_samples, c.mto_members,
                c.continuity_bases})
    need(v >= 0, "sample count", "must be >= 0");
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("KEF_WORKERS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (!*env || *end || v < 1 || v > 1024)
      throw ConfigError(std::string("KEF_WORKERS: expected a positive integer, got '") + env + "'");
    return int(v);
  }
  unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : int(h);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  // splitmix64 over a mix of the three words
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1) + 0xBF58476D1CE4E5B9ULL * index;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace kef::exp
