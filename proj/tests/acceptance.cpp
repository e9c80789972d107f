// Acceptance run: one line per criterion, exit status 0 iff all pass.
// Tolerances are pinned here rather than taken from the library defaults.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "kef/experiments.hpp"

using namespace kef;
using namespace kef::exp;

namespace {

Tolerances pinned() {
  Tolerances t;
  t.identity_sphere = 1e-7;
  t.identity_toric = 1e-6;
  t.mixed_discriminant = 1e-12;
  t.variation_residual = 1e-6;
  t.variation_order = 1.9;
  t.margin = 1e-10;
  t.exact = 1e-10;
  t.mobius = 1e-7;
  t.mto_classical = 1e-10;
  t.mto_generalized = 1e-8;
  t.path_residual = 1e-8;
  t.monotone = 1e-10;
  t.ezero = 1e-6;
  t.limit = 2e-2;
  t.futaki = 1e-6;
  t.futaki_coincide = 1e-8;
  t.witness_factor = 10.0;
  return t;
}

constexpr double kSphereIdentitySeconds = 60.0;
constexpr double kContinuitySeconds = 300.0;

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

struct Tally {
  std::size_t cases = 0, passed = 0;
  double worst_residual_ratio = 0.0;  // value / bound
  std::string first_failure;
  bool bounds_ok = true;               // no check looser than the pinned bound
  bool ok(std::size_t expected) const { return cases == expected && passed == cases && bounds_ok; }
};

// Cases whose id starts with any of `prefixes`; every residual bound must be
// at most `max_bound`.
Tally tally(const SuiteReport& r, const std::vector<std::string>& prefixes, double max_bound) {
  Tally t;
  for (const auto& c : r.cases) {
    bool hit = false;
    for (const auto& p : prefixes) hit = hit || starts_with(c.id, p);
    if (!hit) continue;
    ++t.cases;
    if (c.pass())
      ++t.passed;
    else if (t.first_failure.empty())
      t.first_failure = c.id + (c.diagnostic.empty() ? "" : " (" + c.diagnostic + ")");
    for (const auto& x : c.residuals) {
      if (x.bound > max_bound) t.bounds_ok = false;
      if (x.bound > 0) t.worst_residual_ratio = std::max(t.worst_residual_ratio, x.value / x.bound);
    }
  }
  return t;
}

double wall(const SuiteReport& r) { return r.timing.value("wall_seconds", 0.0); }

struct Line {
  int id;
  bool pass;
  std::string detail;
};

std::string describe(const Tally& t, std::size_t expected) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%zu/%zu cases (expected %zu), worst residual/bound %.2e%s%s", t.passed,
                t.cases, expected, t.worst_residual_ratio, t.bounds_ok ? "" : ", loose bound",
                t.first_failure.empty() ? "" : (", first failure " + t.first_failure).c_str());
  return buf;
}

}  // namespace

int main() {
  SuiteConfig base;
  base.tol = pinned();
  base.seed = 1;
  base.workers = resolve_workers(0);
  const Tolerances& T = base.tol;

  auto make = [&](const std::string& suite) {
    SuiteConfig c = base;
    c.suite = suite;
    return c;
  };

  SuiteConfig sphere_id = make("identity");
  sphere_id.identity_toric = false;
  SuiteConfig toric_id = make("identity");
  toric_id.identity_sphere = false;

  std::vector<SuiteConfig> configs = {sphere_id,          toric_id,        make("inequality"),
                                      make("mto"),        make("continuity"), make("futaki"),
                                      make("witness")};
  std::vector<SuiteReport> reports;
  for (const auto& c : configs) {
    std::fprintf(stderr, "running %s (workers %d)\n", c.suite.c_str(), c.workers);
    reports.push_back(run_suite(c));
  }
  const auto &rs = reports[0], &rt = reports[1], &ri = reports[2], &rm = reports[3], &rc = reports[4],
             &rf = reports[5], &rw = reports[6];

  std::vector<Line> lines;

  {
    auto t = tally(rs, {"sphere-trivial", "sphere-pair-", "sphere-triple-"}, T.identity_sphere);
    auto pairs = tally(rs, {"sphere-pair-"}, T.identity_sphere);
    std::size_t expected = 1 + 25 + std::size_t(sphere_id.identity_triples);
    bool ok = t.ok(expected) && pairs.cases == 25 && wall(rs) < kSphereIdentitySeconds;
    char w[64];
    std::snprintf(w, sizeof w, ", wall %.1f s (limit %.0f s)", wall(rs), kSphereIdentitySeconds);
    lines.push_back({1, ok, "sphere L=48 identities: " + describe(t, expected) + w});
  }
  {
    auto t = tally(rt, {"toric-trivial", "toric-pair-", "toric-triple-"}, T.identity_toric);
    auto md = tally(rt, {"mixed-discriminant-"}, T.mixed_discriminant);
    std::size_t expected = 1 + 10 + std::size_t(toric_id.identity_triples);
    std::size_t md_expected = std::size_t(toric_id.identity_md_samples);
    bool ok = t.ok(expected) && md.ok(md_expected) && md_expected > 0;
    lines.push_back({2, ok,
                     "toric n=2 identities: " + describe(t, expected) + "; mixed discriminant: " +
                         describe(md, md_expected)});
  }
  {
    auto s = tally(ri, {"sphere-sample-"}, T.margin);
    auto m = tally(ri, {"mobius-"}, T.mobius);
    auto ab = tally(ri, {"toric-AB-"}, T.margin);
    bool ok = s.ok(100) && m.ok(std::size_t(base.mobius_cases)) && ab.ok(40) && ri.pass();
    char buf[128];
    std::snprintf(buf, sizeof buf, ", min margin %.3e", ri.summary().min_margin);
    lines.push_back({3, ok,
                     "inequalities: sphere " + describe(s, 100) + "; toric A_k/B_k " + describe(ab, 40) +
                         buf});
  }
  {
    auto s = tally(rs, {"sphere-variation-"}, T.variation_residual);
    auto t = tally(rt, {"toric-variation-"}, T.variation_residual);
    double min_order = 1e300;
    for (const auto* r : {&rs, &rt})
      for (const auto& c : r->cases)
        if (c.id.find("variation") != std::string::npos)
          for (const auto& m : c.margins)
            if (m.name.find("order") != std::string::npos) {
              min_order = std::min(min_order, m.value);
              if (m.bound < T.variation_order) s.bounds_ok = false;
            }
    std::size_t es = std::size_t(base.identity_variation_paths);
    bool ok = s.ok(es) && t.ok(es) && min_order >= T.variation_order;
    char buf[64];
    std::snprintf(buf, sizeof buf, ", min observed order %.3f", min_order);
    lines.push_back({4, ok, "variations: sphere " + describe(s, es) + "; toric " + describe(t, es) + buf});
  }
  {
    auto cl = tally(rm, {"classical-"}, T.mto_classical);
    auto mo = tally(rm, {"mobius-"}, T.mobius);
    auto ge = tally(rm, {"generalized-"}, T.mto_generalized);
    bool ok = cl.ok(100) && mo.ok(10) && ge.ok(20) && rm.pass();
    lines.push_back({5, ok,
                     "MTO: classical " + describe(cl, 100) + "; Mobius " + describe(mo, 10) +
                         "; generalized " + describe(ge, 20)});
  }
  {
    auto t = tally(rc, {"ke-base", "perturbed-"}, T.limit);
    std::size_t expected = 1 + std::size_t(base.continuity_bases);
    bool ok = t.ok(expected) && rc.pass() && wall(rc) < kContinuitySeconds;
    char w[64];
    std::snprintf(w, sizeof w, ", wall %.1f s (limit %.0f s)", wall(rc), kContinuitySeconds);
    lines.push_back({6, ok, "continuity to t=0.99: " + describe(t, expected) + w});
  }
  {
    auto t = tally(rf, {"generator-"}, T.futaki);
    std::size_t nonzero = 0;
    for (const auto& c : rf.cases)
      if (c.id != "generator-zero") ++nonzero;
    bool ok = t.ok(rf.cases.size()) && nonzero >= 6;
    lines.push_back({7, ok, "Futaki: " + describe(t, rf.cases.size()) + ", " + std::to_string(nonzero) +
                                " nonzero generators"});
  }
  {
    auto t = tally(rw, {"baseline", "sphere-upward-I", "toric-DI-downward", "toric-En-downward"}, 1e300);
    bool ok = t.ok(4) && rw.pass();
    lines.push_back({8, ok, "witnesses: " + describe(t, 4)});
  }
  {
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < configs.size(); ++i) {
      SuiteConfig c = configs[i];
      c.workers = 2 * configs[i].workers;
      std::fprintf(stderr, "rerunning %s (workers %d)\n", c.suite.c_str(), c.workers);
      auto again = run_suite(c);
      std::string diff;
      bool same = same_numbers(reports[i], again, &diff);
      ok = ok && same;
      if (!detail.empty()) detail += ", ";
      detail += c.suite + (i == 0 ? "/sphere" : i == 1 ? "/toric" : "") + (same ? " same" : " DIFFERS at " + diff);
    }
    lines.push_back({9, ok, "workers " + std::to_string(base.workers) + " vs " +
                                std::to_string(2 * base.workers) + ": " + detail});
  }

  bool all = true;
  for (const auto& l : lines) {
    std::printf("criterion %d: %s  %s\n", l.id, l.pass ? "PASS" : "FAIL", l.detail.c_str());
    all = all && l.pass;
  }
  std::fflush(stdout);
  return all ? 0 : 1;
}
