#include <cmath>
#include <string>

#include "common.hpp"
#include "kef/functionals.hpp"
#include "kef/rng.hpp"
#include "samples.hpp"

namespace kef::exp {

namespace {

using detail::case_id;

constexpr int kMaxCandidates = 50;

// J(omega0, omega_phi) - (1/V) int phi omega0^n - log (1/V) int e^{-phi} omega0^n,
// the gap in the Moser-Trudinger-Onofri inequality on a Kahler-Einstein base.
template <class M>
double mto_slack(const M& m, const typename M::Potential& phi) {
  return ding_F(m, m.zero(), phi);
}

std::array<s2::MobiusMap::C, 4> generator(std::uint64_t seed, double scale) {
  Rng rng(seed);
  using C = s2::MobiusMap::C;
  C a(rng.normal(), rng.normal()), b(rng.normal(), rng.normal()), c(rng.normal(), rng.normal());
  double s = scale / std::sqrt(2.0 * std::norm(a) + std::norm(b) + std::norm(c));
  return {a * s, b * s, c * s, -a * s};
}

}  // namespace

SuiteReport mto_suite(const SuiteConfig& c) {
  detail::SuiteClock clock;
  SuiteReport rep = detail::start_report(c, "mto");
  const Tolerances& t = c.tol;
  auto add = [&](std::vector<CaseRecord> v) {
    for (auto& x : v) rep.cases.push_back(std::move(x));
  };
  SphereModel sm(c.sphere_l);

  add(detail::run_cases(
      1, c.workers, [](std::size_t) { return std::string("constant"); },
      [&](std::size_t, CaseRecord& r) {
        double k = 0.7;
        r.inputs = {{"model", sm.name()}, {"constant", k}};
        double s = mto_slack(sm, s2::ScalarField::constant(sm.grid(), k));
        r.value("slack", s);
        r.residual("equality", std::abs(s), t.exact);
      }));

  add(detail::run_cases(
      c.mto_samples, c.workers, [](std::size_t i) { return case_id("classical", i); },
      [&](std::size_t i, CaseRecord& r) {
        std::uint64_t seed = derive_seed(c.seed, 51, i);
        double amp = c.mto_amplitude * (0.05 + 0.95 * Rng(seed).uniform());
        auto phi = s2::random_band_limited(sm.grid(), seed, c.mto_lp, false, amp);
        r.inputs = {{"model", sm.name()}, {"index", i}, {"lp", c.mto_lp}, {"amplitude", amp}};
        double s = mto_slack(sm, phi);
        r.value("kahler_margin", s2::kahler_margin(phi));
        r.value("slack", s);
        r.margin("slack_nonnegative", s, -t.mto_classical);
      }));

  add(detail::run_cases(
      c.mobius_cases, c.workers, [](std::size_t i) { return case_id("mobius", i); },
      [&](std::size_t i, CaseRecord& r) {
        double scale = 0.3 + 0.7 * double(i) / std::max(1, c.mobius_cases - 1);
        auto X = generator(derive_seed(c.seed, 52, i), scale);
        auto phi = s2::mobius_pullback(s2::MobiusMap::exp_of(X), sm.zero());
        r.inputs = {{"model", sm.name()}, {"index", i}, {"generator_norm", scale}};
        double s = mto_slack(sm, phi);
        r.value("I", aubin_I(sm, sm.zero(), phi));
        r.value("slack", s);
        r.residual("equality", std::abs(s), t.mobius);
      }));

  ToricModel tm(c.toric_n, c.toric_box, c.toric_points);
  int n = tm.dim();
  add(detail::run_cases(
      c.mto_members, c.workers, [](std::size_t i) { return case_id("generalized", i); },
      [&](std::size_t i, CaseRecord& r) {
        // psi in A_n, target phi = rho_psi with Ric omega_psi = omega0 + i ddbar phi
        for (int attempt = 0; attempt < kMaxCandidates; ++attempt) {
          auto s = detail::toric_sample(tm, derive_seed(c.seed, 53, i * kMaxCandidates + attempt),
                                        c.mto_toric_amplitude, false);
          auto member = in_A_k(tm, s.p, n);
          if (!member.member) continue;
          auto phi = tm.ricci_shift(s.p);
          double slack = mto_slack(tm, phi);
          r.inputs = {{"model", tm.name()}, {"index", i}, {"attempt", attempt},
                      {"amplitude", s.amplitude}};
          r.value("E_n", member.margin);
          r.value("target_kahler_margin", tm.kahler_margin(phi));
          r.value("slack", slack);
          r.margin("slack_nonnegative", slack, -t.mto_generalized);
          return;
        }
        throw DomainError("no A_n member among the candidates");
      }));

  detail::finish_report(rep, c, clock);
  return rep;
}

}  // namespace kef::exp
