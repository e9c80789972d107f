#include <cmath>
#include <string>

#include "common.hpp"
#include "kef/functionals.hpp"
#include "kef/rng.hpp"
#include "samples.hpp"

namespace kef::exp {

namespace {

using detail::case_id;

std::string k_(const char* what, int k) { return std::string(what) + "_k" + std::to_string(k); }

template <class M>
void inequality_chain(const M& m, const typename M::Potential& a, const typename M::Potential& b,
                      const Tolerances& t, CaseRecord& r) {
  int n = m.dim();
  double I = aubin_I(m, a, b), J = aubin_J(m, a, b);
  double IJ = I - J;
  r.value("I", I);
  r.value("J", J);
  r.margin("IJ_chain_1", I / (n * (n + 1.0)) - IJ / (n * n), -t.margin);
  r.margin("IJ_chain_2", J / n - I / (n * (n + 1.0)), -t.margin);
  r.margin("IJ_chain_3", IJ - J / n, -t.margin);
  r.margin("IJ_chain_4", n * I / (n + 1.0) - IJ, -t.margin);
  r.margin("IJ_chain_5", n * J - n * I / (n + 1.0), -t.margin);
  if (n == 1) r.residual("I_minus_2J", std::abs(I - 2.0 * J), t.exact);

  std::vector<double> Ik(n + 1), Jk(n + 1);
  for (int k = 0; k <= n; ++k) {
    Ik[k] = I_k(m, a, b, k);
    Jk[k] = J_k_closed(m, a, b, k);
    r.margin(k_("I_nonnegative", k), Ik[k], -t.margin);
    r.margin(k_("I_at_most_J", k), J - Ik[k], -t.margin);
    r.margin(k_("J_nonnegative", k), Jk[k], -t.margin);
    r.margin(k_("J_at_most_J", k), J - Jk[k], -t.margin);
  }
  r.residual("I_0", std::abs(Ik[0]), t.exact);
  r.residual("I_n_minus_J", std::abs(Ik[n] - J), t.exact);
  r.residual("J_n", std::abs(J - I_k_gradient(m, a, b, n)), t.exact);
  for (int k = 1; k < n; ++k)
    r.margin(k_("I_ratio_step", k), (k + 2.0) / (k + 1.0) * Ik[k + 1] - (k + 1.0) / k * Ik[k],
             -t.margin);
  for (int k = 0; k < n; ++k) r.margin(k_("J_monotone", k), Jk[k] - Jk[k + 1], -t.margin);

  auto rb = ricci_potential(m, b);
  r.value("mean_f_b", rb.mean_f);
  r.margin("mean_f_nonpositive", -rb.mean_f, -t.margin);

  // (1/V) int e^{-phi + mean phi} omega_a^n >= 1
  auto wa = m.kahler(a);
  Values phi = m.values(b) - m.values(a);
  double mean = wedge(m, &phi, wa, n, wa, 0) / m.volume();
  Values e(phi.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::exp(-phi[i] + mean);
  double jensen = wedge(m, &e, wa, n, wa, 0) / m.volume();
  r.value("jensen_mean", jensen);
  r.margin("jensen", jensen - 1.0, -t.margin);

  // E_0 >= 0 from the Kahler-Einstein base
  double E0 = E_k(m, m.zero(), b, 0, EkRoute::via_E0);
  r.value("E0_from_base", E0);
  r.margin("E0_nonnegative", E0, -t.margin);
}

std::array<s2::MobiusMap::C, 4> random_generator(std::uint64_t seed, double scale) {
  Rng rng(seed);
  using C = s2::MobiusMap::C;
  C a(rng.normal(), rng.normal()), b(rng.normal(), rng.normal()), c(rng.normal(), rng.normal());
  double norm = std::sqrt(2.0 * std::norm(a) + std::norm(b) + std::norm(c));
  double s = scale / norm;
  return {a * s, b * s, c * s, -a * s};
}

}  // namespace

SuiteReport inequality_suite(const SuiteConfig& c) {
  detail::SuiteClock clock;
  SuiteReport rep = detail::start_report(c, "inequality");
  const Tolerances& t = c.tol;
  auto add = [&](std::vector<CaseRecord> v) {
    for (auto& x : v) rep.cases.push_back(std::move(x));
  };

  SphereModel sm(c.sphere_l);
  add(detail::run_cases(
      c.inequality_samples, c.workers, [](std::size_t i) { return case_id("sphere-sample", i); },
      [&](std::size_t i, CaseRecord& r) {
        // Half the samples start from omega0, half from another random metric.
        auto b = detail::sphere_sample(sm, derive_seed(c.seed, 31, i), c.sphere_lp,
                                       c.inequality_amplitude, false).p;
        auto a = i % 2 ? detail::sphere_sample(sm, derive_seed(c.seed, 32, i), c.sphere_lp,
                                               c.inequality_amplitude, false).p
                       : sm.zero();
        r.inputs = {{"model", sm.name()}, {"index", i}, {"base", i % 2 ? "random" : "omega0"}};
        inequality_chain(sm, a, b, t, r);
      }));

  add(detail::run_cases(
      c.mobius_cases, c.workers, [](std::size_t i) { return case_id("mobius", i); },
      [&](std::size_t i, CaseRecord& r) {
        double scale = 0.3 + 0.7 * double(i) / std::max(1, c.mobius_cases - 1);
        auto X = random_generator(derive_seed(c.seed, 33, i), scale);
        auto phi = s2::mobius_pullback(s2::MobiusMap::exp_of(X), sm.zero());
        r.inputs = {{"model", sm.name()}, {"index", i}, {"generator_norm", scale}};
        PairEnergies<SphereModel> E(sm, sm.zero(), phi);
        r.value("I", E.I());
        r.value("E0", E.E0());
        r.value("E1", E.Ek(1, EkRoute::via_E0));
        r.residual("E0_zero", std::abs(E.E0()), t.mobius);
        r.residual("E1_zero", std::abs(E.Ek(1, EkRoute::via_E0)), t.mobius);
      }));

  ToricModel tm(c.toric_n, c.toric_box, c.toric_points);
  int n = tm.dim();
  add(detail::run_cases(
      c.inequality_toric_samples, c.workers, [](std::size_t i) { return case_id("toric-AB", i); },
      [&](std::size_t i, CaseRecord& r) {
        auto s = detail::toric_sample(tm, derive_seed(c.seed, 34, i), c.inequality_toric_amplitude, false);
        r.inputs = {{"model", tm.name()}, {"index", i}, {"amplitude", s.amplitude}};
        PairEnergies<ToricModel> E(tm, tm.zero(), s.p);
        r.value("ricci_margin", in_H_plus(tm, s.p).margin);
        if (n >= 2) r.value("ricci_plus_2omega_margin", ricci_lower_bound(tm, s.p, 2.0).margin);
        if (n >= 3) r.value("ricci_plus_omega_margin", ricci_lower_bound(tm, s.p, 1.0).margin);
        r.margin("E0_nonnegative", E.E0(), -t.margin);
        for (int k = 0; k <= n; ++k) {
          double b = E.Ik_ricci_b(k);
          double a = E.Ek(k, EkRoute::via_E0);
          r.value(k_("B_margin", k), b);
          r.value(k_("A_margin", k), a);
          // membership in B_k must imply membership in A_k
          if (b >= 0.0) r.margin(k_("A_contains_B", k), a, -t.margin);
        }
      }));

  detail::finish_report(rep, c, clock);
  return rep;
}

}  // namespace kef::exp
