#include <cmath>
#include <string>

#include "common.hpp"
#include "kef/functionals.hpp"

namespace kef::exp {

namespace {

// Kahler potential with density e^{b h} / mean relative to omega0, where h is
// a Gaussian bump of chordal width `width` around a fixed point. As b grows
// the mass collects near that point.
s2::ScalarField concentrated(const SphereModel& m, double b, double width, double* loss) {
  const auto& g = *m.grid();
  const double mu0 = 0.3, lon0 = 0.7, s0 = std::sqrt(1.0 - mu0 * mu0);
  Values v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto p = g.node(i);
    double cosg = p.mu * mu0 + std::sqrt(1.0 - p.mu * p.mu) * s0 * std::cos(p.lon - lon0);
    double d2 = 2.0 * (1.0 - cosg);
    v[i] = std::exp(b * std::exp(-d2 / (width * width)));
  }
  double mean = g.mean(v);
  for (double& x : v) x = x / mean - 1.0;
  auto rho = s2::ScalarField::project(m.grid(), v);
  if (loss) *loss = rho.projection_loss();
  return s2::poisson_solve(rho.mean_zero());
}

toric::ToricFunction bump(int n, double radius) {
  toric::ProfileTerm t;
  t.kind = toric::ProfileTerm::Kind::bump;
  t.amp = 1.0;
  t.S = toric::Mat3::Identity() / (radius * radius);
  t.power = 6;
  toric::ToricFunction f(n);
  f.add_term(t);
  return f;
}

// Ding functional from omega0 to a target that need not be Kahler; with
// Ric omega0 = omega0 this is E_n(omega0, omega_psi) for Ric omega_psi =
// omega0 + i ddbar phi.
double en_of_ricci_target(const ToricModel& m, const ToricPotential& phi) {
  return ding_F(m, m.zero(), phi);
}

}  // namespace

SuiteReport witness_suite(const SuiteConfig& c) {
  detail::SuiteClock clock;
  SuiteReport rep = detail::start_report(c, "witness");
  const Tolerances& t = c.tol;
  const int steps = c.witness_steps;
  ToricModel tm(2, c.toric_box, c.toric_points);
  SphereModel sm(c.sphere_l);
  toric::ToricFunction g = bump(2, c.witness_toric_radius);

  auto cases = detail::run_cases(
      4, c.workers,
      [](std::size_t i) {
        static const char* ids[] = {"baseline", "sphere-upward-I", "toric-DI-downward",
                                    "toric-En-downward"};
        return std::string(ids[i]);
      },
      [&](std::size_t which, CaseRecord& r) {
        Series s;
        s.columns = {"b", "I", "E_n"};
        switch (which) {
          case 0: {
            // b = 0 gives omega itself in every family
            r.inputs = {{"b", 0.0}};
            double loss = 0.0;
            double I1 = aubin_I(sm, sm.zero(), concentrated(sm, 0.0, c.witness_sphere_width, &loss));
            double I2 = aubin_I(tm, tm.zero(), tm.from_function(g * 0.0));
            double E2 = en_of_ricci_target(tm, tm.from_function(g * 0.0));
            r.value("sphere_I", I1);
            r.value("toric_I", I2);
            r.value("toric_E_n", E2);
            r.residual("sphere_I_zero", std::abs(I1), t.exact);
            r.residual("toric_I_zero", std::abs(I2), t.exact);
            r.residual("toric_E_n_zero", std::abs(E2), t.exact);
            return;
          }
          case 1: {
            r.inputs = {{"model", sm.name()}, {"width", c.witness_sphere_width}, {"steps", steps}};
            std::vector<double> I;
            double worst_loss = 0.0, min_kahler = INFINITY;
            for (int k = 1; k <= steps; ++k) {
              double loss = 0.0;
              auto phi = concentrated(sm, k, c.witness_sphere_width, &loss);
              worst_loss = std::max(worst_loss, loss);
              min_kahler = std::min(min_kahler, sm.kahler_margin(phi));
              I.push_back(aubin_I(sm, sm.zero(), phi));
              PairEnergies<SphereModel> E(sm, sm.zero(), phi);
              s.rows.push_back({double(k), I.back(), E.En()});
            }
            r.value("projection_loss", worst_loss);
            r.value("kahler_margin", min_kahler);
            r.margin("kahler", min_kahler, 0.0);
            for (int k = 1; k < steps; ++k)
              r.margin("increase_" + std::to_string(k), I[k] - I[k - 1], 0.0);
            r.value("ratio", I.back() / I.front());
            r.margin("ratio_over_factor", I.back() / I.front() - t.witness_factor, 0.0);
            break;
          }
          case 2: {
            // phi_b = sign b scale g; the sign makes the cubic term of I negative
            double sc = c.witness_di_scale;
            double odd = aubin_I(tm, tm.zero(), tm.from_function(g * sc)) -
                         aubin_I(tm, tm.zero(), tm.from_function(g * -sc));
            double sign = odd < 0.0 ? 1.0 : -1.0;
            r.inputs = {{"model", tm.name()}, {"radius", c.witness_toric_radius},
                        {"scale", sc}, {"sign", sign}, {"steps", steps}};
            std::vector<double> I;
            double min_kahler = INFINITY;
            for (int k = 1; k <= steps; ++k) {
              auto phi = tm.from_function(g * (sign * sc * k));
              min_kahler = std::min(min_kahler, tm.kahler_margin(phi));
              I.push_back(aubin_I(tm, tm.zero(), phi));
              s.rows.push_back({double(k), I.back(), NAN});
            }
            double base = std::abs(I.front());
            r.value("baseline", base);
            r.value("final", I.back());
            r.value("kahler_margin", min_kahler);
            r.margin("final_below_factor_baseline", -I.back() - t.witness_factor * base, 0.0);
            break;
          }
          case 3: {
            double sc = c.witness_en_scale;
            double odd = en_of_ricci_target(tm, tm.from_function(g * sc)) -
                         en_of_ricci_target(tm, tm.from_function(g * -sc));
            double sign = odd < 0.0 ? 1.0 : -1.0;
            r.inputs = {{"model", tm.name()}, {"radius", c.witness_toric_radius},
                        {"scale", sc}, {"sign", sign}, {"steps", steps}};
            std::vector<double> E;
            for (int k = 1; k <= steps; ++k) {
              E.push_back(en_of_ricci_target(tm, tm.from_function(g * (sign * sc * k))));
              s.rows.push_back({double(k), NAN, E.back()});
            }
            for (int k = 1; k < steps; ++k)
              r.margin("decrease_" + std::to_string(k), E[k - 1] - E[k], 0.0);
            // growth trend: slope of log|E| against log b over the last half
            int h = steps / 2;
            double slope = std::log(std::abs(E.back() / E[h - 1])) / std::log(double(steps) / h);
            r.value("final", E.back());
            r.value("loglog_slope", slope);
            break;
          }
        }
        r.series.emplace_back("sweep", std::move(s));
      });
  rep.cases = std::move(cases);
  detail::finish_report(rep, c, clock);
  return rep;
}

}  // namespace kef::exp
