#include <cmath>
#include <string>

#include "common.hpp"
#include "kef/functionals.hpp"

namespace kef::exp {

SuiteReport futaki_suite(const SuiteConfig& c) {
  detail::SuiteClock clock;
  SuiteReport rep = detail::start_report(c, "futaki");
  const Tolerances& t = c.tol;
  using C = s2::MobiusMap::C;
  const C one(1.0, 0.0), i(0.0, 1.0), z(0.0, 0.0);
  // sl(2, C) as a real Lie algebra; the imaginary diagonal one is a rotation
  struct Gen {
    const char* name;
    std::array<C, 4> X;
  };
  const std::vector<Gen> gens = {
      {"zero", {z, z, z, z}},          {"H", {one, z, z, -one}}, {"E", {z, one, z, z}},
      {"F", {z, z, one, z}},           {"iH", {i, z, z, -i}},    {"iE", {z, i, z, z}},
      {"iF", {z, z, i, z}},
  };
  SphereModel sm(c.sphere_l);
  int n = sm.dim();
  auto cases = detail::run_cases(
      gens.size(), c.workers, [&](std::size_t g) { return std::string("generator-") + gens[g].name; },
      [&](std::size_t g, CaseRecord& r) {
        r.inputs = {{"model", sm.name()}, {"generator", gens[g].name}, {"step", c.futaki_step}};
        std::vector<FutakiValue> F;
        for (int k = 0; k <= n; ++k) F.push_back(futaki(sm, gens[g].X, k, c.futaki_step));
        for (int k = 0; k <= n; ++k) {
          std::string s = "_k" + std::to_string(k);
          r.value("re" + s, F[k].re);
          r.value("im" + s, F[k].im);
          r.residual("F" + s, std::hypot(F[k].re, F[k].im), t.futaki);
          r.residual("F" + s + "_minus_F_0", std::hypot(F[k].re - F[0].re, F[k].im - F[0].im),
                     t.futaki_coincide);
        }
      });
  rep.cases = std::move(cases);
  detail::finish_report(rep, c, clock);
  return rep;
}

}  // namespace kef::exp
