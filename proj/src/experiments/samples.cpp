#include "samples.hpp"

#include "kef/functionals.hpp"

namespace kef::exp::detail {

namespace {
constexpr int kMaxHalvings = 30;
constexpr int kToricTerms = 4;
}  // namespace

SphereSample sphere_sample(const SphereModel& m, std::uint64_t seed, int Lp, double amplitude,
                           bool ricci_positive) {
  SphereSample s{s2::random_band_limited(m.grid(), seed, Lp, true, amplitude), 0};
  while (ricci_positive && !in_H_plus(m, s.p).member) {
    if (++s.halvings > kMaxHalvings) throw DomainError("sphere_sample: no Ricci-positive scaling");
    s.p = s.p * 0.5;
  }
  return s;
}

ToricSample toric_sample(const ToricModel& m, std::uint64_t seed, double amplitude,
                         bool ricci_positive) {
  ToricSample s;
  s.amplitude = amplitude;
  for (;;) {
    s.fn = toric::random_perturbation(m.dim(), seed, kToricTerms, s.amplitude);
    s.p = m.from_function(s.fn);
    if (m.kahler_margin(s.p) > 0.0 && (!ricci_positive || in_H_plus(m, s.p).member)) return s;
    if (++s.halvings > kMaxHalvings) throw DomainError("toric_sample: no admissible scaling");
    s.amplitude *= 0.5;
  }
}

}  // namespace kef::exp::detail
