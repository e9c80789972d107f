#pragma once

#include <cstdint>

#include "kef/models.hpp"

namespace kef::exp::detail {

struct SphereSample {
  s2::ScalarField p;
  int halvings = 0;
};

// Band-limited Kahler potential; with ricci_positive it is halved until
// Ric omega_p > 0 as well.
SphereSample sphere_sample(const SphereModel& m, std::uint64_t seed, int Lp, double amplitude,
                           bool ricci_positive);

struct ToricSample {
  toric::ToricFunction fn;
  ToricPotential p;
  double amplitude = 0.0;
  int halvings = 0;
};

// Sum of four shifted terms; halved until Kahler (and Ricci-positive when asked).
ToricSample toric_sample(const ToricModel& m, std::uint64_t seed, double amplitude,
                         bool ricci_positive);

}  // namespace kef::exp::detail
