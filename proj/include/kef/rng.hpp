#pragma once

#include <cstdint>
#include <random>

namespace kef {

// Seeded generator whose normal draws are platform independent
// (Box-Muller over raw 64-bit words rather than std::normal_distribution).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed ^ 0x9E3779B97F4A7C15ULL) {}

  double uniform() { return (eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  std::uint64_t next() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace kef
