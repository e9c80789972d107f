#include "kef/functionals.hpp"

namespace kef {

Membership lambda1_orthogonal(const SphereModel& /*m*/, const SphereModel::Potential& p,
                              double tol) {
  double s = 0.0;
  for (int mm = -1; mm <= 1; ++mm) s += p.coeff(1, mm) * p.coeff(1, mm);
  double norm = std::sqrt(s);
  return {norm <= tol, -norm};
}

FutakiValue futaki(const SphereModel& m, const std::array<s2::MobiusMap::C, 4>& X, int k,
                   double h) {
  using C = s2::MobiusMap::C;
  bool zero = true;
  for (const C& x : X) zero = zero && x == C(0.0);
  if (zero) return {};
  auto energy = [&](const std::array<C, 4>& Y, double t) {
    std::array<C, 4> tY;
    for (int i = 0; i < 4; ++i) tY[i] = t * Y[i];
    auto phi = s2::mobius_pullback(s2::MobiusMap::exp_of(tY), m.zero());
    return E_k(m, m.zero(), phi, k, EkRoute::via_E0);
  };
  std::array<C, 4> JX;
  for (int i = 0; i < 4; ++i) JX[i] = C(0.0, 1.0) * X[i];
  FutakiValue r;
  r.re = (energy(X, h) - energy(X, -h)) / (2.0 * h);
  r.im = -(energy(JX, h) - energy(JX, -h)) / (2.0 * h);
  return r;
}

}  // namespace kef
