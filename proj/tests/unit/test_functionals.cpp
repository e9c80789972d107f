#include <doctest.h>

#include <cmath>

#include "kef/functionals.hpp"
#include "kef/solvers.hpp"

using namespace kef;

namespace {

struct Pair {
  SphereModel m{24};
  s2::ScalarField a = s2::random_band_limited(m.grid(), 21, 4, true, 0.04);
  s2::ScalarField b = s2::random_band_limited(m.grid(), 22, 4, true, 0.04);
};

}  // namespace

TEST_CASE("Aubin functionals on the sphere") {
  Pair p;
  auto& m = p.m;
  double I = aubin_I(m, p.a, p.b), J = aubin_J(m, p.a, p.b);
  CHECK(I == doctest::Approx(aubin_I_gradient(m, p.a, p.b)).epsilon(1e-10));
  CHECK(J == doctest::Approx(aubin_J_path(m, p.a, p.b)).epsilon(1e-10));
  // n = 1: J <= I <= 2J, I_1 = I/2, J_0 = J
  CHECK(J <= I);
  CHECK(I <= 2 * J);
  CHECK(I_k(m, p.a, p.b, 1) == doctest::Approx(I / 2).epsilon(1e-12));
  CHECK(J_k_closed(m, p.a, p.b, 0) == doctest::Approx(J).epsilon(1e-12));
  CHECK(J_k(m, p.a, p.b, 1, JkRoute::path) ==
        doctest::Approx(J_k(m, p.a, p.b, 1, JkRoute::identity)).epsilon(1e-9));
  CHECK(aubin_I(m, p.a, p.a) == 0.0);
  CHECK_THROWS_AS(I_k(m, p.a, p.b, 2), ConfigError);
}

TEST_CASE("I - J cocycle defect vanishes") {
  Pair p;
  auto c = s2::random_band_limited(p.m.grid(), 23, 4, true, 0.04);
  double scale = aubin_I(p.m, p.a, c);
  CHECK(std::abs(cocycle_defect_IJ(p.m, p.a, p.b, c)) < 1e-12 * std::max(1.0, scale));
}

TEST_CASE("E_k routes agree on the sphere") {
  Pair p;
  PairEnergies<SphereModel> e(p.m, p.a, p.b);
  for (int k = 0; k <= 1; ++k) {
    double ref = e.Ek(k, EkRoute::via_E0);
    double scale = std::max(std::abs(ref), e.I());
    CHECK(std::abs(e.Ek(k, EkRoute::path) - ref) < 1e-8 * scale);
    CHECK(std::abs(e.Ek(k, EkRoute::via_En) - ref) < 1e-8 * scale);
    for (int l = 0; l <= k + 1; ++l)
      CHECK(std::abs(e.Ek(k, EkRoute::interpolated, l) - ref) < 1e-8 * scale);
  }
  CHECK_THROWS_AS(e.Ek(1, EkRoute::interpolated, 3), ConfigError);
}

TEST_CASE("E_k difference identity closes with the normalization constant") {
  Pair p;
  auto d = ek_difference(p.m, p.a, p.b, 1, 0.5);
  CHECK(std::abs(d.residual()) < 1e-7);
  CHECK(d.literal_residual() == doctest::Approx(-d.c).epsilon(1e-6));
}

TEST_CASE("variations converge at second order") {
  Pair p;
  auto v = p.b - p.a;
  auto w = s2::random_band_limited(p.m.grid(), 24, 4, false, 0.01);
  for (auto kind : {Variation::I_minus_J, Variation::J, Variation::I_k, Variation::E_k}) {
    auto r = variation_check(p.m, p.a, v, w, kind, 1, 0.5);
    CHECK(r.residual() < 1e-6);
    CHECK(r.order() > 1.9);
  }
}

TEST_CASE("membership tests at the base") {
  SphereModel m(16);
  CHECK(in_H_plus(m, m.zero()).member);
  CHECK(in_A_k(m, m.zero(), 1).margin == doctest::Approx(0.0));
  CHECK(lambda1_orthogonal(m, m.zero()).member);
  std::vector<double> c(s2::coeff_count(16), 0.0);
  c[s2::coeff_index(1, 0)] = 0.1;
  CHECK_FALSE(lambda1_orthogonal(m, s2::ScalarField(m.grid(), c)).member);
}

TEST_CASE("toric functionals agree across expressions") {
  ToricModel m(2, 40.0, 48);
  auto a = m.from_function(toric::random_perturbation(2, 31, 4, 0.05));
  auto b = m.from_function(toric::random_perturbation(2, 32, 4, 0.2));
  double I = aubin_I(m, a, b);
  CHECK(std::abs(aubin_I_gradient(m, a, b) - I) < 1e-6 * I);
  CHECK(std::abs(aubin_J_path(m, a, b, {PathSpec::Kind::affine, 17}) - aubin_J(m, a, b)) < 1e-6 * I);
  // n = 2: J <= I <= 3J
  double J = aubin_J(m, a, b);
  CHECK(J <= I);
  CHECK(I <= 3 * J);
}

TEST_CASE("continuity path pieces") {
  SphereModel m(24);
  auto a = s2::random_band_limited(m.grid(), 41, 4, true, 0.05);
  auto node = solvers::calabi_yau_segment(m, a, -0.5);
  CHECK(node.residual < 1e-9);
  CHECK(std::abs(node.phi.mean()) < 1e-13);

  solvers::ContinuityConfig cfg;
  auto warm = solvers::calabi_yau_segment(m, a, 0.0).phi;
  auto step = solvers::aubin_step(m, a, s2::ricci_potential(a), 0.3, warm, cfg);
  CHECK(step.residual() < cfg.newton_tol);
  CHECK(solvers::aubin_path_residual(a, step.phi, 0.3) < 1e-8);

  auto psi = solvers::prescribe_ricci(m, a);
  auto ric = m.kahler(m.ricci_shift(psi));
  auto target = m.kahler(a);
  double err = 0;
  for (std::size_t i = 0; i < ric.size(); ++i) err = std::max(err, std::abs(ric[i] - target[i]));
  CHECK(err < 1e-8);
}
