#include <doctest.h>

#include <cmath>

#include "kef/models.hpp"
#include "kef/rng.hpp"
#include "kef/toric_geometry.hpp"

using namespace kef;
using namespace kef::toric;

namespace {

Mat3 random_sym(Rng& r, int n) {
  Mat3 A = Mat3::Zero();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) A(i, j) = A(j, i) = r.normal();
  return A;
}

// elementary symmetric polynomial e_j of the first n entries
double esym(const Eigen::VectorXcd& l, int j) {
  std::vector<std::complex<double>> e(j + 1, 0.0);
  e[0] = 1.0;
  for (int i = 0; i < l.size(); ++i)
    for (int k = j; k >= 1; --k) e[k] += e[k - 1] * l[i];
  return e[j].real();
}

ToricFunction sample_function(int n) {
  ToricFunction f(n);
  f.set_fs_weight(fs_weight(n));
  ProfileTerm g;
  g.kind = ProfileTerm::Kind::gaussian;
  g.amp = 0.3;
  g.center = Vec3(0.4, -0.2, 0.1);
  g.S = Mat3::Identity() * 0.7;
  g.S(0, 1) = g.S(1, 0) = 0.1;
  ProfileTerm b;
  b.kind = ProfileTerm::Kind::bump;
  b.amp = -0.2;
  b.center = Vec3(-0.3, 0.5, 0.0);
  b.S = Mat3::Identity() * 0.2;
  ProfileTerm s;
  s.kind = ProfileTerm::Kind::shifted;
  s.amp = 0.15;
  s.center = Vec3(0.7, -1.1, 0.3);
  f.add_term(g).add_term(b).add_term(s);
  return f;
}

}  // namespace

TEST_CASE("mixed discriminant agrees with the characteristic polynomial") {
  Rng r(17);
  for (int n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      Mat3 A = random_sym(r, n), B = random_sym(r, n);
      B.topLeftCorner(n, n) += 4.0 * Eigen::MatrixXd::Identity(n, n);  // invertible
      Eigen::MatrixXd Bn = B.topLeftCorner(n, n), An = A.topLeftCorner(n, n);
      Eigen::VectorXcd lam = (Bn.inverse() * An).eigenvalues();
      double detB = Bn.determinant();
      double scale = std::pow(An.norm() + Bn.norm(), n);
      for (int j = 0; j <= n; ++j) {
        std::vector<Mat3> m;
        for (int i = 0; i < j; ++i) m.push_back(A);
        for (int i = j; i < n; ++i) m.push_back(B);
        double binom = 1;
        for (int i = 1; i <= j; ++i) binom = binom * (n - j + i) / i;
        double oracle = detB * esym(lam, j) / binom;
        CHECK(std::abs(mixed_discriminant(m, n) - oracle) <= 1e-12 * scale);
      }
    }
  }
}

TEST_CASE("mixed discriminant is symmetric and reduces to det") {
  Rng r(5);
  Mat3 A = random_sym(r, 3), B = random_sym(r, 3), C = random_sym(r, 3);
  std::vector<Mat3> abc{A, B, C}, cab{C, A, B}, aaa{A, A, A};
  CHECK(mixed_discriminant(abc, 3) == doctest::Approx(mixed_discriminant(cab, 3)).epsilon(1e-13));
  CHECK(mixed_discriminant(aaa, 3) == doctest::Approx(A.determinant()).epsilon(1e-13));
  CHECK(det_n(A, 2) == doctest::Approx(A.topLeftCorner(2, 2).determinant()).epsilon(1e-14));
  CHECK_THROWS_AS(mixed_discriminant(std::vector<Mat3>{A, B}, 3), ConfigError);
}

TEST_CASE("chart matrices are involutions and in_chart is a change of variables") {
  for (int n = 1; n <= 3; ++n) {
    auto f = sample_function(n);
    for (int c = 0; c <= n; ++c) {
      Mat3 A = chart_matrix(n, c);
      CHECK((A.topLeftCorner(n, n) * A.topLeftCorner(n, n) - Eigen::MatrixXd::Identity(n, n)).norm() ==
            0.0);
      auto fc = f.in_chart(c);
      Rng r(100 + c);
      for (int k = 0; k < 5; ++k) {
        Vec3 y = Vec3::Zero();
        for (int i = 0; i < n; ++i) y[i] = r.uniform(-3, 3);
        Vec3 x = A * y;
        CHECK(fc.value(y.data()) == doctest::Approx(f.value(x.data())).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("dominant chart picks the largest softmax weight") {
  double x[3] = {2.0, 5.0, -1.0};
  CHECK(dominant_chart(3, x) == 2);
  double y[3] = {-4.0, -3.0, -5.0};
  CHECK(dominant_chart(3, y) == 0);
  double p0, p[3];
  softmax(3, x, p0, p);
  CHECK(p0 + p[0] + p[1] + p[2] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("jets agree with finite differences") {
  const int n = 3;
  auto f = sample_function(n);
  double x[3] = {0.3, -0.4, 0.2};
  auto check_jet = [&](auto eval) {
    Jet J = eval(x, 4);
    const double h = 1e-4;
    for (int i = 0; i < n; ++i) {
      double xp[3] = {x[0], x[1], x[2]}, xm[3] = {x[0], x[1], x[2]};
      xp[i] += h;
      xm[i] -= h;
      Jet P = eval(xp, 4), M = eval(xm, 4);
      CHECK(J.g[i] == doctest::Approx((P.v - M.v) / (2 * h)).epsilon(1e-7));
      for (int j = 0; j < n; ++j) {
        CHECK(J.h[i][j] == doctest::Approx((P.g[j] - M.g[j]) / (2 * h)).epsilon(1e-6));
        for (int k = 0; k < n; ++k) {
          CHECK(J.t[i][j][k] == doctest::Approx((P.h[j][k] - M.h[j][k]) / (2 * h)).epsilon(1e-6));
          for (int l = 0; l < n; ++l)
            CHECK(std::abs(J.q[i][j][k][l] - (P.t[j][k][l] - M.t[j][k][l]) / (2 * h)) < 1e-6);
        }
      }
    }
  };
  check_jet([&](const double* y, int o) { return log_partition_jet(n, y, o); });
  check_jet([&](const double* y, int o) { return f.jet(y, o); });
}

TEST_CASE("box quadrature recovers the Fubini-Study volume") {
  CHECK(fs_volume(2) == 9.0);
  CHECK(fs_weight(3) == 4.0);
  // the error decays geometrically in the point count
  double prev = 1.0;
  for (int p : {48, 64, 96}) {
    auto grid = make_box_grid(2, 40.0, p);
    std::vector<MatrixField> f(2, hessian_field(fs_toric_potential(2), *grid));
    double err = std::abs(wedge_integral(f, *grid) / fs_volume(2) - 1.0);
    CHECK(err < 0.1 * prev);
    prev = err;
  }
  CHECK(prev < 1e-11);
  auto small = make_box_grid(2, 4.0, 32);
  std::vector<MatrixField> f(2, hessian_field(fs_toric_potential(2), *small));
  CHECK_THROWS_AS(wedge_integral(f, *small), TruncationError);
}

TEST_CASE("toric model base is Kahler-Einstein") {
  ToricModel m(2, 40.0, 48);
  auto z = m.zero();
  CHECK(max_abs(m.ricci_shift_values(z)) < 1e-10);
  auto w = m.base_form();
  std::array<const MatrixForm*, 2> ww{&w, &w};
  CHECK(m.integrate(nullptr, ww) == doctest::Approx(m.volume()).epsilon(1e-7));
  auto p = m.from_function(random_perturbation(2, 4, 4, 0.05));
  CHECK(m.kahler_margin(p) > 0.0);
  auto q = m.from_function(random_perturbation(2, 4, 4, 0.05));
  CHECK(p.v == q.v);
}
