#include <doctest.h>

#include <cmath>
#include <numeric>

#include "kef/core.hpp"
#include "kef/rng.hpp"

using namespace kef;

TEST_CASE("pairwise_sum matches a long double reference") {
  Values x(1001);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.37 * i) * 1e3 + 1e-3 * i;
  long double ref = 0;
  for (double v : x) ref += v;
  CHECK(pairwise_sum(x) == doctest::Approx(double(ref)).epsilon(1e-14));
  CHECK(pairwise_sum(Values{}) == 0.0);
}

TEST_CASE("gauss_legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {1, 2, 5, 17, 64}) {
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    REQUIRE(x.size() == std::size_t(n));
    CHECK(std::is_sorted(x.begin(), x.end()));
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += w[i] * std::pow(x[i], p);
      double exact = (p % 2) ? 0.0 : 2.0 / (p + 1);
      CHECK(std::abs(s - exact) < 1e-13);
    }
  }
}

TEST_CASE("guarded_log rejects values below the guard") {
  CHECK(guarded_log({1.0, std::exp(1.0)}, 1e-12, "x")[1] == doctest::Approx(1.0));
  CHECK_THROWS_AS(guarded_log({1.0, -1e-3}, 1e-12, "x"), DomainError);
}

TEST_CASE("rng streams repeat for equal seeds") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 10; ++i) {
    double x = a.normal();
    CHECK(x == b.normal());
    (void)c;
  }
  Rng d(7);
  double m = 0, v = 0;
  const int N = 20000;
  for (int i = 0; i < N; ++i) {
    double x = d.normal();
    m += x;
    v += x * x;
  }
  CHECK(std::abs(m / N) < 0.05);
  CHECK(std::abs(v / N - 1.0) < 0.05);
}
