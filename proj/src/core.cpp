#include "kef/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace kef {

namespace {

constexpr std::size_t kLeaf = 16;

template <class F>
double pairwise(std::size_t lo, std::size_t hi, const F& term) {
  if (hi - lo <= kLeaf) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    return s;
  }
  std::size_t mid = lo + (hi - lo) / 2;
  return pairwise(lo, mid, term) + pairwise(mid, hi, term);
}

}  // namespace

double pairwise_sum(std::span<const double> x) {
  return pairwise(0, x.size(), [&](std::size_t i) { return x[i]; });
}

double weighted_sum(std::span<const double> w, std::span<const double> x) {
  return pairwise(0, x.size(), [&](std::size_t i) { return w[i] * x[i]; });
}

double weighted_sum(std::span<const double> w, std::span<const double> x,
                    std::span<const double> y) {
  return pairwise(0, x.size(), [&](std::size_t i) { return w[i] * x[i] * y[i]; });
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double min_value(std::span<const double> x) {
  double m = x.empty() ? 0.0 : x[0];
  for (double v : x) m = std::min(m, v);
  return m;
}

Values axpby(double a, const Values& x, double b, const Values& y) {
  Values r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = a * x[i] + b * y[i];
  return r;
}

Values hadamard(const Values& x, const Values& y) {
  Values r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] * y[i];
  return r;
}

Values guarded_log(const Values& x, double guard, const char* what) {
  Values r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > guard)) {
      std::ostringstream os;
      os << what << ": positivity lost (value " << x[i] << " at node " << i << ")";
      throw DomainError(os.str());
    }
    r[i] = std::log(x[i]);
  }
  return r;
}

Values exp_values(const Values& x) {
  Values r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = std::exp(x[i]);
  return r;
}

}  // namespace kef
