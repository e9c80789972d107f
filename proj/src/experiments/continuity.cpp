#include <cmath>
#include <string>

#include "common.hpp"
#include "kef/functionals.hpp"
#include "kef/solvers.hpp"

namespace kef::exp {

namespace {

// Value at x of the polynomial through (t[i], y[i]), i in [lo, lo + m).
double lagrange(const std::vector<double>& t, const std::vector<double>& y, std::size_t lo,
                std::size_t m, double x) {
  double s = 0.0;
  for (std::size_t i = lo; i < lo + m; ++i) {
    double w = 1.0;
    for (std::size_t j = lo; j < lo + m; ++j)
      if (j != i) w *= (x - t[j]) / (t[i] - t[j]);
    s += w * y[i];
  }
  return s;
}

// Integral over [a, b] of the polynomial through nodes lo..lo+m-1 (degree < 6).
double lagrange_integral(const std::vector<double>& t, const std::vector<double>& y,
                         std::size_t lo, std::size_t m, double a, double b) {
  std::vector<double> x, w;
  gauss_legendre(3, x, w);
  double s = 0.0;
  for (int q = 0; q < 3; ++q)
    s += w[q] * lagrange(t, y, lo, m, 0.5 * (a + b) + 0.5 * (b - a) * x[q]);
  return 0.5 * (b - a) * s;
}

// Cumulative integral of y from t[0] to every node, piecewise cubic through
// the four nodes around each interval.
std::vector<double> cumulative_cubic(const std::vector<double>& t, const std::vector<double>& y) {
  std::size_t N = t.size();
  std::vector<double> c(N, 0.0);
  for (std::size_t i = 0; i + 1 < N; ++i) {
    std::size_t m = std::min<std::size_t>(4, N);
    std::size_t lo = i == 0 ? 0 : i - 1;
    if (lo + m > N) lo = N - m;
    c[i + 1] = c[i] + lagrange_integral(t, y, lo, m, t[i], t[i + 1]);
  }
  return c;
}

constexpr std::size_t kRichardsonNodes = 5;

double extrapolate_to_one(const std::vector<double>& t, const std::vector<double>& y) {
  std::size_t m = std::min(kRichardsonNodes, t.size());
  return lagrange(t, y, t.size() - m, m, 1.0);
}

void check_trajectory(const SphereModel& m, const s2::ScalarField& a,
                      const solvers::ContinuityTrajectory& tr, const Tolerances& tol,
                      CaseRecord& r) {
  int n = m.dim();
  Series s;
  s.columns = {"t", "c_t", "residual", "path_residual", "iterations", "I-J"};
  for (int k = 0; k <= n; ++k) s.columns.push_back("E_" + std::to_string(k));
  for (const char* col : {"F", "mean_f", "I_ricci", "I_base"}) s.columns.push_back(col);

  double worst_cy = 0.0, worst_path = 0.0, worst_newton = 0.0, worst_mono = INFINITY;
  double worst_order = INFINITY;
  std::vector<double> t2, ij, F, Iric, Ibase;
  std::vector<std::vector<double>> E(n + 1);
  const solvers::TrajectoryNode* prev = nullptr;
  for (const auto& nd : tr.nodes) {
    std::vector<double> row = {nd.t, nd.c, nd.residual, nd.path_residual, double(nd.iterations),
                               nd.I_minus_J};
    for (double e : nd.E) row.push_back(e);
    for (double v : {nd.F, nd.mean_f, nd.I_ricci, nd.I_base}) row.push_back(v);
    s.rows.push_back(std::move(row));
    if (nd.t <= 0.0) worst_cy = std::max(worst_cy, nd.residual);
    if (nd.t > 0.0) {
      worst_path = std::max(worst_path, nd.path_residual);
      worst_newton = std::max(worst_newton, nd.residual);
      // observed convergence order of Newton from the last three residuals
      // above the floor
      const auto& h = nd.newton;
      for (std::size_t i = 2; i < h.size(); ++i)
        if (h[i] > 1e-13 && h[i - 1] < 1e-2)
          worst_order = std::min(worst_order, std::log(h[i] / h[i - 1]) / std::log(h[i - 1] / h[i - 2]));
    }
    if (prev) worst_mono = std::min(worst_mono, nd.I_minus_J - prev->I_minus_J);
    prev = &nd;
    if (nd.t >= 0.0) {
      t2.push_back(nd.t);
      ij.push_back(nd.I_minus_J);
      F.push_back(nd.F);
      Iric.push_back(nd.I_ricci);
      Ibase.push_back(nd.I_base);
      for (int k = 0; k <= n; ++k) E[k].push_back(nd.E[k]);
    }
  }
  r.value("nodes", double(tr.nodes.size()));
  r.value("bisections", double(tr.bisections));
  r.value("calabi_yau_residual", worst_cy);
  r.value("newton_residual", worst_newton);
  if (std::isfinite(worst_order)) r.value("newton_order", worst_order);
  r.residual("path_equation", worst_path, tol.path_residual);
  r.residual("calabi_yau_equation", worst_cy, tol.path_residual);
  if (std::isfinite(worst_mono)) r.margin("I_minus_J_nondecreasing", worst_mono, -tol.monotone);

  // E_0(omega_{phi_0}, omega_tau) against its expression through I - J
  std::vector<double> cum = cumulative_cubic(t2, ij);
  double worst_e0 = 0.0;
  for (std::size_t i = 0; i < t2.size(); ++i) {
    double lhs = E[0][i] - E[0][0];
    double rhs = -(1.0 - t2[i]) * ij[i] + ij[0] - cum[i];
    worst_e0 = std::max(worst_e0, std::abs(lhs - rhs));
  }
  r.residual("E0_along_path", worst_e0, tol.ezero);

  // (1 - tau)^2 bound for I(omega_tau, Ric omega_tau) from t1 on
  double t1 = continuity_t1(n);
  r.value("t1", t1);
  double worst_iik = INFINITY;
  for (std::size_t i = 0; i < t2.size(); ++i)
    if (t2[i] >= t1)
      worst_iik = std::min(worst_iik, n * (1.0 - t2[i]) * (1.0 - t2[i]) * Ibase[i] - Iric[i]);
  r.margin("I_ricci_bound", worst_iik, -tol.margin);

  // limits at t = 1
  std::size_t last = std::min(kRichardsonNodes, t2.size());
  double tail = lagrange_integral(t2, ij, t2.size() - last, last, t2.back(), 1.0);
  double integral = cum.back() + tail;
  auto ra = ricci_potential(m, a);
  double l = extrapolate_to_one(t2, F);
  double l0 = extrapolate_to_one(t2, E[0]);
  r.value("integral_I_minus_J", integral);
  r.value("l", l);
  r.value("l_truncated", F.back());
  r.value("mean_f_base", ra.mean_f);
  r.value("l_0", l0);
  r.residual("l_vs_integral", relative_residual(l, -integral, 0.0), tol.limit);
  r.residual("l_plus_mean_f_vs_l_0", relative_residual(l + ra.mean_f, l0, 0.0), tol.limit);
  for (int k = 1; k <= n; ++k) {
    double lk = extrapolate_to_one(t2, E[k]);
    double Ik = I_k(m, a, ra.rho, k);
    r.value("l_" + std::to_string(k), lk);
    r.value("I_" + std::to_string(k) + "_ricci_base", Ik);
    r.residual("l_0_vs_l_" + std::to_string(k), relative_residual(l0, lk + Ik, 0.0), tol.limit);
  }
  r.series.emplace_back("trajectory", std::move(s));
}

}  // namespace

SuiteReport continuity_suite(const SuiteConfig& c) {
  detail::SuiteClock clock;
  SuiteReport rep = detail::start_report(c, "continuity");
  SphereModel sm(c.sphere_l);
  solvers::ContinuityConfig cc;
  cc.dt = c.continuity_dt;
  cc.t_max = c.continuity_t_max;
  auto cases = detail::run_cases(
      1 + c.continuity_bases, c.workers,
      [](std::size_t i) { return i == 0 ? std::string("ke-base") : detail::case_id("perturbed", i); },
      [&](std::size_t i, CaseRecord& r) {
        s2::ScalarField a = sm.zero();
        if (i > 0) {
          a = s2::random_band_limited(sm.grid(), derive_seed(c.seed, 61, i), c.continuity_lp, true,
                                      c.continuity_amplitude);
          r.inputs = {{"model", sm.name()}, {"index", i}, {"lp", c.continuity_lp},
                      {"amplitude", c.continuity_amplitude}};
        } else {
          r.inputs = {{"model", sm.name()}, {"base", "omega0"}};
        }
        r.value("base_kahler_margin", sm.kahler_margin(a));
        auto tr = solvers::continuity_run(sm, a, cc);
        check_trajectory(sm, a, tr, c.tol, r);
      });
  rep.cases = std::move(cases);
  detail::finish_report(rep, c, clock);
  return rep;
}

}  // namespace kef::exp
