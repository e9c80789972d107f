#include <cmath>
#include <string>

#include "common.hpp"
#include "kef/functionals.hpp"
#include "kef/rng.hpp"
#include "samples.hpp"

namespace kef::exp {

namespace {

using detail::case_id;

std::string kl(const char* what, int k, int l = -1) {
  std::string s = std::string(what) + "_k" + std::to_string(k);
  if (l >= 0) s += "_l" + std::to_string(l);
  return s;
}

// All pair identities. With exact = true the residuals are absolute, which
// is what the (omega, omega) case calls for.
template <class M>
void pair_identities(const M& m, const typename M::Potential& a, const typename M::Potential& b,
                     const PathSpec& spec, double tol, bool exact, CaseRecord& r) {
  int n = m.dim();
  PairEnergies<M> E(m, a, b);
  double I = E.I(), J = E.J();
  auto check = [&](const std::string& name, double x, double y) {
    r.residual(name, exact ? std::abs(x - y) : relative_residual(x, y, I), tol);
  };
  r.value("I", I);
  r.value("J", J);
  r.value("ricci_margin_a", in_H_plus(m, a).margin);

  check("I_two_expressions", I, aubin_I_gradient(m, a, b));
  check("J_path", J, aubin_J_path(m, a, b, spec));
  for (int k = 0; k <= n; ++k) {
    double Ik = I_k(m, a, b, k);
    double Jk = J_k_closed(m, a, b, k);
    check(kl("I_k_two_expressions", k), Ik, I_k_gradient(m, a, b, k));
    check(kl("IkJk", k), Ik, J - Jk);
    check(kl("J_k_path", k), Jk, J_k_path(m, a, b, k, spec));
  }

  std::vector<double> path(n + 1);
  for (int k = 0; k <= n; ++k) path[k] = E.Ek(k, EkRoute::path, 0, spec);
  double E0 = E.E0(), En = E.En();
  r.value("E0", E0);
  r.value("En", En);
  r.value("mean_f_a", E.ricci_a().mean_f);
  r.value("mean_f_b", E.ricci_b().mean_f);
  check("DT", path[0], E.F() - E.ricci_b().mean_f + E.ricci_a().mean_f);
  check("FzeroEn", path[n], En);
  check("BM", path[n], E0 + E.J_ricci_b() - E.J_ricci_a());
  for (int k = 0; k <= n; ++k) {
    r.value(kl("E_path", k), path[k]);
    for (int l = 0; l <= k + 1; ++l)
      check(kl("BMR", k, l), E.Ek(k, EkRoute::interpolated, l), path[k]);
  }

  for (int k = 1; k <= n; ++k) {
    auto d = ek_difference(m, a, b, k, 0.5);
    r.residual(kl("Ek_difference", k),
               exact ? std::abs(d.residual())
                     : relative_residual(d.lhs, d.rhs, std::max(std::abs(d.lhs), I)),
               tol);
    r.value(kl("Ek_difference_lhs", k), d.lhs);
    r.value(kl("Ek_difference_c", k), d.c);
    r.value(kl("Ek_difference_literal", k), d.literal_residual());
  }
}

template <class M>
void triple_identities(const M& m, const typename M::Potential& a, const typename M::Potential& b,
                       const typename M::Potential& c, double tol, CaseRecord& r) {
  int n = m.dim();
  PairEnergies<M> ab(m, a, b), bc(m, b, c), ac(m, a, c);
  double scale = std::max({ab.I(), bc.I(), ac.I()});
  r.value("I_scale", scale);
  for (int k = 0; k <= n; ++k) {
    double lhs = ab.Ek(k, EkRoute::via_E0) + bc.Ek(k, EkRoute::via_E0);
    double rhs = ac.Ek(k, EkRoute::via_E0);
    r.residual(kl("E_cocycle", k), relative_residual(lhs, rhs, scale), tol);
  }
  double defect = cocycle_defect_IJ(m, a, b, c);
  r.value("IJ_cocycle_defect", defect);
  r.residual("IJ_cocycle", std::abs(defect) / std::max(scale, 1e-300), tol);
}

template <class M>
void variations(const M& m, const typename M::Potential& a, const typename M::Potential& v,
                const typename M::Potential& w, const Tolerances& t, CaseRecord& r) {
  int n = m.dim();
  auto one = [&](const std::string& name, Variation kind, int k) {
    auto res = variation_check(m, a, v, w, kind, k, 0.5, 1e-3);
    r.value(name + "_integrand", res.integrand);
    r.residual(name + "_residual", res.residual(), t.variation_residual);
    r.margin(name + "_order", res.order(), t.variation_order);
  };
  one("I_minus_J", Variation::I_minus_J, 0);
  one("J", Variation::J, 0);
  for (int k = 1; k <= n; ++k) one(kl("I", k), Variation::I_k, k);
  for (int k = 0; k < n; ++k) one(kl("J", k), Variation::J_k, k);
  for (int k = 0; k <= n; ++k) one(kl("E", k), Variation::E_k, k);
}

// D(A^{n-j}, B^j) against det B e_{n-j}(lambda) / C(n, j), lambda the
// eigenvalues of B^{-1/2} A B^{-1/2}.
void mixed_discriminant_case(int n, std::uint64_t seed, double tol, CaseRecord& r) {
  Rng rng(seed);
  Eigen::MatrixXd X(n, n), Y(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      X(i, j) = rng.normal();
      Y(i, j) = rng.normal();
    }
  Eigen::MatrixXd A = 0.5 * (X + X.transpose());
  Eigen::MatrixXd B = Y * Y.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(B);
  Eigen::MatrixXd Bmh = eb.operatorInverseSqrt();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Bmh * A * Bmh);
  Eigen::VectorXd lam = es.eigenvalues();
  double detB = B.determinant();
  // elementary symmetric polynomials e_0..e_n
  std::vector<double> e(n + 1, 0.0);
  e[0] = 1.0;
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k >= 1; --k) e[k] += lam(i) * e[k - 1];
  toric::Mat3 A3 = toric::Mat3::Zero(), B3 = toric::Mat3::Zero();
  A3.topLeftCorner(n, n) = A;
  B3.topLeftCorner(n, n) = B;
  for (int j = 0; j <= n; ++j) {
    std::vector<toric::Mat3> slot;
    for (int i = 0; i < n - j; ++i) slot.push_back(A3);
    for (int i = 0; i < j; ++i) slot.push_back(B3);
    double polar = toric::mixed_discriminant(slot, n);
    double oracle = detB * e[n - j] / binom(n, j);
    double scale = std::pow(A.norm(), n - j) * std::pow(B.norm(), j);
    r.value("D_j" + std::to_string(j), polar);
    r.residual("polarization_vs_charpoly_j" + std::to_string(j),
               relative_residual(polar, oracle, scale), tol);
  }
}

}  // namespace

SuiteReport identity_suite(const SuiteConfig& c) {
  detail::SuiteClock clock;
  SuiteReport rep = detail::start_report(c, "identity");
  const Tolerances& t = c.tol;
  PathSpec spec{PathSpec::Kind::affine, c.path_nodes};

  SphereModel sm(c.sphere_l);
  auto sample = [&](std::uint64_t stream, std::size_t i, double amp, bool hplus) {
    return detail::sphere_sample(sm, derive_seed(c.seed, stream, i), c.sphere_lp, amp, hplus).p;
  };

  auto add = [&](std::vector<CaseRecord> v) {
    for (auto& x : v) rep.cases.push_back(std::move(x));
  };

  if (c.identity_sphere) {
    add(detail::run_cases(
        1, c.workers, [](std::size_t) { return std::string("sphere-trivial"); },
        [&](std::size_t, CaseRecord& r) {
          r.inputs = {{"model", sm.name()}, {"pair", "(omega, omega)"}};
          pair_identities(sm, sm.zero(), sm.zero(), spec, t.exact, true, r);
        }));
    add(detail::run_cases(
        c.identity_sphere_pairs, c.workers, [](std::size_t i) { return case_id("sphere-pair", i); },
        [&](std::size_t i, CaseRecord& r) {
          auto a = sample(1, i, c.sphere_amplitude, true);
          auto b = sample(2, i, c.sphere_amplitude, false);
          r.inputs = {{"model", sm.name()}, {"index", i}};
          pair_identities(sm, a, b, spec, t.identity_sphere, false, r);
        }));
    add(detail::run_cases(
        c.identity_triples, c.workers, [](std::size_t i) { return case_id("sphere-triple", i); },
        [&](std::size_t i, CaseRecord& r) {
          r.inputs = {{"model", sm.name()}, {"index", i}};
          triple_identities(sm, sample(3, i, c.sphere_amplitude, true),
                            sample(4, i, c.sphere_amplitude, true),
                            sample(5, i, c.sphere_amplitude, true), t.identity_sphere, r);
        }));
    add(detail::run_cases(
        c.identity_variation_paths, c.workers,
        [](std::size_t i) { return case_id("sphere-variation", i); },
        [&](std::size_t i, CaseRecord& r) {
          r.inputs = {{"model", sm.name()}, {"index", i}, {"s", 0.5}, {"h", 1e-3}};
          variations(sm, sample(6, i, c.sphere_amplitude, true),
                     sample(7, i, 0.5 * c.sphere_amplitude, false),
                     sample(8, i, 0.25 * c.sphere_amplitude, false), t, r);
        }));
  }

  if (c.identity_toric) {
    add(detail::run_cases(
        c.identity_md_samples, c.workers, [](std::size_t i) { return case_id("mixed-discriminant", i); },
        [&](std::size_t i, CaseRecord& r) {
          int n = 2 + int(i % 2);
          r.inputs = {{"n", n}, {"index", i}};
          mixed_discriminant_case(n, derive_seed(c.seed, 20, i), t.mixed_discriminant, r);
        }));

    ToricModel tm(c.toric_n, c.toric_box, c.toric_points);
    auto tsample = [&](std::uint64_t stream, std::size_t i, double amp, bool hplus) {
      return detail::toric_sample(tm, derive_seed(c.seed, stream, i), amp, hplus).p;
    };
    add(detail::run_cases(
        1, c.workers, [](std::size_t) { return std::string("toric-trivial"); },
        [&](std::size_t, CaseRecord& r) {
          r.inputs = {{"model", tm.name()}, {"pair", "(omega, omega)"}};
          pair_identities(tm, tm.zero(), tm.zero(), spec, t.exact, true, r);
        }));
    add(detail::run_cases(
        c.identity_toric_pairs, c.workers, [](std::size_t i) { return case_id("toric-pair", i); },
        [&](std::size_t i, CaseRecord& r) {
          auto a = tsample(11, i, c.toric_amplitude, true);
          auto b = tsample(12, i, c.toric_target_amplitude, false);
          r.inputs = {{"model", tm.name()}, {"index", i}};
          pair_identities(tm, a, b, spec, t.identity_toric, false, r);
        }));
    add(detail::run_cases(
        c.identity_triples, c.workers, [](std::size_t i) { return case_id("toric-triple", i); },
        [&](std::size_t i, CaseRecord& r) {
          r.inputs = {{"model", tm.name()}, {"index", i}};
          triple_identities(tm, tsample(13, i, c.toric_amplitude, true),
                            tsample(14, i, c.toric_target_amplitude, false),
                            tsample(15, i, c.toric_target_amplitude, false), t.identity_toric, r);
        }));
    add(detail::run_cases(
        c.identity_variation_paths, c.workers,
        [](std::size_t i) { return case_id("toric-variation", i); },
        [&](std::size_t i, CaseRecord& r) {
          r.inputs = {{"model", tm.name()}, {"index", i}, {"s", 0.5}, {"h", 1e-3}};
          variations(tm, tsample(16, i, c.toric_amplitude, true),
                     tsample(17, i, 0.5 * c.toric_amplitude, false),
                     tsample(18, i, 0.25 * c.toric_amplitude, false), t, r);
        }));
  }
  detail::finish_report(rep, c, clock);
  return rep;
}

}  // namespace kef::exp
