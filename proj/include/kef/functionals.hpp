#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kef/core.hpp"
#include "kef/models.hpp"

// Energy functionals on pairs (omega_a, omega_b) = (omega0 + i ddbar a,
// omega0 + i ddbar b), written once against the model interface in models.hpp.
// Every functional is available through at least two independent routes.
namespace kef {

// ---------------------------------------------------------------- wedge helpers

// int h A^p ^ B^q ^ C^r with p + q + r = n.
template <class M>
double wedge(const M& m, const Values* h, const typename M::Form& A, int p,
             const typename M::Form& B, int q, const typename M::Form* C = nullptr, int r = 0) {
  if (p + q + r != m.dim()) throw ConfigError("wedge: exponents must sum to n");
  std::array<const typename M::Form*, 3> s{};
  int k = 0;
  for (int i = 0; i < p; ++i) s[k++] = &A;
  for (int i = 0; i < q; ++i) s[k++] = &B;
  for (int i = 0; i < r; ++i) s[k++] = C;
  return m.integrate(h, std::span<const typename M::Form* const>(s.data(), k));
}

inline double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline void check_k(int k, int n) {
  if (k < 0 || k > n) {
    std::ostringstream os;
    os << "functional index k=" << k << " outside [0," << n << "]";
    throw ConfigError(os.str());
  }
}

// ---------------------------------------------------------------- Aubin I, J, I_k, J_k

// Second expression: (1/V) int phi (omega_a^n - omega_b^n).
template <class M>
double aubin_I(const M& m, const typename M::Potential& a, const typename M::Potential& b) {
  auto phi = b - a;
  auto wa = m.kahler(a), wb = m.kahler(b);
  const Values& v = m.values(phi);
  int n = m.dim();
  return (wedge(m, &v, wa, n, wb, 0) - wedge(m, &v, wa, 0, wb, n)) / m.volume();
}

// First expression: (1/V) int i d phi ^ dbar phi ^ sum_l omega_a^{n-1-l} ^ omega_b^l.
template <class M>
double aubin_I_gradient(const M& m, const typename M::Potential& a,
                        const typename M::Potential& b) {
  auto phi = b - a;
  auto G = m.gradient_form(phi, phi);
  auto wa = m.kahler(a), wb = m.kahler(b);
  int n = m.dim();
  double s = 0.0;
  for (int l = 0; l <= n - 1; ++l) s += wedge(m, nullptr, G, 1, wa, n - 1 - l, &wb, l);
  return s / m.volume();
}

template <class M>
double aubin_J(const M& m, const typename M::Potential& a, const typename M::Potential& b) {
  auto phi = b - a;
  auto G = m.gradient_form(phi, phi);
  auto wa = m.kahler(a), wb = m.kahler(b);
  int n = m.dim();
  double s = 0.0;
  for (int l = 0; l <= n - 1; ++l) s += (n - l) * wedge(m, nullptr, G, 1, wa, n - l - 1, &wb, l);
  return s / (m.volume() * (n + 1));
}

// (1/(k+1)V) int phi (k omega_a^n - sum_{l=1}^k omega_a^{n-l} ^ omega_b^l).
template <class M>
double I_k(const M& m, const typename M::Potential& a, const typename M::Potential& b, int k) {
  int n = m.dim();
  check_k(k, n);
  if (k == 0) return 0.0;
  auto phi = b - a;
  auto wa = m.kahler(a), wb = m.kahler(b);
  const Values& v = m.values(phi);
  double s = k * wedge(m, &v, wa, n, wb, 0);
  for (int l = 1; l <= k; ++l) s -= wedge(m, &v, wa, n - l, wb, l);
  return s / ((k + 1) * m.volume());
}

template <class M>
double I_k_gradient(const M& m, const typename M::Potential& a, const typename M::Potential& b,
                    int k) {
  int n = m.dim();
  check_k(k, n);
  if (k == 0) return 0.0;
  auto phi = b - a;
  auto G = m.gradient_form(phi, phi);
  auto wa = m.kahler(a), wb = m.kahler(b);
  double s = 0.0;
  for (int l = 0; l <= k - 1; ++l)
    s += double(k - l) / (k + 1) * wedge(m, nullptr, G, 1, wa, n - 1 - l, &wb, l);
  return s / m.volume();
}

template <class M>
double J_k_closed(const M& m, const typename M::Potential& a, const typename M::Potential& b,
                  int k) {
  int n = m.dim();
  check_k(k, n);
  auto phi = b - a;
  auto G = m.gradient_form(phi, phi);
  auto wa = m.kahler(a), wb = m.kahler(b);
  double s = 0.0;
  for (int l = 0; l <= k - 1; ++l)
    s += double(n - k) / (k + 1) * (l + 1) * wedge(m, nullptr, G, 1, wa, n - 1 - l, &wb, l);
  for (int l = k; l <= n - 1; ++l) s += (n - l) * wedge(m, nullptr, G, 1, wa, n - 1 - l, &wb, l);
  return s / (m.volume() * (n + 1));
}

// Failure of I - J to be a cocycle, which should equal the oscillation term:
// (I-J)(a,c) - (I-J)(b,c) - (I-J)(a,b) + (1/V) int (b-a)(omega_c^n - omega_b^n).
template <class M>
double cocycle_defect_IJ(const M& m, const typename M::Potential& a,
                         const typename M::Potential& b, const typename M::Potential& c) {
  auto IJ = [&](const auto& x, const auto& y) { return aubin_I(m, x, y) - aubin_J(m, x, y); };
  auto phi1 = b - a;
  auto wb = m.kahler(b), wc = m.kahler(c);
  const Values& v = m.values(phi1);
  int n = m.dim();
  double osc = (wedge(m, &v, wc, n, wb, 0) - wedge(m, &v, wb, n, wc, 0)) / m.volume();
  return IJ(a, c) - IJ(b, c) - IJ(a, b) + osc;
}

// ---------------------------------------------------------------- paths

struct PathSpec {
  enum class Kind { affine, two_leg, quadratic };
  Kind kind = Kind::affine;
  int nodes = 33;
};

// Quadrature nodes of a path a -> b: position p_t, velocity, and weight.
template <class M>
struct PathNode {
  double t;
  double w;
  typename M::Potential p;
  typename M::Potential pdot;
};

template <class M>
std::vector<PathNode<M>> path_nodes(const M& m, const typename M::Potential& a,
                                    const typename M::Potential& b, const PathSpec& spec,
                                    const typename M::Potential* mid = nullptr) {
  (void)m;
  std::vector<double> x, w;
  gauss_legendre(spec.nodes, x, w);
  std::vector<PathNode<M>> out;
  auto leg = [&](const typename M::Potential& p0, const typename M::Potential& p1, double t0,
                 double t1, bool quadratic) {
    auto d = p1 - p0;
    for (int i = 0; i < spec.nodes; ++i) {
      double s = 0.5 * (x[i] + 1.0);
      double t = t0 + (t1 - t0) * s;
      double ws = 0.5 * w[i] * (t1 - t0);
      if (quadratic)
        out.push_back({t, ws, p0 + d * (s * s), d * (2.0 * s)});
      else
        out.push_back({t, ws, p0 + d * s, d * (1.0 / (t1 - t0))});
    }
  };
  switch (spec.kind) {
    case PathSpec::Kind::affine:
      leg(a, b, 0.0, 1.0, false);
      break;
    case PathSpec::Kind::quadratic:
      leg(a, b, 0.0, 1.0, true);
      break;
    case PathSpec::Kind::two_leg:
      if (!mid) throw ConfigError("two-leg path needs an intermediate potential");
      leg(a, *mid, 0.0, 0.5, false);
      leg(*mid, b, 0.5, 1.0, false);
      break;
  }
  return out;
}

// (1/V) int int pdot (omega_a^n - omega_t^n) dt.
template <class M>
double aubin_J_path(const M& m, const typename M::Potential& a, const typename M::Potential& b,
                    const PathSpec& spec = {}, const typename M::Potential* mid = nullptr) {
  int n = m.dim();
  auto wa = m.kahler(a);
  double s = 0.0;
  for (const auto& nd : path_nodes(m, a, b, spec, mid)) {
    if (!(m.kahler_margin(nd.p) > 0.0))
      throw DomainError("path leaves the Kahler cone");
    auto wt = m.kahler(nd.p);
    const Values& v = m.values(nd.pdot);
    s += nd.w * (wedge(m, &v, wa, n, wt, 0) - wedge(m, &v, wa, 0, wt, n));
  }
  return s / m.volume();
}

// (1/V) int int pdot (omega_t^k ^ omega_a^{n-k} - omega_t^n) dt.
template <class M>
double J_k_path(const M& m, const typename M::Potential& a, const typename M::Potential& b, int k,
                const PathSpec& spec = {}, const typename M::Potential* mid = nullptr) {
  int n = m.dim();
  check_k(k, n);
  auto wa = m.kahler(a);
  double s = 0.0;
  for (const auto& nd : path_nodes(m, a, b, spec, mid)) {
    if (!(m.kahler_margin(nd.p) > 0.0))
      throw DomainError("path leaves the Kahler cone");
    auto wt = m.kahler(nd.p);
    const Values& v = m.values(nd.pdot);
    s += nd.w * (wedge(m, &v, wt, k, wa, n - k) - wedge(m, &v, wt, n, wa, 0));
  }
  return s / m.volume();
}

enum class JkRoute { closed, identity, path };

template <class M>
double J_k(const M& m, const typename M::Potential& a, const typename M::Potential& b, int k,
           JkRoute route, const PathSpec& spec = {}) {
  switch (route) {
    case JkRoute::closed:
      return J_k_closed(m, a, b, k);
    case JkRoute::identity:
      return aubin_J(m, a, b) - I_k(m, a, b, k);
    case JkRoute::path:
      return J_k_path(m, a, b, k, spec);
  }
  return 0.0;
}

// ---------------------------------------------------------------- Ricci data, F

inline double mu_k(int /*k*/) { return 1.0; }

template <class M>
struct RicciPotential {
  typename M::Potential rho;  // Ric omega_p = omega0 + i ddbar rho
  Values f;                   // normalized Ricci potential of omega_p
  double mean_f = 0.0;        // (1/V) int f omega_p^n
};

// f = rho_values - p + c with (1/V) int e^f omega_p^n = 1.
template <class M>
Values normalized_ricci_potential(const M& m, const typename M::Potential& p,
                                  const Values& rho_values, double* mean_f = nullptr) {
  Values f = rho_values - m.values(p);
  auto wp = m.kahler(p);
  double z = wedge(m, nullptr, wp, 0, wp, m.dim());
  Values e = exp_values(f);
  double c = -std::log(wedge(m, &e, wp, m.dim(), wp, 0) / m.volume());
  for (double& x : f) x += c;
  if (mean_f) *mean_f = wedge(m, &f, wp, m.dim(), wp, 0) / z;
  return f;
}

template <class M>
RicciPotential<M> ricci_potential(const M& m, const typename M::Potential& p) {
  RicciPotential<M> r;
  r.rho = m.ricci_shift(p);
  r.f = normalized_ricci_potential(m, p, m.values(r.rho), &r.mean_f);
  return r;
}

// Ding functional F(omega_p, omega_q) given f_p; the target needs no positivity.
template <class M>
double ding_F(const M& m, const typename M::Potential& p, const typename M::Potential& q,
              const Values& f_p) {
  int n = m.dim();
  auto phi = q - p;
  auto wp = m.kahler(p);
  const Values& v = m.values(phi);
  double mean_phi = wedge(m, &v, wp, n, wp, 0) / m.volume();
  Values e = exp_values(f_p - v);
  double lg = std::log(wedge(m, &e, wp, n, wp, 0) / m.volume());
  return aubin_J(m, p, q) - mean_phi - lg;
}

template <class M>
double ding_F(const M& m, const typename M::Potential& p, const typename M::Potential& q) {
  if (!(m.kahler_margin(p) > 0.0)) throw DomainError("ding_F: base is not Kahler");
  auto rp = ricci_potential(m, p);
  return ding_F(m, p, q, rp.f);
}

// ---------------------------------------------------------------- E_k

enum class EkRoute { path, via_E0, via_En, interpolated };

// Cached Ricci data for the endpoints of one pair.
template <class M>
class PairEnergies {
 public:
  using P = typename M::Potential;

  PairEnergies(const M& m, P a, P b) : m_(m), a_(std::move(a)), b_(std::move(b)) {
    ra_ = ricci_potential(m_, a_);
    rb_ = ricci_potential(m_, b_);
  }

  const P& a() const { return a_; }
  const P& b() const { return b_; }
  const RicciPotential<M>& ricci_a() const { return ra_; }
  const RicciPotential<M>& ricci_b() const { return rb_; }

  double I() const { return aubin_I(m_, a_, b_); }
  double J() const { return aubin_J(m_, a_, b_); }
  double F() const { return ding_F(m_, a_, b_, ra_.f); }

  // E_0 from the Ding functional.
  double E0() const { return F() - rb_.mean_f + ra_.mean_f; }

  // E_n = F(Ric omega_a, Ric omega_b); needs Ric omega_a Kahler.
  double En() const {
    if (!en_) {
      if (!(m_.kahler_margin(ra_.rho) > 0.0))
        throw DomainError("E_n closed form needs a base with positive Ricci curvature");
      Values f_rho = normalized_ricci_potential(m_, ra_.rho, m_.ricci_shift_values(ra_.rho));
      en_ = ding_F(m_, ra_.rho, rb_.rho, f_rho);
    }
    return *en_;
  }

  // I_k(omega_p, Ric omega_p) type terms at either endpoint.
  double Ik_ricci_b(int k) const { return I_k(m_, b_, rb_.rho, k); }
  double Ik_ricci_a(int k) const { return I_k(m_, a_, ra_.rho, k); }
  double Jk_ricci_b(int k) const { return J_k_closed(m_, b_, rb_.rho, k); }
  double Jk_ricci_a(int k) const { return J_k_closed(m_, a_, ra_.rho, k); }
  double J_ricci_b() const { return aubin_J(m_, b_, rb_.rho); }
  double J_ricci_a() const { return aubin_J(m_, a_, ra_.rho); }

  double Ek(int k, EkRoute route, int l = 0, const PathSpec& spec = {}) const {
    int n = m_.dim();
    check_k(k, n);
    switch (route) {
      case EkRoute::path:
        return Ek_path(m_, a_, b_, k, spec);
      case EkRoute::via_E0:
        return E0() + Ik_ricci_b(k) - Ik_ricci_a(k);
      case EkRoute::via_En:
        return En() - Jk_ricci_b(k) + Jk_ricci_a(k);
      case EkRoute::interpolated: {
        if (l < 0 || l > k + 1) throw ConfigError("interpolation index l outside [0,k+1]");
        double s = double(l) / (k + 1);
        double e = (1.0 - s) * E0() + (s != 0.0 ? s * En() : 0.0);
        double tb = Ik_ricci_b(k) - (s != 0.0 ? s * J_ricci_b() : 0.0);
        double ta = Ik_ricci_a(k) - (s != 0.0 ? s * J_ricci_a() : 0.0);
        return e + tb - ta;
      }
    }
    return 0.0;
  }

  template <class MM>
  static double Ek_path(const MM& m, const typename MM::Potential& a,
                        const typename MM::Potential& b, int k, const PathSpec& spec,
                        const typename MM::Potential* mid = nullptr) {
    double s = 0.0;
    for (const auto& nd : path_nodes(m, a, b, spec, mid)) s += nd.w * Ek_integrand(m, nd.p, nd.pdot, k);
    return s;
  }

  // (1/V) int Delta_t pdot Ric_t^k ^ omega_t^{n-k}
  //   - (n-k)/(k+1) (1/V) int pdot (Ric_t^{k+1} - mu_k omega_t^{k+1}) ^ omega_t^{n-1-k}
  template <class MM>
  static double Ek_integrand(const MM& m, const typename MM::Potential& p,
                             const typename MM::Potential& pdot, int k) {
    int n = m.dim();
    if (!(m.kahler_margin(p) > 0.0)) throw DomainError("E_k path leaves the Kahler cone");
    auto wt = m.kahler(p);
    auto ric = m.kahler(m.ricci_shift(p));
    Values lap = m.trace_laplacian(pdot, p);
    double s = wedge(m, &lap, ric, k, wt, n - k);
    if (k < n) {
      const Values& v = m.values(pdot);
      double t2 = wedge(m, &v, ric, k + 1, wt, n - 1 - k) -
                  mu_k(k) * wedge(m, &v, wt, n, wt, 0);
      s -= double(n - k) / (k + 1) * t2;
    }
    return s / m.volume();
  }

 private:
  const M& m_;
  P a_, b_;
  RicciPotential<M> ra_, rb_;
  mutable std::optional<double> en_;
};

template <class M>
double E_k(const M& m, const typename M::Potential& a, const typename M::Potential& b, int k,
           EkRoute route, int l = 0, const PathSpec& spec = {}) {
  if (route == EkRoute::path) return PairEnergies<M>::Ek_path(m, a, b, k, spec);
  return PairEnergies<M>(m, a, b).Ek(k, route, l, spec);
}

// Derivative identity for (k+1)E_k - kE_{k-1} along phi_t = a + t(b - a),
// checked by five-point differences at t with step h:
//   lhs      d/dt [(k+1)E_k - kE_{k-1}](omega_a, omega_t)
//   rhs      -(1/V) int (pdot - c) omega_t^n - d/dt (1/V) int f_t Ric_t^k ^ omega_t^{n-k}
//   c        (1/V) int pdot e^{f_t} omega_t^n
// f_t is normalized by (1/V) int e^f omega_t^n = 1, which makes
// d/dt f_t = -Delta_t pdot - pdot + c; the identity closes only with c
// subtracted. literal_residual keeps c in and is reported alongside.
struct EkDifference {
  double lhs = 0.0;
  double rhs = 0.0;
  double c = 0.0;
  double residual() const { return lhs - rhs; }
  double literal_residual() const { return lhs - rhs - c; }
};

template <class M>
EkDifference ek_difference(const M& m, const typename M::Potential& a,
                           const typename M::Potential& b, int k, double t, double h = 1e-2) {
  int n = m.dim();
  if (k < 1 || k > n) throw ConfigError("ek_difference needs 1 <= k <= n");
  auto d = b - a;
  auto at = [&](double s) { return a + d * s; };
  auto ra = ricci_potential(m, a);
  auto g = [&](double s) {
    auto p = at(s);
    auto rp = ricci_potential(m, p);
    auto wp = m.kahler(p);
    double e0 = ding_F(m, a, p, ra.f) - rp.mean_f + ra.mean_f;
    double ek = e0 + I_k(m, p, rp.rho, k) - I_k(m, a, ra.rho, k);
    double ek1 = e0 + I_k(m, p, rp.rho, k - 1) - I_k(m, a, ra.rho, k - 1);
    double lhs = (k + 1) * ek - k * ek1;
    double fr = wedge(m, &rp.f, m.kahler(rp.rho), k, wp, n - k) / m.volume();
    return std::pair<double, double>{lhs, fr};
  };
  double st[4] = {-2.0, -1.0, 1.0, 2.0};
  double cf[4] = {1.0, -8.0, 8.0, -1.0};
  double dl = 0.0, df = 0.0;
  for (int i = 0; i < 4; ++i) {
    auto [x, y] = g(t + st[i] * h);
    dl += cf[i] * x;
    df += cf[i] * y;
  }
  dl /= 12.0 * h;
  df /= 12.0 * h;
  auto p = at(t);
  auto rp = ricci_potential(m, p);
  auto wp = m.kahler(p);
  const Values& v = m.values(d);
  double m1 = wedge(m, &v, wp, n, wp, 0) / m.volume();
  Values ve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) ve[i] = v[i] * std::exp(rp.f[i]);
  double c = wedge(m, &ve, wp, n, wp, 0) / m.volume();
  EkDifference r;
  r.lhs = dl;
  r.c = c;
  r.rhs = -(m1 - c) - df;
  return r;
}

// ---------------------------------------------------------------- variations

// Centered differences of a closed-form functional A(omega_a, omega_s) along
// p(s) = a + s v + s^2 w against its variational integrand at s.
enum class Variation { I_minus_J, J, I_k, J_k, E_k };

struct VariationResult {
  double integrand = 0.0;
  double fd_h = 0.0;   // step h
  double fd_2h = 0.0;  // step 2h
  double fd_4h = 0.0;  // step 4h
  double residual() const { return std::abs(fd_h - integrand); }
  // Observed order of the difference quotients, log2 of the ratio of
  // successive changes. It does not involve the integrand, whose
  // discretization may differ from the closed form at the quadrature level.
  double order() const { return std::log2(std::abs(fd_4h - fd_2h) / std::abs(fd_2h - fd_h)); }
};

template <class M>
VariationResult variation_check(const M& m, const typename M::Potential& a,
                                const typename M::Potential& v, const typename M::Potential& w,
                                Variation kind, int k, double s, double h = 1e-3) {
  int n = m.dim();
  auto at = [&](double x) { return a + v * x + w * (x * x); };
  auto closed = [&](double x) {
    auto p = at(x);
    switch (kind) {
      case Variation::I_minus_J:
        return aubin_I(m, a, p) - aubin_J(m, a, p);
      case Variation::J:
        return aubin_J(m, a, p);
      case Variation::I_k:
        return I_k(m, a, p, k);
      case Variation::J_k:
        return J_k_closed(m, a, p, k);
      case Variation::E_k:
        return E_k(m, a, p, k, EkRoute::via_E0);
    }
    return 0.0;
  };
  auto fd = [&](double step) { return (closed(s + step) - closed(s - step)) / (2.0 * step); };
  auto p = at(s);
  auto pdot = v + w * (2.0 * s);
  auto wa = m.kahler(a);
  auto wt = m.kahler(p);
  const Values& pv = m.values(pdot);
  double V = m.volume();
  VariationResult r;
  switch (kind) {
    case Variation::I_minus_J: {
      Values phi = m.values(p) - m.values(a);
      r.integrand = -n * wedge(m, &phi, m.ddbar(pdot), 1, wt, n - 1) / V;
      break;
    }
    case Variation::J:
      r.integrand = (wedge(m, &pv, wa, n, wt, 0) - wedge(m, &pv, wt, n, wa, 0)) / V;
      break;
    case Variation::I_k:
      r.integrand = (wedge(m, &pv, wa, n, wt, 0) - wedge(m, &pv, wa, n - k, wt, k)) / V;
      break;
    case Variation::J_k:
      r.integrand = (wedge(m, &pv, wt, k, wa, n - k) - wedge(m, &pv, wt, n, wa, 0)) / V;
      break;
    case Variation::E_k:
      r.integrand = PairEnergies<M>::Ek_integrand(m, p, pdot, k);
      break;
  }
  r.fd_h = fd(h);
  r.fd_2h = fd(2.0 * h);
  r.fd_4h = fd(4.0 * h);
  return r;
}

// ---------------------------------------------------------------- membership

struct Membership {
  bool member = false;
  double margin = 0.0;
};

// H+: Ric omega_p > 0.
template <class M>
Membership in_H_plus(const M& m, const typename M::Potential& p) {
  double mg = m.form_margin(m.kahler(m.ricci_shift(p)));
  return {mg > 0.0, mg};
}

// B_k: I_k(omega_p, Ric omega_p) >= 0.
template <class M>
Membership in_B_k(const M& m, const typename M::Potential& p, int k) {
  double v = I_k(m, p, m.ricci_shift(p), k);
  return {v >= 0.0, v};
}

// A_k relative to the base omega0: E_k(omega0, omega_p) >= 0.
template <class M>
Membership in_A_k(const M& m, const typename M::Potential& p, int k) {
  double v = E_k(m, m.zero(), p, k, EkRoute::via_E0);
  return {v >= 0.0, v};
}

// Pre-filters: Ric omega_p + c omega_p >= 0 (c = 2 for k = 2, c = 1 for k = 3).
template <class M>
Membership ricci_lower_bound(const M& m, const typename M::Potential& p, double c) {
  auto f = m.kahler(m.ricci_shift(p)) + m.kahler(p) * c;
  double mg = m.form_margin(f);
  return {mg >= 0.0, mg};
}

// Lambda_1 orthogonality on the sphere: the degree-1 coefficients vanish.
// The margin is minus their Euclidean norm.
Membership lambda1_orthogonal(const SphereModel& m, const SphereModel::Potential& p,
                              double tol = 1e-12);

// Futaki character F_k(X; omega0) on the sphere by centered differences of
// E_k(omega0, exp(tX)^* omega0) and its J-rotated companion (X -> iX).
struct FutakiValue {
  double re = 0.0;
  double im = 0.0;
};
FutakiValue futaki(const SphereModel& m, const std::array<s2::MobiusMap::C, 4>& X, int k,
                   double h = 1e-3);

}  // namespace kef
