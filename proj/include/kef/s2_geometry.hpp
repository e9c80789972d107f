#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "kef/core.hpp"

// Calculus on the round Riemann sphere. The base form is the Fubini-Study form
// normalized so that [omega] = c_1, hence V = 2 and Ric omega = omega.
//
// Coordinates: mu = cos(theta) on Gauss-Legendre nodes, equispaced longitude.
// Real spherical harmonics Y_lm are orthonormal for the unit-sphere area form;
// omega = dA / (2 pi). With this normalization the density of i ddbar phi
// relative to omega is half the unit-sphere Laplacian, so P(Y_lm) = -l(l+1)/2 Y_lm.
namespace kef::s2 {

inline constexpr double kVolume = 2.0;

// Degree-major coefficient layout: index(l, m) = l*l + l + m, m in [-l, l].
// m > 0 carries cos(m lambda), m < 0 carries sin(|m| lambda).
inline constexpr int coeff_index(int l, int m) { return l * l + l + m; }
inline constexpr int coeff_count(int L) { return (L + 1) * (L + 1); }

struct SpherePoint {
  double mu;
  double lon;
};

class SphericalGrid {
 public:
  explicit SphericalGrid(int L);

  int degree_cap() const { return L_; }
  int n_lat() const { return n_lat_; }
  int n_lon() const { return n_lon_; }
  std::size_t size() const { return std::size_t(n_lat_) * n_lon_; }
  double volume() const { return kVolume; }

  const std::vector<double>& mu() const { return mu_; }
  const std::vector<double>& lat_weights() const { return wlat_; }
  // Weights against omega: sum over all nodes equals V.
  const std::vector<double>& weights() const { return w_; }
  SpherePoint node(std::size_t i) const {
    return {mu_[i / n_lon_], lon_[i % n_lon_]};
  }

  std::vector<double> analyze(const Values& f) const;
  Values synthesize(const std::vector<double>& c) const;
  // Components of the unit-sphere gradient: d/dtheta and (1/sin theta) d/dlambda.
  void synthesize_gradient(const std::vector<double>& c, Values& d_theta,
                           Values& d_lon) const;
  double evaluate(const std::vector<double>& c, SpherePoint p) const;

  double integrate(const Values& h) const;                    // int h omega
  double integrate(const Values& h, const Values& g) const;   // int h g omega
  double mean(const Values& h) const { return integrate(h) / kVolume; }

  // Eigenvalue of P on degree l.
  static double p_eigen(int l) { return -0.5 * l * (l + 1); }

 private:
  int L_, n_lat_, n_lon_;
  std::vector<double> mu_, wlat_, lon_, w_;
  // Per-order Legendre tables, rows = latitude nodes, cols = degrees m..L.
  std::vector<Eigen::MatrixXd> leg_, dleg_, mleg_;
  Eigen::MatrixXd cos_, sin_;  // (L+1) x n_lon
};

using GridPtr = std::shared_ptr<const SphericalGrid>;

GridPtr make_grid(int L);

// Smooth real function: spectral coefficients up to the grid's degree cap plus
// cached grid values.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(GridPtr grid, std::vector<double> coeffs);

  static ScalarField zero(GridPtr grid);
  static ScalarField constant(GridPtr grid, double c);
  // Projects grid values onto the band-limited space; projection_loss() holds
  // the sup-norm of what was discarded.
  static ScalarField project(GridPtr grid, const Values& v);

  const GridPtr& grid() const { return grid_; }
  const std::vector<double>& coeffs() const { return c_; }
  const Values& values() const { return v_; }
  double coeff(int l, int m) const { return c_[coeff_index(l, m)]; }
  double mean() const;
  double projection_loss() const { return loss_; }

  ScalarField operator+(const ScalarField& o) const;
  ScalarField operator-(const ScalarField& o) const;
  ScalarField operator*(double s) const;
  ScalarField shifted(double c) const;
  ScalarField mean_zero() const { return shifted(-mean()); }
  double evaluate(SpherePoint p) const { return grid_->evaluate(c_, p); }

 private:
  GridPtr grid_;
  std::vector<double> c_;
  Values v_;
  double loss_ = 0.0;
};

inline ScalarField operator*(double s, const ScalarField& f) { return f * s; }

// Density P(phi) of i ddbar phi relative to omega.
ScalarField iddbar(const ScalarField& phi);
// min over the grid of 1 + P(phi); phi is a Kahler potential iff this is > 0.
double kahler_margin(const ScalarField& phi);
// Density of i d phi ^ dbar psi (symmetrized) relative to omega.
Values gradient_density(const ScalarField& phi, const ScalarField& psi);

// Delta_phi h = P(h) / (1 + P(phi)) on the grid.
Values trace_laplacian(const ScalarField& h, const ScalarField& phi);

// rho with Ric omega_phi = omega + i ddbar rho, i.e. rho = -log(1 + P(phi)).
ScalarField ricci_shift(const ScalarField& phi);
// Density of Ric omega_phi relative to omega.
ScalarField ricci(const ScalarField& phi);
// Normalized Ricci potential f with i ddbar f = Ric omega_phi - omega_phi and
// (1/V) int e^f omega_phi = 1.
ScalarField ricci_potential(const ScalarField& phi);

// Inverse of P on mean-zero densities; result has mean zero.
ScalarField poisson_solve(const ScalarField& rho, double mass_tol = 1e-9);

class MobiusMap {
 public:
  using C = std::complex<double>;
  MobiusMap() : a_(1), b_(0), c_(0), d_(1) {}
  MobiusMap(C a, C b, C c, C d);

  static MobiusMap identity() { return {}; }
  // z -> lambda z (z = cot(theta/2) e^{i lon}).
  static MobiusMap dilation(double lambda);
  // Rotation by angle about a unit axis.
  static MobiusMap rotation(std::array<double, 3> axis, double angle);
  // exp(X) for a traceless 2x2 generator.
  static MobiusMap exp_of(const std::array<C, 4>& X);

  C a() const { return a_; }
  C b() const { return b_; }
  C c() const { return c_; }
  C d() const { return d_; }
  C det() const { return a_ * d_ - b_ * c_; }
  MobiusMap compose(const MobiusMap& inner) const;  // this o inner

  SpherePoint apply(SpherePoint p) const;
  // Density of m^* omega relative to omega at p.
  double jacobian(SpherePoint p) const;
  // Closed-form potential of m^* omega relative to omega (not mean-normalized).
  double potential(SpherePoint p) const;

 private:
  C a_, b_, c_, d_;
};

// Potential of m^* omega_source, by transporting the density and solving Poisson.
ScalarField mobius_pullback(const MobiusMap& m, const ScalarField& source);

// Deterministic random field with coefficients ~ N(0,1) (1+l)^{-2} for l <= Lp,
// scaled by amplitude; with require_kahler it is halved until margin > 0.05.
ScalarField random_band_limited(GridPtr grid, std::uint64_t seed, int Lp,
                                bool require_kahler, double amplitude = 1.0);

}  // namespace kef::s2
