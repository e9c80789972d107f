#include "kef/s2_geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kef/rng.hpp"

namespace kef::s2 {

namespace {

constexpr double kPi = std::numbers::pi;

// Fully normalized associated Legendre functions, int_{-1}^{1} Pbar^2 dmu = 1,
// without the Condon-Shortley phase. Fills p[m][l - m] for l in [m, L].
void legendre_column(int L, double mu, std::vector<std::vector<double>>& p) {
  double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
  p.assign(L + 1, {});
  double pmm = 1.0 / std::sqrt(2.0);
  for (int m = 0; m <= L; ++m) {
    if (m > 0) pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
    auto& col = p[m];
    col.assign(L - m + 1, 0.0);
    col[0] = pmm;
    if (m + 1 <= L) col[1] = std::sqrt(2.0 * m + 3.0) * mu * pmm;
    for (int l = m + 2; l <= L; ++l) {
      double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      double b = std::sqrt(((l - 1.0) * (l - 1.0) - double(m) * m) /
                           (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      col[l - m] = a * (mu * col[l - m - 1] - b * col[l - m - 2]);
    }
  }
}

double lon_norm(int m) { return m == 0 ? 1.0 / std::sqrt(2.0 * kPi) : 1.0 / std::sqrt(kPi); }

}  // namespace

SphericalGrid::SphericalGrid(int L) : L_(L) {
  if (L < 4) {
    std::ostringstream os;
    os << "grid degree cap L=" << L << " is below the minimum 4";
    throw ConfigError(os.str());
  }
  n_lat_ = (3 * L) / 2 + 2;
  n_lon_ = 3 * L + 2;
  std::vector<double> x, w;
  gauss_legendre(n_lat_, x, w);
  mu_ = x;
  wlat_ = w;
  lon_.resize(n_lon_);
  for (int k = 0; k < n_lon_; ++k) lon_[k] = 2.0 * kPi * k / n_lon_;
  w_.resize(size());
  for (int j = 0; j < n_lat_; ++j)
    for (int k = 0; k < n_lon_; ++k) w_[std::size_t(j) * n_lon_ + k] = wlat_[j] / n_lon_;

  leg_.assign(L + 1, {});
  dleg_.assign(L + 1, {});
  mleg_.assign(L + 1, {});
  for (int m = 0; m <= L; ++m) {
    leg_[m].resize(n_lat_, L - m + 1);
    dleg_[m].resize(n_lat_, L - m + 1);
    mleg_[m].resize(n_lat_, L - m + 1);
  }
  std::vector<std::vector<double>> p;
  for (int j = 0; j < n_lat_; ++j) {
    double mu = mu_[j];
    double s = std::sqrt(1.0 - mu * mu);
    legendre_column(L, mu, p);
    for (int m = 0; m <= L; ++m) {
      double nrm = lon_norm(m);
      for (int l = m; l <= L; ++l) {
        double v = p[m][l - m];
        double prev = (l - 1 >= m) ? p[m][l - 1 - m] : 0.0;
        // sin(theta) dP/dtheta = l mu P_l - c_lm P_{l-1}
        double c = std::sqrt((2.0 * l + 1.0) * (double(l) * l - double(m) * m) / (2.0 * l - 1.0));
        double dth = (l * mu * v - (l > m ? c * prev : 0.0)) / s;
        leg_[m](j, l - m) = nrm * v;
        dleg_[m](j, l - m) = nrm * dth;
        mleg_[m](j, l - m) = nrm * m * v / s;
      }
    }
  }
  cos_.resize(L + 1, n_lon_);
  sin_.resize(L + 1, n_lon_);
  for (int m = 0; m <= L; ++m)
    for (int k = 0; k < n_lon_; ++k) {
      cos_(m, k) = std::cos(m * lon_[k]);
      sin_(m, k) = std::sin(m * lon_[k]);
    }
}

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void gather(int L, const std::vector<double>& c, int m, Eigen::VectorXd& ac, Eigen::VectorXd& as) {
  ac.resize(L - m + 1);
  as.resize(L - m + 1);
  for (int l = m; l <= L; ++l) {
    ac[l - m] = c[coeff_index(l, m)];
    as[l - m] = m > 0 ? c[coeff_index(l, -m)] : 0.0;
  }
}

}  // namespace

Values SphericalGrid::synthesize(const std::vector<double>& c) const {
  Eigen::MatrixXd gc(n_lat_, L_ + 1), gs(n_lat_, L_ + 1);
  Eigen::VectorXd ac, as;
  for (int m = 0; m <= L_; ++m) {
    gather(L_, c, m, ac, as);
    gc.col(m) = leg_[m] * ac;
    gs.col(m) = leg_[m] * as;
  }
  RowMat out = gc * cos_ + gs * sin_;
  return Values(out.data(), out.data() + out.size());
}

void SphericalGrid::synthesize_gradient(const std::vector<double>& c, Values& d_theta,
                                        Values& d_lon) const {
  Eigen::MatrixXd tc(n_lat_, L_ + 1), ts(n_lat_, L_ + 1), lc(n_lat_, L_ + 1), ls(n_lat_, L_ + 1);
  Eigen::VectorXd ac, as;
  for (int m = 0; m <= L_; ++m) {
    gather(L_, c, m, ac, as);
    tc.col(m) = dleg_[m] * ac;
    ts.col(m) = dleg_[m] * as;
    // d/dlon cos = -m sin, d/dlon sin = m cos; m already folded into mleg_.
    lc.col(m) = mleg_[m] * as;
    ls.col(m) = -(mleg_[m] * ac);
  }
  RowMat th = tc * cos_ + ts * sin_;
  RowMat lo = lc * cos_ + ls * sin_;
  d_theta.assign(th.data(), th.data() + th.size());
  d_lon.assign(lo.data(), lo.data() + lo.size());
}

std::vector<double> SphericalGrid::analyze(const Values& f) const {
  Eigen::Map<const RowMat> F(f.data(), n_lat_, n_lon_);
  double dl = 2.0 * kPi / n_lon_;
  Eigen::MatrixXd hc = F * cos_.transpose();
  Eigen::MatrixXd hs = F * sin_.transpose();
  Eigen::VectorXd wl = Eigen::Map<const Eigen::VectorXd>(wlat_.data(), n_lat_) * dl;
  std::vector<double> c(coeff_count(L_), 0.0);
  for (int m = 0; m <= L_; ++m) {
    Eigen::VectorXd ac = leg_[m].transpose() * hc.col(m).cwiseProduct(wl);
    for (int l = m; l <= L_; ++l) c[coeff_index(l, m)] = ac[l - m];
    if (m > 0) {
      Eigen::VectorXd as = leg_[m].transpose() * hs.col(m).cwiseProduct(wl);
      for (int l = m; l <= L_; ++l) c[coeff_index(l, -m)] = as[l - m];
    }
  }
  return c;
}

double SphericalGrid::evaluate(const std::vector<double>& c, SpherePoint pt) const {
  std::vector<std::vector<double>> p;
  legendre_column(L_, pt.mu, p);
  double sum = 0.0;
  for (int m = 0; m <= L_; ++m) {
    double cm = std::cos(m * pt.lon), sm = std::sin(m * pt.lon);
    double acc = 0.0;
    for (int l = m; l <= L_; ++l) {
      double v = p[m][l - m];
      acc += v * (c[coeff_index(l, m)] * cm + (m > 0 ? c[coeff_index(l, -m)] * sm : 0.0));
    }
    sum += lon_norm(m) * acc;
  }
  return sum;
}

double SphericalGrid::integrate(const Values& h) const { return weighted_sum(w_, h); }

double SphericalGrid::integrate(const Values& h, const Values& g) const {
  return weighted_sum(w_, h, g);
}

GridPtr make_grid(int L) { return std::make_shared<const SphericalGrid>(L); }

// ---------------------------------------------------------------- ScalarField

ScalarField::ScalarField(GridPtr grid, std::vector<double> coeffs)
    : grid_(std::move(grid)), c_(std::move(coeffs)) {
  c_.resize(coeff_count(grid_->degree_cap()), 0.0);
  v_ = grid_->synthesize(c_);
}

ScalarField ScalarField::zero(GridPtr grid) { return constant(std::move(grid), 0.0); }

ScalarField ScalarField::constant(GridPtr grid, double c) {
  std::vector<double> co(coeff_count(grid->degree_cap()), 0.0);
  co[0] = c * std::sqrt(4.0 * kPi);
  ScalarField f;
  f.grid_ = std::move(grid);
  f.c_ = std::move(co);
  f.v_.assign(f.grid_->size(), c);
  return f;
}

ScalarField ScalarField::project(GridPtr grid, const Values& v) {
  ScalarField f(grid, grid->analyze(v));
  double loss = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) loss = std::max(loss, std::abs(v[i] - f.v_[i]));
  f.loss_ = loss;
  return f;
}

double ScalarField::mean() const { return c_[0] / std::sqrt(4.0 * kPi); }

ScalarField ScalarField::operator+(const ScalarField& o) const {
  ScalarField r = *this;
  for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] += o.c_[i];
  for (std::size_t i = 0; i < v_.size(); ++i) r.v_[i] += o.v_[i];
  r.loss_ = loss_ + o.loss_;
  return r;
}

ScalarField ScalarField::operator-(const ScalarField& o) const { return *this + o * -1.0; }

ScalarField ScalarField::operator*(double s) const {
  ScalarField r = *this;
  for (double& x : r.c_) x *= s;
  for (double& x : r.v_) x *= s;
  r.loss_ = std::abs(s) * loss_;
  return r;
}

ScalarField ScalarField::shifted(double c) const {
  ScalarField r = *this;
  r.c_[0] += c * std::sqrt(4.0 * kPi);
  for (double& x : r.v_) x += c;
  return r;
}

// ---------------------------------------------------------------- operators

ScalarField iddbar(const ScalarField& phi) {
  const auto& g = phi.grid();
  int L = g->degree_cap();
  std::vector<double> c = phi.coeffs();
  for (int l = 0; l <= L; ++l)
    for (int m = -l; m <= l; ++m) c[coeff_index(l, m)] *= SphericalGrid::p_eigen(l);
  return ScalarField(g, std::move(c));
}

double kahler_margin(const ScalarField& phi) { return 1.0 + min_value(iddbar(phi).values()); }

Values gradient_density(const ScalarField& phi, const ScalarField& psi) {
  const auto& g = phi.grid();
  Values at, al, bt, bl;
  g->synthesize_gradient(phi.coeffs(), at, al);
  if (&phi == &psi) {
    bt = at;
    bl = al;
  } else {
    g->synthesize_gradient(psi.coeffs(), bt, bl);
  }
  Values r(at.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = 0.5 * (at[i] * bt[i] + al[i] * bl[i]);
  return r;
}

Values trace_laplacian(const ScalarField& h, const ScalarField& phi) {
  Values dens = iddbar(phi).values();
  for (double& x : dens) x += 1.0;
  if (!(min_value(dens) > 0.0)) throw DomainError("trace_laplacian: target is not Kahler");
  Values ph = iddbar(h).values();
  for (std::size_t i = 0; i < ph.size(); ++i) ph[i] /= dens[i];
  return ph;
}

ScalarField ricci_shift(const ScalarField& phi) {
  Values dens = iddbar(phi).values();
  for (double& x : dens) x += 1.0;
  Values lg = guarded_log(dens, 1e-8, "ricci");
  for (double& x : lg) x = -x;
  return ScalarField::project(phi.grid(), lg);
}

ScalarField ricci(const ScalarField& phi) { return iddbar(ricci_shift(phi)).shifted(1.0); }

ScalarField ricci_potential(const ScalarField& phi) {
  ScalarField f = ricci_shift(phi) - phi;
  Values dens = iddbar(phi).values();
  for (double& x : dens) x += 1.0;
  double z = phi.grid()->integrate(exp_values(f.values()), dens) / kVolume;
  return f.shifted(-std::log(z));
}

ScalarField poisson_solve(const ScalarField& rho, double mass_tol) {
  const auto& g = rho.grid();
  double mass = rho.mean() * kVolume;
  if (std::abs(mass) > mass_tol) {
    std::ostringstream os;
    os << "poisson_solve: density has nonzero mass " << mass;
    throw InconsistencyError(os.str());
  }
  int L = g->degree_cap();
  std::vector<double> c = rho.coeffs();
  c[0] = 0.0;
  for (int l = 1; l <= L; ++l)
    for (int m = -l; m <= l; ++m) c[coeff_index(l, m)] /= SphericalGrid::p_eigen(l);
  return ScalarField(g, std::move(c));
}

// ---------------------------------------------------------------- Mobius

MobiusMap::MobiusMap(C a, C b, C c, C d) : a_(a), b_(b), c_(c), d_(d) {
  C det = a * d - b * c;
  if (std::abs(det - C(1.0)) > 1e-12) {
    C s = std::sqrt(det);
    a_ /= s;
    b_ /= s;
    c_ /= s;
    d_ /= s;
  }
}

MobiusMap MobiusMap::dilation(double lambda) {
  double s = std::sqrt(lambda);
  return MobiusMap(C(s), C(0), C(0), C(1.0 / s));
}

MobiusMap MobiusMap::rotation(std::array<double, 3> axis, double angle) {
  double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  double x = axis[0] / n, y = axis[1] / n, z = axis[2] / n;
  // exp(-i angle/2 n.sigma)
  double c = std::cos(angle / 2), s = std::sin(angle / 2);
  C i(0, 1);
  return MobiusMap(C(c) - i * s * z, (-i * x - y) * s, (-i * x + y) * s, C(c) + i * s * z);
}

MobiusMap MobiusMap::exp_of(const std::array<C, 4>& X) {
  // X traceless: X^2 = -det(X) I, exp(X) = cosh(q) I + sinh(q)/q X with q^2 = -det X.
  C q2 = -(X[0] * X[3] - X[1] * X[2]);
  C q = std::sqrt(q2);
  C ch, sh;
  if (std::abs(q) < 1e-8) {
    ch = C(1.0) + q2 / 2.0;
    sh = C(1.0) + q2 / 6.0;
  } else {
    ch = std::cosh(q);
    sh = std::sinh(q) / q;
  }
  return MobiusMap(ch + sh * X[0], sh * X[1], sh * X[2], ch + sh * X[3]);
}

MobiusMap MobiusMap::compose(const MobiusMap& o) const {
  return MobiusMap(a_ * o.a_ + b_ * o.c_, a_ * o.b_ + b_ * o.d_, c_ * o.a_ + d_ * o.c_,
                   c_ * o.b_ + d_ * o.d_);
}

namespace {

// Unit homogeneous vector (z0, z1) of a point, z = z0/z1 = cot(theta/2) e^{i lon}.
std::pair<std::complex<double>, std::complex<double>> homogeneous(SpherePoint p) {
  double c = std::sqrt(std::max(0.0, 0.5 * (1.0 + p.mu)));
  double s = std::sqrt(std::max(0.0, 0.5 * (1.0 - p.mu)));
  return {std::polar(c, p.lon), std::complex<double>(s, 0.0)};
}

}  // namespace

SpherePoint MobiusMap::apply(SpherePoint p) const {
  auto [z0, z1] = homogeneous(p);
  C w0 = a_ * z0 + b_ * z1, w1 = c_ * z0 + d_ * z1;
  double n0 = std::norm(w0), n1 = std::norm(w1);
  double mu = (n0 - n1) / (n0 + n1);
  double lon = std::arg(w0 * std::conj(w1));
  if (lon < 0) lon += 2.0 * kPi;
  return {mu, lon};
}

double MobiusMap::jacobian(SpherePoint p) const {
  auto [z0, z1] = homogeneous(p);
  double n = std::norm(a_ * z0 + b_ * z1) + std::norm(c_ * z0 + d_ * z1);
  return 1.0 / (n * n);
}

double MobiusMap::potential(SpherePoint p) const {
  auto [z0, z1] = homogeneous(p);
  double n = std::norm(a_ * z0 + b_ * z1) + std::norm(c_ * z0 + d_ * z1);
  return 2.0 * std::log(n);
}

ScalarField mobius_pullback(const MobiusMap& m, const ScalarField& source) {
  const auto& g = source.grid();
  ScalarField ps = iddbar(source);
  Values dens(g->size());
  for (std::size_t i = 0; i < dens.size(); ++i) {
    SpherePoint p = g->node(i);
    dens[i] = (1.0 + ps.evaluate(m.apply(p))) * m.jacobian(p) - 1.0;
  }
  ScalarField rho = ScalarField::project(g, dens);
  // The transported density has mass zero analytically; drop the quadrature residue.
  rho = rho.shifted(-rho.mean());
  return poisson_solve(rho);
}

ScalarField random_band_limited(GridPtr grid, std::uint64_t seed, int Lp, bool require_kahler,
                                double amplitude) {
  int L = grid->degree_cap();
  if (Lp > L) throw ConfigError("random_band_limited: L' exceeds the grid degree cap");
  Rng rng(seed);
  std::vector<double> c(coeff_count(L), 0.0);
  for (int l = 0; l <= Lp; ++l)
    for (int m = -l; m <= l; ++m)
      c[coeff_index(l, m)] = amplitude * rng.normal() / ((1.0 + l) * (1.0 + l));
  ScalarField f(grid, std::move(c));
  if (require_kahler) {
    f = f.mean_zero();
    while (!(kahler_margin(f) > 0.05)) f = f * 0.5;
  }
  return f;
}

}  // namespace kef::s2
