#include "kef/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kef {

Values operator+(const Values& a, const Values& b) { return axpby(1.0, a, 1.0, b); }
Values operator-(const Values& a, const Values& b) { return axpby(1.0, a, -1.0, b); }
Values operator*(double s, const Values& a) {
  Values r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

// ---------------------------------------------------------------- sphere

SphereModel::SphereModel(int L) : grid_(s2::make_grid(L)) {}

std::string SphereModel::name() const {
  std::ostringstream os;
  os << "sphere(L=" << grid_->degree_cap() << ")";
  return os.str();
}

SphereModel::Form SphereModel::kahler(const Potential& p) const {
  Form d = s2::iddbar(p).values();
  for (double& x : d) x += 1.0;
  return d;
}

double SphereModel::integrate(const Values* h, std::span<const Form* const> forms) const {
  if (forms.size() != 1) throw ConfigError("sphere integrate needs exactly one form");
  if (h) return weighted_sum(grid_->weights(), *h, *forms[0]);
  return weighted_sum(grid_->weights(), *forms[0]);
}

Values SphereModel::ricci_shift_values(const Potential& p) const {
  Values lv = guarded_log(kahler(p), 1e-8, "ricci");
  for (double& x : lv) x = -x;
  return lv;
}

// ---------------------------------------------------------------- toric

using toric::Mat3;
using toric::Vec3;

ToricPotential ToricPotential::operator+(const ToricPotential& o) const {
  ToricPotential r;
  if (fn && o.fn) r.fn = std::make_shared<const toric::ToricFunction>(*fn + *o.fn);
  r.has_derivatives = has_derivatives && o.has_derivatives;
  r.v = v + o.v;
  if (r.has_derivatives) {
    r.g.resize(g.size());
    r.r.resize(this->r.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      r.g[i] = g[i] + o.g[i];
      r.r[i] = this->r[i] + o.r[i];
    }
  }
  return r;
}

ToricPotential ToricPotential::operator*(double s) const {
  ToricPotential r = *this;
  if (fn) r.fn = std::make_shared<const toric::ToricFunction>(*fn * s);
  for (double& x : r.v) x *= s;
  for (auto& x : r.g) x *= s;
  for (auto& x : r.r) x *= s;
  return r;
}

ToricPotential ToricPotential::shifted(double c) const {
  ToricPotential r = *this;
  if (fn) {
    toric::ToricFunction k(fn->dim());
    k.set_affine(Vec3::Zero(), c);
    r.fn = std::make_shared<const toric::ToricFunction>(*fn + k);
  }
  for (double& x : r.v) x += c;
  return r;
}

MatrixForm MatrixForm::operator+(const MatrixForm& o) const {
  MatrixForm r;
  r.m.resize(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) r.m[i] = m[i] + o.m[i];
  return r;
}

MatrixForm MatrixForm::operator*(double s) const {
  MatrixForm r = *this;
  for (auto& x : r.m) x *= s;
  return r;
}

ToricModel::ToricModel(int n, double half_width, int points, double tail_tol)
    : n_(n), tail_tol_(tail_tol) {
  toric::fs_toric_potential(n);  // validates n
  grid_ = toric::make_box_grid(n, half_width, points, 2.5);
  double tail = toric::tail_bound(toric::fs_toric_potential(n), *grid_);
  if (tail > tail_tol_) {
    std::ostringstream os;
    os << "toric box half-width " << half_width << " leaves tail mass " << tail
       << " above tolerance " << tail_tol_;
    throw TruncationError(os.str());
  }
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  h0inv_.resize(size());
  vol_w_.resize(size());
  chart_.resize(size());
  y_.assign(size() * toric::kMaxDim, 0.0);
  for (std::size_t i = 0; i < size(); ++i) {
    const double* x = grid_->node(i);
    chart_[i] = toric::dominant_chart(n, x);
    Mat3 A = toric::chart_matrix(n, chart_[i]);
    Vec3 y = A * Vec3(x[0], x[1], x[2]);
    for (int a = 0; a < n; ++a) y_[i * toric::kMaxDim + a] = y[a];
    toric::BaseFrame F = toric::base_frame(n, chart_node(i), 0);
    h0inv_[i] = F.H0inv;
    vol_w_[i] = fact * grid_->weights()[i] * F.det_H0;
  }
}

std::string ToricModel::name() const {
  std::ostringstream os;
  os << "toric(n=" << n_ << ",Lbox=" << grid_->half_width() << ",points=" << grid_->points()
     << ")";
  return os.str();
}

ToricPotential ToricModel::from_function(const toric::ToricFunction& p) const {
  if (p.dim() != n_) throw ConfigError("toric potential dimension mismatch");
  double tail = toric::tail_bound(toric::fs_toric_potential(n_) + p, *grid_);
  if (tail > tail_tol_) {
    std::ostringstream os;
    os << "toric potential reaches the box boundary (tail bound " << tail << ")";
    throw TruncationError(os.str());
  }
  ToricPotential r;
  r.fn = std::make_shared<const toric::ToricFunction>(p);
  r.v.resize(size());
  r.g.resize(size());
  r.r.resize(size());
  std::vector<toric::ToricFunction> charts;
  for (int c = 0; c <= n_; ++c) charts.push_back(p.in_chart(c));
  for (std::size_t i = 0; i < size(); ++i) {
    toric::Jet J = charts[chart_[i]].jet(chart_node(i), 2);
    r.v[i] = J.v;
    Vec3 g = Vec3::Zero();
    Mat3 h = Mat3::Zero();
    for (int a = 0; a < n_; ++a) {
      g[a] = J.g[a];
      for (int b = 0; b < n_; ++b) h(a, b) = J.h[a][b];
    }
    r.g[i] = g;
    r.r[i] = h0inv_[i] * h;
  }
  return r;
}

ToricPotential ToricModel::zero() const { return from_function(toric::ToricFunction(n_)); }

MatrixForm ToricModel::base_form() const {
  MatrixForm f;
  Mat3 I = Mat3::Zero();
  for (int a = 0; a < n_; ++a) I(a, a) = 1.0;
  f.m.assign(size(), I);
  return f;
}

void ToricModel::require_derivatives(const Potential& p, const char* what) const {
  if (!p.has_derivatives) {
    std::ostringstream os;
    os << what << ": potential carries nodal values only";
    throw DomainError(os.str());
  }
}

MatrixForm ToricModel::ddbar(const Potential& p) const {
  require_derivatives(p, "ddbar");
  MatrixForm f;
  f.m = p.r;
  return f;
}

MatrixForm ToricModel::kahler(const Potential& p) const { return base_form() + ddbar(p); }

MatrixForm ToricModel::gradient_form(const Potential& p, const Potential& q) const {
  require_derivatives(p, "gradient_form");
  require_derivatives(q, "gradient_form");
  MatrixForm f;
  f.m.resize(size());
  for (std::size_t i = 0; i < size(); ++i) {
    Mat3 G = 0.5 * (p.g[i] * q.g[i].transpose() + q.g[i] * p.g[i].transpose());
    f.m[i] = h0inv_[i] * G;
  }
  return f;
}

double ToricModel::integrate(const Values* h, std::span<const Form* const> forms) const {
  if (int(forms.size()) != n_) throw ConfigError("toric integrate needs exactly n forms");
  Values d(size());
  std::vector<Mat3> slot(n_);
  for (std::size_t i = 0; i < size(); ++i) {
    for (int s = 0; s < n_; ++s) slot[s] = forms[s]->m[i];
    d[i] = toric::mixed_discriminant(slot, n_);
    if (h) d[i] *= (*h)[i];
  }
  return weighted_sum(vol_w_, d);
}

Values ToricModel::volume_ratio(const Potential& p) const {
  MatrixForm k = kahler(p);
  Values r(size());
  for (std::size_t i = 0; i < size(); ++i) r[i] = toric::det_n(k.m[i], n_);
  return r;
}

double ToricModel::form_margin(const Form& a) const {
  double m = INFINITY;
  for (std::size_t i = 0; i < a.m.size(); ++i) {
    Eigen::MatrixXd B = a.m[i].topLeftCorner(n_, n_);
    Eigen::EigenSolver<Eigen::MatrixXd> es(B, false);
    m = std::min(m, es.eigenvalues().real().minCoeff());
  }
  return m;
}

Values ToricModel::trace_laplacian(const Potential& h, const Potential& p) const {
  require_derivatives(h, "trace_laplacian");
  MatrixForm k = kahler(p);
  Values r(size());
  for (std::size_t i = 0; i < size(); ++i) {
    Eigen::MatrixXd A = k.m[i].topLeftCorner(n_, n_);
    Eigen::MatrixXd R = h.r[i].topLeftCorner(n_, n_);
    if (!(toric::det_n(k.m[i], n_) > 0.0))
      throw DomainError("trace_laplacian: target is not Kahler");
    r[i] = A.partialPivLu().solve(R).trace();
  }
  return r;
}

ToricPotential ToricModel::ricci_shift(const Potential& p) const {
  if (!p.fn) {
    ToricPotential r;
    r.v = ricci_shift_values(p);
    r.has_derivatives = false;
    return r;
  }
  ToricPotential r;
  r.v.resize(size());
  r.g.resize(size());
  r.r.resize(size());
  std::vector<toric::ToricFunction> charts;
  for (int c = 0; c <= n_; ++c) charts.push_back(p.fn->in_chart(c));
  for (std::size_t i = 0; i < size(); ++i) {
    const double* y = chart_node(i);
    const auto& fc = charts[chart_[i]];
    toric::BaseFrame F = toric::base_frame(n_, y, 1);
    toric::RelJet rj = toric::ricci_shift_jet(n_, F, fc.jet(y, 3), 1);
    r.v[i] = rj.v;
    r.g[i] = rj.g;
    double yc[toric::kMaxDim] = {0, 0, 0};
    for (int a = 0; a < n_; ++a) yc[a] = std::max(y[a], kChartFloor);
    toric::BaseFrame Fc = toric::base_frame(n_, yc, 2);
    toric::RelJet rc = toric::ricci_shift_jet(n_, Fc, fc.jet(yc, 4), 2);
    r.r[i] = Fc.H0inv * rc.h;
  }
  return r;
}

Values ToricModel::ricci_shift_values(const Potential& p) const {
  Values d = volume_ratio(p);
  Values lv = guarded_log(d, 1e-8, "ricci");
  for (double& x : lv) x = -x;
  return lv;
}

}  // namespace kef
