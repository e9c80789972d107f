#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kef/core.hpp"
#include "kef/s2_geometry.hpp"
#include "kef/toric_geometry.hpp"

// Two concrete Kahler models behind one duck-typed interface. Potentials are
// always relative to the model's Kahler-Einstein base omega0 (so Ric omega0 =
// omega0 and f_{omega0} = 0); (1,1)-forms are stored relative to omega0 too.
//
// Every model M provides
//   M::Potential, M::Form
//   dim(), volume(), size()
//   zero(), values(p), kahler(p), ddbar(p), gradient_form(p, q), base_form()
//   integrate(h, forms)   ->  int h alpha_1 ^ ... ^ alpha_n   (h may be null)
//   volume_ratio(p)       ->  omega_p^n / omega0^n at the nodes
//   kahler_margin(p), form_margin(alpha)
//   trace_laplacian(h, p) ->  n i ddbar h ^ omega_p^{n-1} / omega_p^n
//   ricci_shift(p)        ->  rho with Ric omega_p = omega0 + i ddbar rho
//   ricci_shift_values(p) ->  values of rho only (works on coarser potentials)
//   name()
namespace kef {

Values operator+(const Values& a, const Values& b);
Values operator-(const Values& a, const Values& b);
Values operator*(double s, const Values& a);
inline Values operator*(const Values& a, double s) { return s * a; }

class SphereModel {
 public:
  using Potential = s2::ScalarField;
  using Form = Values;  // density relative to omega0

  explicit SphereModel(int L);
  explicit SphereModel(s2::GridPtr grid) : grid_(std::move(grid)) {}

  const s2::GridPtr& grid() const { return grid_; }
  int dim() const { return 1; }
  double volume() const { return s2::kVolume; }
  std::size_t size() const { return grid_->size(); }
  std::string name() const;

  Potential zero() const { return Potential::zero(grid_); }
  const Values& values(const Potential& p) const { return p.values(); }
  Form base_form() const { return Form(size(), 1.0); }
  Form kahler(const Potential& p) const;
  Form ddbar(const Potential& p) const { return s2::iddbar(p).values(); }
  Form gradient_form(const Potential& p, const Potential& q) const {
    return s2::gradient_density(p, q);
  }
  double integrate(const Values* h, std::span<const Form* const> forms) const;
  Values volume_ratio(const Potential& p) const { return kahler(p); }
  double kahler_margin(const Potential& p) const { return s2::kahler_margin(p); }
  double form_margin(const Form& a) const { return min_value(a); }
  Values trace_laplacian(const Potential& h, const Potential& p) const {
    return s2::trace_laplacian(h, p);
  }
  Potential ricci_shift(const Potential& p) const { return s2::ricci_shift(p); }
  Values ricci_shift_values(const Potential& p) const;

 private:
  s2::GridPtr grid_;
};

// Potential on the toric box grid: nodal values, gradients and the relative
// Hessian H0^{-1} D^2 p. `fn` keeps the closed form when there is one, which
// is what the Ricci operations differentiate. Gradients and matrices are in
// the dominant chart of each node (see toric::dominant_chart); every
// consumer is invariant under that change of frame.
struct ToricPotential {
  std::shared_ptr<const toric::ToricFunction> fn;
  Values v;
  std::vector<toric::Vec3> g;
  std::vector<toric::Mat3> r;
  bool has_derivatives = true;

  ToricPotential operator+(const ToricPotential& o) const;
  ToricPotential operator-(const ToricPotential& o) const { return *this + o * -1.0; }
  ToricPotential operator*(double s) const;
  ToricPotential shifted(double c) const;
};

struct MatrixForm {
  std::vector<toric::Mat3> m;  // relative to H0
  MatrixForm operator+(const MatrixForm& o) const;
  MatrixForm operator-(const MatrixForm& o) const { return *this + o * -1.0; }
  MatrixForm operator*(double s) const;
};

class ToricModel {
 public:
  using Potential = ToricPotential;
  using Form = MatrixForm;

  // tail_tol bounds the fs mass outside the box; construction fails above it.
  ToricModel(int n, double half_width, int points, double tail_tol = 1e-10);

  // ricci_shift differentiates to fourth order, which in the chart costs
  // eps / e^{y_a}. Its relative Hessian is smooth in e^{y}, so it is taken at
  // y clamped to >= kChartFloor, an O(e^{kChartFloor}) change.
  static constexpr double kChartFloor = -18.0;

  const toric::BoxGrid& grid() const { return *grid_; }
  int dim() const { return n_; }
  double volume() const { return toric::fs_volume(n_); }
  std::size_t size() const { return grid_->size(); }
  std::string name() const;
  double tail_tol() const { return tail_tol_; }

  // p is the relative potential u - u0; throws TruncationError if its
  // support reaches the box boundary.
  Potential from_function(const toric::ToricFunction& p) const;
  Potential zero() const;
  const Values& values(const Potential& p) const { return p.v; }
  Form base_form() const;
  Form kahler(const Potential& p) const;
  Form ddbar(const Potential& p) const;
  Form gradient_form(const Potential& p, const Potential& q) const;
  double integrate(const Values* h, std::span<const Form* const> forms) const;
  Values volume_ratio(const Potential& p) const;
  double kahler_margin(const Potential& p) const { return form_margin(kahler(p)); }
  double form_margin(const Form& a) const;
  Values trace_laplacian(const Potential& h, const Potential& p) const;
  Potential ricci_shift(const Potential& p) const;
  Values ricci_shift_values(const Potential& p) const;

 private:
  void require_derivatives(const Potential& p, const char* what) const;
  const double* chart_node(std::size_t i) const { return &y_[i * toric::kMaxDim]; }
  int n_;
  double tail_tol_;
  toric::BoxGridPtr grid_;
  std::vector<int> chart_;
  std::vector<double> y_;               // node coordinates in its chart
  std::vector<toric::Mat3> h0inv_;      // chart frame
  Values vol_w_;  // n! w_i det H0(x_i)
};

}  // namespace kef
