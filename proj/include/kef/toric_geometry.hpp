#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "kef/core.hpp"

// Torus-invariant calculus on CP^n (n <= 3) in logarithmic coordinates
// x_i = log|z_i|^2. A torus-invariant (1,1)-form i ddbar u is represented by
// the Hessian D^2 u, and int alpha_1 ^ ... ^ alpha_n = n! int D(A_1..A_n) dx
// with D the mixed discriminant.
namespace kef::toric {

inline constexpr int kMaxDim = 3;

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Derivatives up to fourth order at a point; unused dimensions stay zero.
struct Jet {
  double v = 0.0;
  std::array<double, 3> g{};
  std::array<std::array<double, 3>, 3> h{};
  std::array<std::array<std::array<double, 3>, 3>, 3> t{};
  std::array<std::array<std::array<std::array<double, 3>, 3>, 3>, 3> q{};
};

// a * F(q(x)) with q quadratic:
//   gaussian: F = exp, q = -(x-c)^T S (x-c) / 2
//   bump:     F = max(q,0)^power, q = 1 - (x-c)^T S (x-c)
//   shifted:  a * (L(x+c) - L(x)), L = log(1 + sum e^x); S is unused. This is
//             log(sum c_i |z_i|^2 / |z|^2), a smooth function on CP^n.
struct ProfileTerm {
  enum class Kind { gaussian, bump, shifted };
  Kind kind = Kind::gaussian;
  double amp = 0.0;
  Vec3 center = Vec3::Zero();
  Mat3 S = Mat3::Identity();
  int power = 6;

  // Radius beyond which the term and its first four derivatives are negligible
  // (gaussian) or vanish (bump), measured from the center.
  double support_radius(int n) const;
};

class ToricFunction {
 public:
  ToricFunction() = default;
  explicit ToricFunction(int n) : n_(n) {}

  int dim() const { return n_; }
  double fs_weight() const { return fs_weight_; }
  const std::vector<ProfileTerm>& terms() const { return terms_; }

  ToricFunction& set_fs_weight(double w) { fs_weight_ = w; return *this; }
  ToricFunction& add_term(const ProfileTerm& t) { terms_.push_back(t); return *this; }
  ToricFunction& set_affine(const Vec3& lin, double c) { lin_ = lin; c_ = c; return *this; }
  ToricFunction& add_quadratic(const Mat3& Q) { quad_ += Q; return *this; }

  // order in {0,1,2,3,4}: highest derivative filled.
  Jet jet(const double* x, int order) const;
  double value(const double* x) const { return jet(x, 0).v; }

  // The same function written in chart c, i.e. y -> f(A_c y) with A_c from
  // chart_matrix. Every term kind maps to itself.
  ToricFunction in_chart(int c) const;

  ToricFunction operator+(const ToricFunction& o) const;
  ToricFunction operator-(const ToricFunction& o) const { return *this + o * -1.0; }
  ToricFunction operator*(double s) const;

 private:
  int n_ = 1;
  double fs_weight_ = 0.0;
  std::vector<ProfileTerm> terms_;
  Vec3 lin_ = Vec3::Zero();
  double c_ = 0.0;
  Mat3 quad_ = Mat3::Zero();  // x^T Q x / 2
};

// Jet of log(1 + sum_i e^{x_i}) computed stably (softmax cumulants).
Jet log_partition_jet(int n, const double* x, int order);
// softmax weights p_0 (the extra category) and p_1..p_n.
void softmax(int n, const double* x, double& p0, double* p);

// Chart c in 0..n swaps homogeneous coordinates 0 and c. In y = A_c x the
// weight that was p_c becomes p_0; A_c is an integer involution (A_0 = I).
// dominant_chart picks the largest weight so that H0^{-1} has no large
// rank-one part at x.
int dominant_chart(int n, const double* x);
Mat3 chart_matrix(int n, int c);

// kappa_n = n + 1 places [omega] in c_1; V = (n+1)^n.
double fs_weight(int n);
double fs_volume(int n);
ToricFunction fs_toric_potential(int n);

class BoxGrid {
 public:
  // Tensor-product trapezoid rule in s on [-1,1] under x = Lbox sinh(beta s)/sinh(beta).
  BoxGrid(int n, double half_width, int points, double beta = 3.0);

  int dim() const { return n_; }
  double half_width() const { return L_; }
  int points() const { return p_; }
  double beta() const { return beta_; }
  std::size_t size() const { return w_.size(); }
  const double* node(std::size_t i) const { return &x_[i * kMaxDim]; }
  const std::vector<double>& weights() const { return w_; }

 private:
  int n_, p_;
  double L_, beta_;
  std::vector<double> x_;  // kMaxDim coordinates per node
  std::vector<double> w_;
};

using BoxGridPtr = std::shared_ptr<const BoxGrid>;
BoxGridPtr make_box_grid(int n, double half_width, int points, double beta = 3.0);

struct MatrixField {
  int n = 1;
  std::vector<Mat3> m;
};

MatrixField hessian_field(const ToricFunction& u, const BoxGrid& grid);

double det_n(const Mat3& A, int n);
double mixed_discriminant(std::span<const Mat3> A, int n);
// n! * sum_nodes w D(A_1..A_n); throws TruncationError when tail > tol.
double wedge_integral(std::span<const MatrixField> forms, const BoxGrid& grid);

struct RicciData {
  MatrixField hessian;     // D^2 v
  Values potential;        // v = -log det D^2 u at the nodes
  Values ricci_potential;  // f = (v - v0) - (u - u0) + c, normalized
};
RicciData toric_ricci(const ToricFunction& u, const BoxGrid& grid);

double positivity_check(const MatrixField& A);

// Per-node data of the Fubini-Study base u0 = kappa log(1 + sum e^x), with the
// inverse Hessian in closed form so that far-field nodes stay well conditioned.
struct BaseFrame {
  Mat3 H0 = Mat3::Zero();
  Mat3 H0inv = Mat3::Zero();
  double det_H0 = 0.0;
  std::array<Mat3, 3> A0{};                // H0^{-1} d_i H0
  std::array<std::array<Mat3, 3>, 3> B0{};  // H0^{-1} d_i d_j H0
};
BaseFrame base_frame(int n, const double* x, int order);

// rho = -log det(I + H0^{-1} D^2 p), the shift of the Ricci potential caused by
// the relative potential p, with derivatives up to `order` (needs p to order+2).
struct RelJet {
  double v = 0.0;
  Vec3 g = Vec3::Zero();
  Mat3 h = Mat3::Zero();
};
RelJet ricci_shift_jet(int n, const BaseFrame& F, const Jet& p, int order);

// Deterministic sum of `terms` shifted terms with shifts in [-1.5,1.5]^n and
// amplitudes in [-amplitude, amplitude]; smooth on CP^n.
ToricFunction random_perturbation(int n, std::uint64_t seed, int terms, double amplitude);

// Estimated mass of det D^2 u outside the box relative to V.
double tail_bound(const ToricFunction& u, const BoxGrid& grid);

}  // namespace kef::toric
