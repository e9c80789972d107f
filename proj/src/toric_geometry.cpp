#include "kef/toric_geometry.hpp"

#include <cmath>
#include <sstream>

#include "kef/rng.hpp"

namespace kef::toric {

namespace {

double falling(int p, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= (p - i);
  return r;
}

// Chain rule for a * F(q(x)) with q quadratic (q_ijk = 0).
void profile_jet(int n, double a, const double F[5], const double* qi, const Mat3& qij, int order,
                 Jet& J) {
  J.v += a * F[0];
  if (order < 1) return;
  for (int i = 0; i < n; ++i) J.g[i] += a * F[1] * qi[i];
  if (order < 2) return;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) J.h[i][j] += a * (F[2] * qi[i] * qi[j] + F[1] * qij(i, j));
  if (order < 3) return;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        J.t[i][j][k] += a * (F[3] * qi[i] * qi[j] * qi[k] +
                             F[2] * (qij(i, j) * qi[k] + qij(i, k) * qi[j] + qij(j, k) * qi[i]));
  if (order < 4) return;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s4 = qi[i] * qi[j] * qi[k] * qi[l];
          double s3 = qij(i, j) * qi[k] * qi[l] + qij(i, k) * qi[j] * qi[l] +
                      qij(i, l) * qi[j] * qi[k] + qij(j, k) * qi[i] * qi[l] +
                      qij(j, l) * qi[i] * qi[k] + qij(k, l) * qi[i] * qi[j];
          double s2 = qij(i, j) * qij(k, l) + qij(i, k) * qij(j, l) + qij(i, l) * qij(j, k);
          J.q[i][j][k][l] += a * (F[4] * s4 + F[3] * s3 + F[2] * s2);
        }
}

void add_scaled(Jet& dst, const Jet& src, double s, int n, int order) {
  dst.v += s * src.v;
  for (int i = 0; i < n; ++i) {
    if (order >= 1) dst.g[i] += s * src.g[i];
    for (int j = 0; j < n; ++j) {
      if (order >= 2) dst.h[i][j] += s * src.h[i][j];
      for (int k = 0; k < n; ++k) {
        if (order >= 3) dst.t[i][j][k] += s * src.t[i][j][k];
        if (order >= 4)
          for (int l = 0; l < n; ++l) dst.q[i][j][k][l] += s * src.q[i][j][k][l];
      }
    }
  }
}

}  // namespace

double ProfileTerm::support_radius(int n) const {
  if (kind == Kind::shifted) return INFINITY;
  Eigen::MatrixXd B = S.topLeftCorner(n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues().minCoeff();
  if (!(lmin > 0.0)) return INFINITY;
  if (kind == Kind::bump) return 1.0 / std::sqrt(lmin);
  return std::sqrt(2.0 * 45.0 / lmin);
}

void softmax(int n, const double* x, double& p0, double* p) {
  double M = 0.0;
  for (int i = 0; i < n; ++i) M = std::max(M, x[i]);
  double z = std::exp(-M);
  double e0 = z;
  for (int i = 0; i < n; ++i) {
    p[i] = std::exp(x[i] - M);
    z += p[i];
  }
  p0 = e0 / z;
  for (int i = 0; i < n; ++i) p[i] /= z;
}

Jet log_partition_jet(int n, const double* x, int order) {
  Jet J;
  double p0, p[3] = {0, 0, 0};
  softmax(n, x, p0, p);
  double M = 0.0;
  for (int i = 0; i < n; ++i) M = std::max(M, x[i]);
  double z = std::exp(-M);
  for (int i = 0; i < n; ++i) z += std::exp(x[i] - M);
  J.v = M + std::log(z);
  if (order < 1) return J;
  for (int i = 0; i < n; ++i) J.g[i] = p[i];
  if (order < 2) return J;
  // Derivatives of L are the cumulants of the one-hot vector of a categorical
  // variable with weights (p0, p). Centering each outcome with 1 - p_i summed
  // from the small weights keeps every order accurate where some p_i -> 1.
  const int m = n + 1;
  double pi[4], e[4][3];
  for (int c = 0; c < m; ++c) {
    pi[c] = c == 0 ? p0 : p[c - 1];
    for (int i = 0; i < n; ++i) {
      if (c == i + 1) {
        double comp = p0;
        for (int k = 0; k < n; ++k)
          if (k != i) comp += p[k];
        e[c][i] = comp;
      } else {
        e[c][i] = -p[i];
      }
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s2 = 0.0;
      for (int c = 0; c < m; ++c) s2 += pi[c] * e[c][i] * e[c][j];
      J.h[i][j] = s2;
    }
  if (order < 3) return J;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s3 = 0.0;
        for (int c = 0; c < m; ++c) s3 += pi[c] * e[c][i] * e[c][j] * e[c][k];
        J.t[i][j][k] = s3;
      }
  if (order < 4) return J;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s4 = 0.0;
          for (int c = 0; c < m; ++c) s4 += pi[c] * e[c][i] * e[c][j] * e[c][k] * e[c][l];
          J.q[i][j][k][l] = s4 - J.h[i][j] * J.h[k][l] - J.h[i][k] * J.h[j][l] -
                            J.h[i][l] * J.h[j][k];
        }
  return J;
}

Jet ToricFunction::jet(const double* x, int order) const {
  Jet J;
  const int n = n_;
  if (fs_weight_ != 0.0) add_scaled(J, log_partition_jet(n, x, order), fs_weight_, n, order);
  double quadv = 0.0;
  for (int i = 0; i < n; ++i) {
    J.v += lin_[i] * x[i];
    for (int j = 0; j < n; ++j) quadv += 0.5 * x[i] * quad_(i, j) * x[j];
  }
  J.v += c_ + quadv;
  if (order >= 1)
    for (int i = 0; i < n; ++i) {
      J.g[i] += lin_[i];
      for (int j = 0; j < n; ++j) J.g[i] += quad_(i, j) * x[j];
    }
  if (order >= 2)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) J.h[i][j] += quad_(i, j);

  for (const auto& t : terms_) {
    if (t.kind == ProfileTerm::Kind::shifted) {
      double xs[kMaxDim] = {0, 0, 0};
      for (int i = 0; i < n; ++i) xs[i] = x[i] + t.center[i];
      add_scaled(J, log_partition_jet(n, xs, order), t.amp, n, order);
      add_scaled(J, log_partition_jet(n, x, order), -t.amp, n, order);
      continue;
    }
    Vec3 d = Vec3::Zero();
    for (int i = 0; i < n; ++i) d[i] = x[i] - t.center[i];
    Vec3 Sd = t.S * d;
    double quad = d.dot(Sd);
    double F[5];
    double qi[3] = {0, 0, 0};
    Mat3 qij;
    if (t.kind == ProfileTerm::Kind::gaussian) {
      double q = -0.5 * quad;
      if (q < -745.0) continue;
      double e = std::exp(q);
      for (double& f : F) f = e;
      for (int i = 0; i < n; ++i) qi[i] = -Sd[i];
      qij = -t.S;
    } else {
      double q = 1.0 - quad;
      if (q <= 0.0) continue;
      for (int k = 0; k <= 4; ++k) F[k] = t.power >= k ? falling(t.power, k) * std::pow(q, t.power - k) : 0.0;
      for (int i = 0; i < n; ++i) qi[i] = -2.0 * Sd[i];
      qij = -2.0 * t.S;
    }
    profile_jet(n, t.amp, F, qi, qij, order, J);
  }
  return J;
}

ToricFunction ToricFunction::operator+(const ToricFunction& o) const {
  ToricFunction r = *this;
  r.fs_weight_ += o.fs_weight_;
  r.terms_.insert(r.terms_.end(), o.terms_.begin(), o.terms_.end());
  r.lin_ += o.lin_;
  r.c_ += o.c_;
  r.quad_ += o.quad_;
  return r;
}

ToricFunction ToricFunction::operator*(double s) const {
  ToricFunction r = *this;
  r.fs_weight_ *= s;
  for (auto& t : r.terms_) t.amp *= s;
  r.lin_ *= s;
  r.c_ *= s;
  r.quad_ *= s;
  return r;
}

int dominant_chart(int n, const double* x) {
  int c = 0;
  double best = 0.0;
  for (int i = 0; i < n; ++i)
    if (x[i] > best) {
      best = x[i];
      c = i + 1;
    }
  return c;
}

Mat3 chart_matrix(int n, int c) {
  Mat3 A = Mat3::Identity();
  if (c == 0) return A;
  int k = c - 1;
  for (int j = 0; j < n; ++j) A(j, k) = -1.0;
  return A;
}

ToricFunction ToricFunction::in_chart(int c) const {
  if (c == 0) return *this;
  const int n = n_;
  const int k = c - 1;
  Mat3 A = chart_matrix(n, c);
  ToricFunction r(n);
  // L(A y) = L(y) - y_k
  r.fs_weight_ = fs_weight_;
  r.lin_ = A.transpose() * lin_;
  r.lin_[k] -= fs_weight_;
  r.c_ = c_;
  r.quad_ = A.transpose() * quad_ * A;
  for (ProfileTerm t : terms_) {
    Vec3 c2 = A * t.center;
    if (t.kind == ProfileTerm::Kind::shifted) {
      r.c_ -= t.amp * c2[k];
    } else {
      t.S = A.transpose() * t.S * A;
    }
    t.center = c2;
    r.terms_.push_back(t);
  }
  return r;
}

double fs_weight(int n) { return n + 1.0; }

double fs_volume(int n) { return std::pow(n + 1.0, n); }

ToricFunction fs_toric_potential(int n) {
  if (n < 1 || n > kMaxDim) {
    std::ostringstream os;
    os << "toric model supports n in {1,2,3}, got " << n;
    throw ConfigError(os.str());
  }
  ToricFunction u(n);
  u.set_fs_weight(fs_weight(n));
  return u;
}

ToricFunction random_perturbation(int n, std::uint64_t seed, int terms, double amplitude) {
  ToricFunction f(n);
  Rng rng(seed);
  for (int j = 0; j < terms; ++j) {
    ProfileTerm t;
    t.kind = ProfileTerm::Kind::shifted;
    t.amp = rng.uniform(-amplitude, amplitude);
    for (int i = 0; i < n; ++i) t.center[i] = rng.uniform(-1.5, 1.5);
    f.add_term(t);
  }
  return f;
}

// ---------------------------------------------------------------- grid

BoxGrid::BoxGrid(int n, double half_width, int points, double beta)
    : n_(n), p_(points), L_(half_width), beta_(beta) {
  if (n < 1 || n > kMaxDim) throw ConfigError("box grid dimension must be 1, 2 or 3");
  if (points < 3) throw ConfigError("box grid needs at least 3 points per axis");
  if (!(half_width > 0.0)) throw ConfigError("box half-width must be positive");
  std::vector<double> ax(points), aw(points);
  double h = 2.0 / (points - 1);
  double sb = std::sinh(beta);
  for (int j = 0; j < points; ++j) {
    double s = -1.0 + h * j;
    ax[j] = L_ * std::sinh(beta * s) / sb;
    aw[j] = h * L_ * beta * std::cosh(beta * s) / sb;
    if (j == 0 || j == points - 1) aw[j] *= 0.5;
  }
  std::size_t total = 1;
  for (int d = 0; d < n; ++d) total *= points;
  x_.assign(total * kMaxDim, 0.0);
  w_.assign(total, 1.0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    for (int d = 0; d < n; ++d) {
      int j = int(r % points);
      r /= points;
      x_[idx * kMaxDim + d] = ax[j];
      w_[idx] *= aw[j];
    }
  }
}

BoxGridPtr make_box_grid(int n, double half_width, int points, double beta) {
  return std::make_shared<const BoxGrid>(n, half_width, points, beta);
}

// ---------------------------------------------------------------- matrices

MatrixField hessian_field(const ToricFunction& u, const BoxGrid& grid) {
  MatrixField F;
  F.n = grid.dim();
  F.m.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Jet J = u.jet(grid.node(i), 2);
    Mat3 A = Mat3::Zero();
    for (int a = 0; a < F.n; ++a)
      for (int b = 0; b < F.n; ++b) A(a, b) = J.h[a][b];
    F.m[i] = A;
  }
  return F;
}

double det_n(const Mat3& A, int n) {
  switch (n) {
    case 1:
      return A(0, 0);
    case 2:
      return A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
    default:
      return A(0, 0) * (A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1)) -
             A(0, 1) * (A(1, 0) * A(2, 2) - A(1, 2) * A(2, 0)) +
             A(0, 2) * (A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0));
  }
}

double mixed_discriminant(std::span<const Mat3> A, int n) {
  if (int(A.size()) != n) throw ConfigError("mixed_discriminant needs exactly n matrices");
  if (n == 1) return A[0](0, 0);
  double sum = 0.0;
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  for (unsigned S = 1; S < (1u << n); ++S) {
    Mat3 M = Mat3::Zero();
    int cnt = 0;
    for (int i = 0; i < n; ++i)
      if (S & (1u << i)) {
        M += A[i];
        ++cnt;
      }
    double d = det_n(M, n);
    sum += ((n - cnt) % 2 == 0) ? d : -d;
  }
  return sum / fact;
}

double wedge_integral(std::span<const MatrixField> forms, const BoxGrid& grid) {
  int n = grid.dim();
  if (int(forms.size()) != n) throw ConfigError("wedge_integral needs exactly n forms");
  double tail = tail_bound(fs_toric_potential(n), grid);
  if (tail > 1e-10) {
    std::ostringstream os;
    os << "wedge_integral: box tail bound " << tail << " exceeds tolerance";
    throw TruncationError(os.str());
  }
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  Values d(grid.size());
  std::vector<Mat3> slot(n);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (int s = 0; s < n; ++s) slot[s] = forms[s].m[i];
    d[i] = mixed_discriminant(slot, n);
  }
  return fact * weighted_sum(grid.weights(), d);
}

double positivity_check(const MatrixField& A) {
  double m = INFINITY;
  for (const auto& M : A.m) {
    if (A.n == 1) {
      m = std::min(m, M(0, 0));
      continue;
    }
    Eigen::MatrixXd B = M.topLeftCorner(A.n, A.n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
    m = std::min(m, es.eigenvalues().minCoeff());
  }
  return m;
}

double tail_bound(const ToricFunction& u, const BoxGrid& grid) {
  int n = grid.dim();
  double L = grid.half_width();
  // Under the moment map det D^2 u0 dx is uniform on the simplex; a coordinate
  // leaves [-L, L] only when some barycentric weight drops below e^{-L}.
  double bound = fs_volume(n) * n * (n + 1.0) * std::exp(-L);
  for (const auto& t : u.terms()) {
    double reach = 0.0;
    for (int i = 0; i < n; ++i) reach = std::max(reach, std::abs(t.center[i]));
    double dist = L - reach;
    if (t.kind == ProfileTerm::Kind::shifted) {
      bound += fs_volume(n) * n * (n + 1.0) * std::abs(t.amp) * std::exp(-std::max(dist, 0.0));
      continue;
    }
    double r = t.support_radius(n);
    if (dist >= r) continue;
    if (t.kind == ProfileTerm::Kind::bump || dist <= 0.0) {
      bound += fs_volume(n) * std::abs(t.amp);
      continue;
    }
    Eigen::MatrixXd B = t.S.topLeftCorner(n, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
    double lmin = es.eigenvalues().minCoeff();
    bound += fs_volume(n) * std::abs(t.amp) * std::exp(-0.5 * lmin * dist * dist);
  }
  return bound;
}

// ---------------------------------------------------------------- Ricci

BaseFrame base_frame(int n, const double* x, int order) {
  BaseFrame F;
  double kap = fs_weight(n);
  Jet J = log_partition_jet(n, x, order >= 2 ? 4 : (order >= 1 ? 3 : 2));
  double p0, p[3] = {0, 0, 0};
  softmax(n, x, p0, p);
  double det = std::pow(kap, n) * p0;
  for (int i = 0; i < n; ++i) det *= p[i];
  F.det_H0 = det;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      F.H0(i, j) = kap * J.h[i][j];
      F.H0inv(i, j) = ((i == j ? 1.0 / p[i] : 0.0) + 1.0 / p0) / kap;
    }
  if (order >= 1)
    for (int i = 0; i < n; ++i) {
      Mat3 dH = Mat3::Zero();
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) dH(a, b) = kap * J.t[i][a][b];
      F.A0[i] = F.H0inv * dH;
    }
  if (order >= 2)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Mat3 ddH = Mat3::Zero();
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) ddH(a, b) = kap * J.q[i][j][a][b];
        F.B0[i][j] = F.H0inv * ddH;
      }
  return F;
}

namespace {

Mat3 pad_identity(int n) {
  Mat3 I = Mat3::Zero();
  for (int i = 0; i < n; ++i) I(i, i) = 1.0;
  return I;
}

Mat3 inverse_n(const Mat3& A, int n) {
  Mat3 R = Mat3::Zero();
  R.topLeftCorner(n, n) = A.topLeftCorner(n, n).inverse();
  return R;
}

}  // namespace

RelJet ricci_shift_jet(int n, const BaseFrame& F, const Jet& p, int order) {
  RelJet r;
  Mat3 P2 = Mat3::Zero();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) P2(a, b) = p.h[a][b];
  Mat3 I = pad_identity(n);
  Mat3 M = F.H0inv * P2;
  double d = det_n(I + M, n);
  if (!(d > 0.0)) throw DomainError("ricci: relative volume ratio is not positive");
  r.v = -std::log(d);
  if (order < 1) return r;
  Mat3 N = inverse_n(I + M, n);
  Mat3 NM = N * M;
  std::array<Mat3, 3> D{};
  for (int i = 0; i < n; ++i) {
    Mat3 P3 = Mat3::Zero();
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) P3(a, b) = p.t[i][a][b];
    Mat3 NHP3 = N * F.H0inv * P3;
    r.g[i] = (NM * F.A0[i]).trace() - NHP3.trace();
    D[i] = -NM * F.A0[i] + NHP3;
  }
  if (order < 2) return r;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Mat3 P4 = Mat3::Zero();
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) P4(a, b) = p.q[i][j][a][b];
      r.h(i, j) = (NM * F.B0[i][j]).trace() - (N * F.H0inv * P4).trace() +
                  (D[j] * F.A0[i]).trace() + (F.A0[j] * D[i]).trace() + (D[j] * D[i]).trace();
    }
  return r;
}

RicciData toric_ricci(const ToricFunction& u, const BoxGrid& grid) {
  int n = grid.dim();
  ToricFunction p = u - fs_toric_potential(n);
  RicciData R;
  R.hessian.n = n;
  R.hessian.m.resize(grid.size());
  R.potential.resize(grid.size());
  Values f(grid.size()), vol(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double* x = grid.node(i);
    BaseFrame F = base_frame(n, x, 2);
    Jet pj = p.jet(x, 4);
    RelJet rj = ricci_shift_jet(n, F, pj, 2);
    R.hessian.m[i] = F.H0 + rj.h;
    R.potential[i] = -std::log(F.det_H0) + rj.v;
    f[i] = rj.v - pj.v;
    vol[i] = F.det_H0 * std::exp(-rj.v);
  }
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  Values ef = exp_values(f);
  double z = fact * weighted_sum(grid.weights(), ef, vol) / fs_volume(n);
  for (double& v : f) v -= std::log(z);
  R.ricci_potential = std::move(f);
  return R;
}

}  // namespace kef::toric
