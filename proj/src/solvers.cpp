#include "kef/solvers.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <unsupported/Eigen/IterativeSolvers>

#include "kef/functionals.hpp"

namespace kef::solvers {
class AubinJacobian;
}

namespace Eigen::internal {
template <>
struct traits<kef::solvers::AubinJacobian> : public traits<Eigen::SparseMatrix<double>> {};
}  // namespace Eigen::internal

namespace kef::solvers {

// Galerkin Jacobian of N on spectral coefficients: d -> proj(P(d) / (1 + P(u)) + t d).
class AubinJacobian : public Eigen::EigenBase<AubinJacobian> {
 public:
  using Scalar = double;
  using RealScalar = double;
  using StorageIndex = int;
  enum {
    ColsAtCompileTime = Eigen::Dynamic,
    MaxColsAtCompileTime = Eigen::Dynamic,
    IsRowMajor = false
  };

  AubinJacobian(s2::GridPtr g, Values inv_density, double t)
      : g_(std::move(g)), inv_(std::move(inv_density)), t_(t) {}

  Eigen::Index rows() const { return s2::coeff_count(g_->degree_cap()); }
  Eigen::Index cols() const { return rows(); }

  template <class Rhs>
  Eigen::Product<AubinJacobian, Rhs, Eigen::AliasFreeProduct> operator*(
      const Eigen::MatrixBase<Rhs>& x) const {
    return Eigen::Product<AubinJacobian, Rhs, Eigen::AliasFreeProduct>(*this, x.derived());
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& d) const {
    ScalarField f(g_, std::vector<double>(d.data(), d.data() + d.size()));
    Values pd = s2::iddbar(f).values();
    const Values& fv = f.values();
    Values out(pd.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = pd[i] * inv_[i] + t_ * fv[i];
    std::vector<double> c = g_->analyze(out);
    return Eigen::Map<Eigen::VectorXd>(c.data(), Eigen::Index(c.size()));
  }

  Eigen::VectorXd preconditioner() const {
    int L = g_->degree_cap();
    Eigen::VectorXd p(rows());
    for (int l = 0; l <= L; ++l)
      for (int m = -l; m <= l; ++m)
        p[s2::coeff_index(l, m)] = 1.0 / (s2::SphericalGrid::p_eigen(l) + t_);
    return p;
  }

 private:
  s2::GridPtr g_;
  Values inv_;
  double t_;
};

class SpectralPreconditioner {
 public:
  template <class Mat>
  SpectralPreconditioner& analyzePattern(const Mat&) {
    return *this;
  }
  template <class Mat>
  SpectralPreconditioner& factorize(const Mat& m) {
    d_ = m.preconditioner();
    return *this;
  }
  template <class Mat>
  SpectralPreconditioner& compute(const Mat& m) {
    return factorize(m);
  }
  template <class Rhs>
  Eigen::VectorXd solve(const Rhs& b) const {
    return d_.cwiseProduct(b);
  }
  Eigen::ComputationInfo info() const { return Eigen::Success; }

 private:
  Eigen::VectorXd d_;
};

}  // namespace kef::solvers

namespace Eigen::internal {
template <class Rhs>
struct generic_product_impl<kef::solvers::AubinJacobian, Rhs, SparseShape, DenseShape, GemvProduct>
    : generic_product_impl_base<kef::solvers::AubinJacobian, Rhs,
                                generic_product_impl<kef::solvers::AubinJacobian, Rhs>> {
  using Scalar = typename Product<kef::solvers::AubinJacobian, Rhs>::Scalar;
  template <class Dest>
  static void scaleAndAddTo(Dest& dst, const kef::solvers::AubinJacobian& lhs, const Rhs& rhs,
                            const Scalar& alpha) {
    dst.noalias() += alpha * lhs.apply(rhs);
  }
};
}  // namespace Eigen::internal

namespace kef::solvers {

std::vector<double> ContinuityConfig::schedule() const {
  if (!(dt > 0.0) || !(t_max > 0.0) || !(t_max < 1.0))
    throw ConfigError("continuity schedule needs dt > 0 and 0 < t_max < 1");
  std::vector<double> s;
  for (int i = 1;; ++i) {
    double t = i * dt;
    if (t >= t_max - 1e-12) break;
    s.push_back(t);
  }
  s.push_back(t_max);
  return s;
}

namespace {

Values density_of(const ScalarField& u) {
  Values d = s2::iddbar(u).values();
  for (double& x : d) x += 1.0;
  return d;
}

// Grid values of N(phi).
Values aubin_residual_values(const ScalarField& a, const Values& log_da, const ScalarField& f,
                             double t, const ScalarField& phi) {
  Values lu = guarded_log(density_of(a + phi), 1e-8, "aubin_step");
  Values r(lu.size());
  const Values& fv = f.values();
  const Values& pv = phi.values();
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = lu[i] - log_da[i] - fv[i] + t * pv[i];
  return r;
}

}  // namespace

CalabiYauNode calabi_yau_segment(const SphereModel& m, const ScalarField& a, double t) {
  if (t < -1.0 || t > 0.0) throw ConfigError("calabi_yau_segment needs t in [-1, 0]");
  const auto& g = m.grid();
  ScalarField f = s2::ricci_potential(a);
  Values da = density_of(a);
  Values e(f.values().size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::exp((t + 1.0) * f.values()[i]);
  double c = -std::log(g->integrate(e, da) / s2::kVolume);
  Values target(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) target[i] = da[i] * e[i] * std::exp(c) - 1.0;
  ScalarField u = s2::poisson_solve(ScalarField::project(g, target), 1e-9);
  CalabiYauNode r;
  r.phi = (u - a).mean_zero();
  r.c = c;
  Values lu = guarded_log(density_of(a + r.phi), 1e-8, "calabi_yau_segment");
  Values la = guarded_log(da, 1e-8, "calabi_yau_segment");
  double res = 0.0;
  for (std::size_t i = 0; i < lu.size(); ++i)
    res = std::max(res, std::abs(lu[i] - la[i] - (t + 1.0) * f.values()[i] - c));
  r.residual = res;
  return r;
}

AubinStep aubin_step(const SphereModel& m, const ScalarField& a, const ScalarField& f_base, double t,
                     const ScalarField& warm, const ContinuityConfig& cfg) {
  if (!(t > 0.0) || !(t < 1.0)) throw ConfigError("aubin_step needs t in (0, 1)");
  const auto& g = m.grid();
  Values log_da = guarded_log(density_of(a), 1e-8, "aubin_step");
  auto band_sup = [&](const Values& r) {
    return max_abs(ScalarField::project(g, r).values());
  };
  AubinStep st;
  st.phi = warm;
  Values r = aubin_residual_values(a, log_da, f_base, t, st.phi);
  double res = band_sup(r);
  st.residuals.push_back(res);
  while (res > cfg.newton_tol) {
    if (st.iterations >= cfg.max_newton) {
      std::ostringstream os;
      os << "aubin_step: no convergence at t=" << t << " after " << cfg.max_newton
         << " iterations (residual " << res << ")";
      throw SolverError(os.str());
    }
    Values inv = density_of(a + st.phi);
    for (double& x : inv) x = 1.0 / x;
    AubinJacobian A(g, std::move(inv), t);
    std::vector<double> rc = g->analyze(r);
    Eigen::VectorXd rhs = Eigen::Map<Eigen::VectorXd>(rc.data(), Eigen::Index(rc.size()));
    Eigen::GMRES<AubinJacobian, SpectralPreconditioner> gm;
    gm.set_restart(cfg.gmres_restart);
    gm.setMaxIterations(cfg.gmres_max_iter);
    gm.setTolerance(cfg.gmres_tol);
    gm.compute(A);
    Eigen::VectorXd d = gm.solve(rhs);
    ScalarField delta(g, std::vector<double>(d.data(), d.data() + d.size()));
    double lam = 1.0;
    bool accepted = false;
    for (int h = 0; h < 12; ++h, lam *= 0.5) {
      ScalarField trial = st.phi - delta * lam;
      if (!(s2::kahler_margin(a + trial) > 0.0)) {
        ++st.damped;
        continue;
      }
      Values rt = aubin_residual_values(a, log_da, f_base, t, trial);
      double nr = band_sup(rt);
      if (!(nr < res) && nr > cfg.newton_tol) {
        ++st.damped;
        continue;
      }
      st.phi = trial;
      r = std::move(rt);
      res = nr;
      accepted = true;
      break;
    }
    ++st.iterations;
    if (!accepted) {
      std::ostringstream os;
      os << "aubin_step: damping exhausted at t=" << t << " (residual " << res << ")";
      throw SolverError(os.str());
    }
    st.residuals.push_back(res);
  }
  return st;
}

double aubin_path_residual(const ScalarField& a, const ScalarField& phi, double t) {
  ScalarField u = a + phi;
  ScalarField q = s2::ricci_shift(u) - u + phi * (1.0 - t);
  return max_abs(s2::iddbar(q).values());
}

namespace {

void fill_diagnostics(const SphereModel& m, const ScalarField& a, TrajectoryNode& nd) {
  ScalarField u = a + nd.phi;
  PairEnergies<SphereModel> E(m, a, u);
  int n = m.dim();
  nd.I_base = E.I();
  nd.I_minus_J = nd.I_base - E.J();
  nd.F = E.F();
  nd.E.clear();
  for (int k = 0; k <= n; ++k) nd.E.push_back(E.Ek(k, EkRoute::via_E0));
  nd.mean_f = E.ricci_b().mean_f;
  nd.I_ricci = aubin_I(m, u, E.ricci_b().rho);
  nd.Ik_ricci.clear();
  for (int k = 0; k <= n; ++k) nd.Ik_ricci.push_back(E.Ik_ricci_b(k));
}

}  // namespace

ContinuityTrajectory continuity_run(const SphereModel& m, const ScalarField& a,
                                    const ContinuityConfig& cfg) {
  if (!(s2::kahler_margin(a) > 0.0)) throw DomainError("continuity_run: base is not Kahler");
  if (cfg.cy_nodes < 2) throw ConfigError("continuity_run needs at least two Calabi-Yau nodes");
  ContinuityTrajectory tr;
  for (int j = 0; j < cfg.cy_nodes; ++j) {
    double t = -1.0 + double(j) / (cfg.cy_nodes - 1);
    if (j == cfg.cy_nodes - 1) t = 0.0;
    CalabiYauNode cy = calabi_yau_segment(m, a, t);
    TrajectoryNode nd;
    nd.t = t;
    nd.phi = cy.phi;
    nd.c = cy.c;
    nd.residual = cy.residual;
    fill_diagnostics(m, a, nd);
    tr.nodes.push_back(std::move(nd));
  }
  ScalarField f = s2::ricci_potential(a);
  double t_prev = 0.0;
  ScalarField phi_prev = tr.nodes.back().phi;
  ScalarField phi_prev2;
  double t_prev2 = -1.0;
  bool have2 = false;
  for (double target : cfg.schedule()) {
    int depth = 0;
    while (t_prev < target) {
      double step = (target - t_prev) / double(1 << depth);
      double t = depth == 0 ? target : t_prev + step;
      ScalarField warm = phi_prev;
      if (have2) warm = phi_prev + (phi_prev - phi_prev2) * ((t - t_prev) / (t_prev - t_prev2));
      AubinStep st;
      try {
        st = aubin_step(m, a, f, t, warm, cfg);
      } catch (const Error&) {
        if (++depth > cfg.max_bisections) throw;
        ++tr.bisections;
        continue;
      }
      TrajectoryNode nd;
      nd.t = t;
      nd.phi = st.phi;
      nd.iterations = st.iterations;
      nd.residual = st.residual();
      nd.newton = st.residuals;
      nd.path_residual = aubin_path_residual(a, st.phi, t);
      fill_diagnostics(m, a, nd);
      tr.nodes.push_back(std::move(nd));
      phi_prev2 = phi_prev;
      t_prev2 = t_prev;
      phi_prev = st.phi;
      t_prev = t;
      have2 = true;
      depth = 0;
    }
  }
  return tr;
}

ScalarField prescribe_ricci(const SphereModel& m, const ScalarField& phi) {
  const auto& g = m.grid();
  Values e(phi.values().size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::exp(-phi.values()[i]);
  double c = -std::log(g->integrate(e) / s2::kVolume);
  for (double& x : e) x = x * std::exp(c) - 1.0;
  return s2::poisson_solve(ScalarField::project(g, e), 1e-9);
}

}  // namespace kef::solvers
