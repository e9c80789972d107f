#pragma once

#include <vector>

#include "kef/models.hpp"

// Aubin's continuity path on the sphere for a base omega' = omega0 + i ddbar a:
//   t in [-1, 0]:  omega_phi^n = e^{(t+1) f' + c_t} omega'^n
//   t in (0, 1):   omega_phi^n = e^{f' - t phi} omega'^n
// phi_t is relative to omega'; the total potential is a + phi_t.
namespace kef::solvers {

using s2::ScalarField;

struct ContinuityConfig {
  int cy_nodes = 8;          // nodes in [-1, 0], endpoints included
  double dt = 0.02;
  double t_max = 0.99;
  double newton_tol = 1e-10;  // sup norm of the band-limited residual
  int max_newton = 30;
  int max_bisections = 6;
  double gmres_tol = 1e-13;
  int gmres_restart = 60;
  int gmres_max_iter = 400;

  std::vector<double> schedule() const;  // segment-2 targets after t = 0
};

struct CalabiYauNode {
  ScalarField phi;  // mean zero
  double c = 0.0;
  double residual = 0.0;
};

CalabiYauNode calabi_yau_segment(const SphereModel& m, const ScalarField& a, double t);

struct AubinStep {
  ScalarField phi;
  std::vector<double> residuals;  // before each Newton update, then final
  int iterations = 0;
  int damped = 0;  // number of halved updates
  double residual() const { return residuals.back(); }
};

// Newton-GMRES on N(phi) = log(omega_{a+phi} / omega_a) - f' + t phi,
// preconditioned by (P + t)^{-1}. Throws SolverError on failure.
AubinStep aubin_step(const SphereModel& m, const ScalarField& a, const ScalarField& f_base, double t,
                     const ScalarField& warm, const ContinuityConfig& cfg);

// sup |i ddbar (rho_u - u + (1 - t) phi)| for u = a + phi: the density of
// Ric omega_u - omega_u + (1 - t) i ddbar phi.
double aubin_path_residual(const ScalarField& a, const ScalarField& phi, double t);

struct TrajectoryNode {
  double t = 0.0;
  ScalarField phi;
  double c = 0.0;  // segment 1 only
  int iterations = 0;
  double residual = 0.0;
  double path_residual = 0.0;  // segment 2 only
  std::vector<double> newton;  // residual history, segment 2 only
  // Diagnostics for the pair (omega', omega_{phi_t}).
  double I_minus_J = 0.0;
  std::vector<double> E;  // E_0 .. E_n (via E_0)
  double F = 0.0;
  double mean_f = 0.0;          // (1/V) int f_t omega_t^n
  double I_ricci = 0.0;         // I(omega_t, Ric omega_t)
  std::vector<double> Ik_ricci;  // I_k(omega_t, Ric omega_t), k = 0..n
  double I_base = 0.0;          // I(omega', omega_t)
};

struct ContinuityTrajectory {
  std::vector<TrajectoryNode> nodes;
  int bisections = 0;
};

ContinuityTrajectory continuity_run(const SphereModel& m, const ScalarField& a,
                                    const ContinuityConfig& cfg);

// psi with Ric omega_psi = omega_phi: density e^{-phi + c}, Poisson recovery.
ScalarField prescribe_ricci(const SphereModel& m, const ScalarField& phi);

}  // namespace kef::solvers
