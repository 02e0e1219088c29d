#pragma once

#include <Eigen/Dense>

#include "pmsim/dynamics.hpp"

namespace pmsim {

// Two-ion ground-manifold state after tracing the radiated field; pair index
// 4*g1 + g2 over canonical S-level indices.
struct GroundDensity {
  double t = 0.0;
  Eigen::MatrixXcd rho;            // 16x16 Hermitian
  double excited_population = 0.0; // residual amplitude norm, for the trace budget
};

// Logical block over {|00>,|01>,|10>,|11>} with bit 0 <-> m=-1, bit 1 <-> m=+1.
struct PostselectedState {
  Eigen::Matrix4cd rho_post = Eigen::Matrix4cd::Zero();  // unnormalised
  double success_probability = 0.0;
  double fidelity_singlet = 0.0;  // against (|01> - |10>)/sqrt(2), on the normalised block
  bool fidelity_defined = false;
};

// Radiated-field trace-out: double sum of decay events over both ions with the
// retarded interference terms, integrated on the trajectory grid (trapezoid).
// t must lie on the evolved window; it is snapped to the nearest grid point.
GroundDensity ground_density(const AmplitudeTrajectory& traj, const CouplingKernel& kernel,
                             double t);

PostselectedState postselect(const GroundDensity& gd);

// Long-time qubit block for the standard initial state with ideal capture:
// populations 2/(3(9+delta^2)) and coherence 2/(3((2 delta^2-9) - 9 i delta)).
PostselectedState closed_form_post(double delta);

struct StateScenarioConfig {
  double gamma_tau = 25.0;       // photon delay in lifetimes, sets the long-time window
  double eval_t_over_tau = 1.8;  // sample time inside (tau, 2 tau)
  int steps_per_tau = 2000;
  bool neglect_f0 = true;
};

struct FidelityCurve {
  Eigen::VectorXd delta;
  Eigen::VectorXd success_closed;
  Eigen::VectorXd fidelity_closed;
  Eigen::VectorXd success_numeric;
  Eigen::VectorXd fidelity_numeric;
};

// Closed-form and end-to-end numeric post-selected state side by side over a
// grid of differential Zeeman splittings.
FidelityCurve fidelity_curve(const Eigen::VectorXd& delta_grid,
                             const StateScenarioConfig& cfg = {});

// Convenience wiring for one delta point of the standard scenario; exposed for
// tests and the curve.
PostselectedState numeric_post(double delta, const StateScenarioConfig& cfg = {});

}  // namespace pmsim
