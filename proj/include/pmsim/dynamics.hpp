#pragma once

#include <Eigen/Dense>
#include <complex>

#include "pmsim/geometry.hpp"
#include "pmsim/levels.hpp"

namespace pmsim {

// Single-excitation amplitude labels: component index = ion_block*16 +
// (excited - 4)*4 + ground_of_other_ion, with ion_block 0 for ion 1 and 1 for
// ion 2. "excited" is the canonical level index of the excited ion, "ground"
// the canonical index of the spectator ion's ground state.
inline constexpr int kAmpComponents = 32;
int amp_index(int ion, const IonLevel& excited, const IonLevel& ground_other);

struct Curve {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
};

// Instantaneous self part plus one-delay cross part of the eliminated photon
// dynamics. The self matrix carries the 1.5*gamma decay of every upper level;
// the cross matrix couples components of opposite ions and is tagged with the
// mirror delay tau. Both directions share one coefficient block.
struct CouplingKernel {
  Eigen::MatrixXcd self_rate;    // 32x32, diagonal 1.5*gamma for this scheme
  Eigen::MatrixXcd cross_matrix; // 32x32, nonzero only between opposite ion blocks
  double tau = 0.0;
  double gamma = 1.0;
  Eigen::Matrix3cd w_sandwich;   // dyadic in the spherical basis, rows/cols q = -1,0,+1
  LevelScheme scheme;
  bool f0_dropped = true;
  std::array<std::complex<double>, kAmpComponents> decay_const{};  // i*omega + self diagonal
};

struct AmplitudeTrajectory {
  Eigen::VectorXd t;        // uniform grid starting at 0, spacing dt = tau/steps_per_tau
  Eigen::MatrixXcd b;       // (n_times x 32) total amplitudes, all retained orders summed
  Eigen::VectorXcd initial; // the seed vector
  int order = 1;
  double tau = 0.0;
  double dt = 0.0;
  bool f0_dropped = true;
};

struct RelevantAmplitudes {
  Eigen::VectorXd t;
  Eigen::VectorXcd seed;         // ion 1 excited, partner in S(1,0)
  Eigen::VectorXcd sigma_plus;   // ion 2 raised on the sigma+ photon, partner S(1,-1)
  Eigen::VectorXcd sigma_minus;  // ion 2 raised on the sigma- photon, partner S(1,+1)
  Eigen::VectorXcd f_zero;       // ion 2 raised on the pi photon, partner S(0,0)
  bool f_zero_dropped = true;
  double max_other = 0.0;        // largest magnitude reached outside the four above
};

CouplingKernel build_kernel(const LevelScheme& scheme, const MirrorGeometry& geom,
                            const DyadicMatrix& grel);

// Neumann-order evolution: order 0 and 1 in closed form, higher orders by an
// exponential trapezoid on the grid. The window must satisfy
// t_max < (order+1)*tau so the discarded orders vanish identically.
AmplitudeTrajectory evolve(const CouplingKernel& kernel, const Eigen::VectorXcd& initial,
                           double t_max, int order, int steps_per_tau = 1000);

Eigen::VectorXcd standard_initial_state();

Curve excitation_probability(const AmplitudeTrajectory& traj, int ion);

// The four amplitudes that stay populated from the standard initial state;
// rejects trajectories seeded any other way.
RelevantAmplitudes relevant_amplitudes(const AmplitudeTrajectory& traj);

}  // namespace pmsim
