#include "pmsim/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace pmsim {

namespace {

using cd = std::complex<double>;

// Spherical unit vectors, columns q = -1, 0, +1, Condon-Shortley signs.
Eigen::Matrix3cd spherical_basis() {
  Eigen::Matrix3cd e = Eigen::Matrix3cd::Zero();
  double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  e.col(0) << cd(inv_sqrt2, 0), cd(0, -inv_sqrt2), 0.0;   // q = -1
  e.col(1) << 0.0, 0.0, 1.0;                              // q = 0
  e.col(2) << cd(-inv_sqrt2, 0), cd(0, -inv_sqrt2), 0.0;  // q = +1
  return e;
}

// phi1(z) = (e^z - 1)/z, series near zero to dodge cancellation.
cd phi1(cd z) {
  if (std::abs(z) < 1e-5) return 1.0 + z / 2.0 + z * z / 6.0;
  return (std::exp(z) - 1.0) / z;
}

struct DipoleTables {
  double c[4][4];  // [excited-4][ground], signed amplitudes, zero when forbidden
  int q[4][4];     // polarisation index m_g - m_e, only meaningful where c != 0
};

DipoleTables make_tables() {
  DipoleTables t{};
  for (int e = 0; e < 4; ++e) {
    for (int g = 0; g < 4; ++g) {
      TransitionDipole d = dipole_element(level_from_index(e + 4), level_from_index(g));
      int q = level_from_index(g).m - level_from_index(e + 4).m;
      if (std::abs(q) <= 1 && d.rate_weight > 0.0) {
        t.c[e][g] = d.spherical_components[q + 1].real();
        t.q[e][g] = q;
      }
    }
  }
  return t;
}

}  // namespace

int amp_index(int ion, const IonLevel& excited, const IonLevel& ground_other) {
  if (ion != 1 && ion != 2) throw std::invalid_argument("amp_index: ion must be 1 or 2");
  if (excited.manifold != Manifold::P_half)
    throw std::invalid_argument("amp_index: excited label must be a P level");
  if (ground_other.manifold != Manifold::S_half)
    throw std::invalid_argument("amp_index: spectator label must be an S level");
  return (ion - 1) * 16 + (level_index(excited) - 4) * 4 + level_index(ground_other);
}

CouplingKernel build_kernel(const LevelScheme& scheme, const MirrorGeometry& geom,
                            const DyadicMatrix& grel) {
  if (!(scheme.zeeman.gamma > 0.0)) throw std::invalid_argument("build_kernel: gamma must be > 0");
  if (scheme.levels.size() != 8 || scheme.dipoles.size() != 12)
    throw std::invalid_argument("build_kernel: level scheme tables have unexpected size");
  if (!(geom.tau() > 0.0)) throw std::invalid_argument("build_kernel: photon delay must be > 0");
  if (!grel.allFinite() || (grel - grel.transpose()).norm() > 1e-9)
    throw std::invalid_argument("build_kernel: capture dyadic must be finite and symmetric");

  CouplingKernel k;
  k.scheme = scheme;
  k.tau = geom.tau();
  k.gamma = scheme.zeeman.gamma;
  k.f0_dropped = scheme.zeeman.neglect_f0;

  Eigen::Matrix3cd basis = spherical_basis();
  k.w_sandwich = basis.adjoint() * grel.cast<cd>() * basis;

  DipoleTables tab = make_tables();
  double gamma = k.gamma;

  // Self part: (3/2) gamma sum_g c_{i g} c_{k g} delta_{q q}, spectator-diagonal.
  Eigen::Matrix4cd self_exc = Eigen::Matrix4cd::Zero();
  for (int i = 0; i < 4; ++i)
    for (int kk = 0; kk < 4; ++kk)
      for (int g = 0; g < 4; ++g)
        if (tab.c[i][g] != 0.0 && tab.c[kk][g] != 0.0 && tab.q[i][g] == tab.q[kk][g])
          self_exc(i, kk) += 1.5 * gamma * tab.c[i][g] * tab.c[kk][g];

  k.self_rate = Eigen::MatrixXcd::Zero(kAmpComponents, kAmpComponents);
  for (int ion = 0; ion < 2; ++ion)
    for (int i = 0; i < 4; ++i)
      for (int kk = 0; kk < 4; ++kk)
        for (int g = 0; g < 4; ++g)
          k.self_rate(ion * 16 + i * 4 + g, ion * 16 + kk * 4 + g) = self_exc(i, kk);

  for (int c = 0; c < kAmpComponents; ++c) {
    for (int r = 0; r < kAmpComponents; ++r) {
      if (r != c && std::abs(k.self_rate(r, c)) > 1e-12 * gamma)
        throw std::runtime_error("build_kernel: self coupling is not level-diagonal");
    }
  }

  // Cross part: target (alpha, i, j) fed by source (beta, k, l) on the other
  // ion; emission k->j at the source ion, absorption l->i at the target ion,
  // joined through the capture dyadic, with the delay phase of the two
  // spectator grounds.
  k.cross_matrix = Eigen::MatrixXcd::Zero(kAmpComponents, kAmpComponents);
  for (int alpha = 0; alpha < 2; ++alpha) {
    int beta = 1 - alpha;
    for (int i = 0; i < 4; ++i) {
      if (k.f0_dropped && level_from_index(i + 4).F == 0) continue;
      for (int j = 0; j < 4; ++j) {
        int row = alpha * 16 + i * 4 + j;
        for (int kk = 0; kk < 4; ++kk) {
          if (tab.c[kk][j] == 0.0) continue;
          for (int l = 0; l < 4; ++l) {
            if (tab.c[i][l] == 0.0) continue;
            cd w = k.w_sandwich(tab.q[kk][j] + 1, tab.q[i][l] + 1);
            if (std::abs(w) < 1e-15) continue;
            double omega_j = scheme.energies[static_cast<std::size_t>(j)];
            double omega_l = scheme.energies[static_cast<std::size_t>(l)];
            cd phase = std::exp(cd(0.0, -k.tau * (omega_j + omega_l)));
            k.cross_matrix(row, beta * 16 + kk * 4 + l) +=
                3.0 * gamma * tab.c[kk][j] * w * tab.c[i][l] * phase;
          }
        }
      }
    }
  }

  for (int c = 0; c < kAmpComponents; ++c) {
    int ion = c / 16;
    int exc = 4 + (c % 16) / 4;
    int gnd = c % 4;
    double omega = scheme.energies[static_cast<std::size_t>(exc)] +
                   scheme.energies[static_cast<std::size_t>(gnd)];
    (void)ion;
    k.decay_const[static_cast<std::size_t>(c)] = cd(0.0, omega) + k.self_rate(c, c);
  }
  return k;
}

Eigen::VectorXcd standard_initial_state() {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(kAmpComponents);
  v[amp_index(1, IonLevel{Manifold::P_half, 1, 0}, IonLevel{Manifold::S_half, 1, 0})] = 1.0;
  return v;
}

AmplitudeTrajectory evolve(const CouplingKernel& kernel, const Eigen::VectorXcd& initial,
                           double t_max, int order, int steps_per_tau) {
  if (initial.size() != kAmpComponents)
    throw std::invalid_argument("evolve: initial vector must have 32 components");
  if (initial.squaredNorm() > 1.0 + 1e-9)
    throw std::invalid_argument("evolve: initial amplitudes exceed one excitation");
  if (!(t_max > 0.0)) throw std::invalid_argument("evolve: t_max must be > 0");
  if (order < 0) throw std::invalid_argument("evolve: order must be >= 0");
  if (!(t_max < (order + 1) * kernel.tau))
    throw std::invalid_argument("evolve: window requires t_max < (order+1)*tau");
  if (steps_per_tau < 1) throw std::invalid_argument("evolve: steps_per_tau must be >= 1");
  if (order >= 2 && steps_per_tau < 2000)
    throw std::invalid_argument("evolve: orders beyond one need steps_per_tau >= 2000");

  double dt = kernel.tau / steps_per_tau;
  int n_steps = static_cast<int>(std::floor(t_max / dt + 1e-9));
  int n_pts = n_steps + 1;
  int s_tau = steps_per_tau;

  AmplitudeTrajectory traj;
  traj.t = Eigen::VectorXd::LinSpaced(n_pts, 0.0, n_steps * dt);
  traj.initial = initial;
  traj.order = order;
  traj.tau = kernel.tau;
  traj.dt = dt;
  traj.f0_dropped = kernel.f0_dropped;

  const auto& a = kernel.decay_const;

  Eigen::MatrixXcd total(n_pts, kAmpComponents);
  Eigen::MatrixXcd prev(n_pts, kAmpComponents);

  // Order 0: independent damped phase rotation of the seed.
  for (int c = 0; c < kAmpComponents; ++c) {
    cd b0 = initial[c];
    for (int k = 0; k < n_pts; ++k)
      prev(k, c) = (b0 == 0.0) ? cd(0.0) : b0 * std::exp(-a[static_cast<std::size_t>(c)] * traj.t[k]);
  }
  total = prev;

  // Order 1 in closed form: one delayed hand-off from each seeded component.
  if (order >= 1) {
    Eigen::MatrixXcd cur = Eigen::MatrixXcd::Zero(n_pts, kAmpComponents);
    for (int c = 0; c < kAmpComponents; ++c) {
      cd ac = a[static_cast<std::size_t>(c)];
      for (int s = 0; s < kAmpComponents; ++s) {
        cd kappa = kernel.cross_matrix(c, s);
        if (kappa == 0.0 || initial[s] == 0.0) continue;
        cd as = a[static_cast<std::size_t>(s)];
        for (int k = s_tau + 1; k < n_pts; ++k) {
          double u = traj.t[k] - kernel.tau;
          cur(k, c) += kappa * initial[s] * std::exp(-ac * u) * u * phi1((ac - as) * u);
        }
      }
    }
    total += cur;
    prev = cur;
  }

  // Orders >= 2: grid convolution of the delayed feed with the damped kernel.
  for (int n = 2; n <= order; ++n) {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n_pts, kAmpComponents);
    for (int c = 0; c < kAmpComponents; ++c)
      for (int s = 0; s < kAmpComponents; ++s) {
        cd kappa = kernel.cross_matrix(c, s);
        if (kappa == 0.0) continue;
        for (int k = s_tau; k < n_pts; ++k) g(k, c) += kappa * prev(k - s_tau, s);
      }
    Eigen::MatrixXcd cur = Eigen::MatrixXcd::Zero(n_pts, kAmpComponents);
    for (int c = 0; c < kAmpComponents; ++c) {
      cd decay = std::exp(-a[static_cast<std::size_t>(c)] * dt);
      for (int k = 1; k < n_pts; ++k)
        cur(k, c) = decay * cur(k - 1, c) + 0.5 * dt * (g(k, c) + decay * g(k - 1, c));
    }
    total += cur;
    prev = cur;
  }

  traj.b = total;
  return traj;
}

Curve excitation_probability(const AmplitudeTrajectory& traj, int ion) {
  if (ion != 1 && ion != 2) throw std::invalid_argument("excitation_probability: ion must be 1 or 2");
  Curve c;
  c.x = traj.t;
  c.y = Eigen::VectorXd::Zero(traj.t.size());
  int base = (ion - 1) * 16;
  for (int k = 0; k < traj.t.size(); ++k) {
    double p = 0.0;
    for (int j = 0; j < 16; ++j) p += std::norm(traj.b(k, base + j));
    c.y[k] = p;
  }
  return c;
}

RelevantAmplitudes relevant_amplitudes(const AmplitudeTrajectory& traj) {
  Eigen::VectorXcd want = standard_initial_state();
  if ((traj.initial - want).norm() > 1e-12)
    throw std::invalid_argument("relevant_amplitudes: trajectory was not seeded from the standard initial state");

  int i_seed = amp_index(1, IonLevel{Manifold::P_half, 1, 0}, IonLevel{Manifold::S_half, 1, 0});
  int i_plus = amp_index(2, IonLevel{Manifold::P_half, 1, +1}, IonLevel{Manifold::S_half, 1, -1});
  int i_minus = amp_index(2, IonLevel{Manifold::P_half, 1, -1}, IonLevel{Manifold::S_half, 1, +1});
  int i_f0 = amp_index(2, IonLevel{Manifold::P_half, 0, 0}, IonLevel{Manifold::S_half, 0, 0});

  RelevantAmplitudes r;
  r.t = traj.t;
  r.seed = traj.b.col(i_seed);
  r.sigma_plus = traj.b.col(i_plus);
  r.sigma_minus = traj.b.col(i_minus);
  r.f_zero = traj.b.col(i_f0);
  r.f_zero_dropped = traj.f0_dropped;
  r.max_other = 0.0;
  for (int c = 0; c < kAmpComponents; ++c) {
    if (c == i_seed || c == i_plus || c == i_minus || c == i_f0) continue;
    r.max_other = std::max(r.max_other, traj.b.col(c).cwiseAbs().maxCoeff());
  }
  return r;
}

}  // namespace pmsim
