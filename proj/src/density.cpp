#include "pmsim/density.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "pmsim/geometry.hpp"
#include "pmsim/levels.hpp"

namespace pmsim {

namespace {

using cd = std::complex<double>;

struct ChannelTables {
  double c[4][4] = {};  // [excited-4][ground], signed amplitude
  int q[4][4] = {};     // m_ground - m_excited
};

ChannelTables tables_from(const LevelScheme& scheme) {
  ChannelTables t;
  for (const auto& d : scheme.dipoles) {
    const int e = level_index(d.excited) - 4;
    const int g = level_index(d.ground);
    const int q = d.ground.m - d.excited.m;
    t.c[e][g] = d.spherical_components(q + 1).real();
    t.q[e][g] = q;
  }
  return t;
}

struct Comp {
  int idx;
  int ion;   // 0 or 1
  int exc;   // excited level index 4..7
  int gnd;   // spectator ground of the other ion, 0..3
};

Comp decode(int comp) {
  return Comp{comp, comp / 16, 4 + (comp % 16) / 4, comp % 4};
}

int pair_index(int ion, int own_ground, int spectator_ground) {
  // pair index 4*g1 + g2; own_ground sits at the decaying ion's slot
  return ion == 0 ? 4 * own_ground + spectator_ground : 4 * spectator_ground + own_ground;
}

}  // namespace

GroundDensity ground_density(const AmplitudeTrajectory& traj, const CouplingKernel& kernel,
                             double t) {
  if (traj.b.cols() != kAmpComponents || traj.t.size() != traj.b.rows())
    throw std::invalid_argument("ground_density: malformed trajectory");
  if (std::abs(traj.tau - kernel.tau) > 1e-12 * std::max(1.0, kernel.tau))
    throw std::invalid_argument("ground_density: trajectory and kernel delay disagree");
  if (traj.f0_dropped != kernel.f0_dropped)
    throw std::invalid_argument("ground_density: trajectory and kernel level truncation disagree");
  const double dt = traj.dt;
  const long n = traj.t.size();
  if (!(t >= -0.5 * dt) || !(t <= traj.t(n - 1) + 0.5 * dt))
    throw std::invalid_argument("ground_density: time outside the evolved window");
  long idx = std::lround(t / dt);
  if (idx < 0) idx = 0;
  if (idx >= n) idx = n - 1;

  const LevelScheme& scheme = kernel.scheme;
  const ChannelTables tab = tables_from(scheme);
  const double gamma = kernel.gamma;
  const long s_tau = std::lround(kernel.tau / dt);

  std::vector<Comp> active;
  for (int c = 0; c < kAmpComponents; ++c)
    if (traj.b.col(c).cwiseAbs().maxCoeff() > 0.0) active.push_back(decode(c));

  // Per-slot integral of the decay-event correlator, phase-twisted so the
  // interaction-picture rotation cancels at the evaluation time.
  Eigen::MatrixXcd integral = Eigen::MatrixXcd::Zero(16, 16);
  Eigen::VectorXd pair_energy(16);
  for (int p = 0; p < 16; ++p)
    pair_energy(p) = scheme.energies[p / 4] + scheme.energies[p % 4];

  for (const Comp& A : active) {
    for (const Comp& B : active) {
      for (int gA = 0; gA < 4; ++gA) {
        const double cA = tab.c[A.exc - 4][gA];
        if (cA == 0.0) continue;
        for (int gB = 0; gB < 4; ++gB) {
          const double cB = tab.c[B.exc - 4][gB];
          if (cB == 0.0) continue;
          const int I = pair_index(A.ion, gA, A.gnd);
          const int J = pair_index(B.ion, gB, B.gnd);
          cd coef;
          bool delayed = false;
          if (A.ion == B.ion) {
            if (tab.q[A.exc - 4][gA] != tab.q[B.exc - 4][gB]) continue;
            coef = cd(1.5 * gamma * cA * cB, 0.0);
          } else {
            const cd w = kernel.w_sandwich(tab.q[A.exc - 4][gA] + 1, tab.q[B.exc - 4][gB] + 1);
            if (std::abs(w) < 1e-15) continue;
            coef = -3.0 * gamma * cA * w * cB *
                   std::exp(cd(0.0, -kernel.tau * pair_energy(I)));
            delayed = true;
          }
          const double dom = pair_energy(I) - pair_energy(J);
          const cd step = std::exp(cd(0.0, dom * dt));
          cd phase(1.0, 0.0);
          cd acc(0.0, 0.0);
          for (long k = 0; k <= idx; ++k) {
            const long ka = delayed ? k - s_tau : k;
            if (ka >= 0) {
              // endpoints carry half weight; a zero-length window integrates to zero
              const double w = (idx == 0) ? 0.0 : (k == 0 || k == idx) ? 0.5 * dt : dt;
              acc += w * phase * traj.b(ka, A.idx) * std::conj(traj.b(k, B.idx));
            }
            phase *= step;
          }
          integral(I, J) += coef * acc;
        }
      }
    }
  }

  GroundDensity gd;
  gd.t = traj.t(idx);
  Eigen::MatrixXcd half(16, 16);
  for (int I = 0; I < 16; ++I)
    for (int J = 0; J < 16; ++J)
      half(I, J) = std::exp(cd(0.0, -(pair_energy(I) - pair_energy(J)) * gd.t)) * integral(I, J);
  gd.rho = half + half.adjoint();
  gd.excited_population = traj.b.row(idx).squaredNorm();
  return gd;
}

PostselectedState postselect(const GroundDensity& gd) {
  if (gd.rho.rows() != 16 || gd.rho.cols() != 16)
    throw std::invalid_argument("postselect: density must be 16x16");
  // logical order {--, -+, +-, ++} over m = -1,+1 per ion; bit value 0 <-> m=-1
  static const int block[4] = {5, 7, 13, 15};
  PostselectedState ps;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) ps.rho_post(a, b) = gd.rho(block[a], block[b]);
  const double tr = ps.rho_post.trace().real();
  if (tr < 1e-15) {
    ps.success_probability = 0.0;
    ps.fidelity_singlet = 0.0;
    ps.fidelity_defined = false;
    return ps;
  }
  ps.success_probability = tr;
  const double overlap =
      0.5 * (ps.rho_post(1, 1).real() + ps.rho_post(2, 2).real() - 2.0 * ps.rho_post(1, 2).real());
  ps.fidelity_singlet = overlap / tr;
  ps.fidelity_defined = true;
  return ps;
}

PostselectedState closed_form_post(double delta) {
  if (!std::isfinite(delta)) throw std::invalid_argument("closed_form_post: delta must be finite");
  const double a = 2.0 / (3.0 * (9.0 + delta * delta));
  const cd c = 2.0 / (3.0 * cd(2.0 * delta * delta - 9.0, -9.0 * delta));
  PostselectedState ps;
  ps.rho_post(1, 1) = a;
  ps.rho_post(2, 2) = a;
  ps.rho_post(1, 2) = c;
  ps.rho_post(2, 1) = std::conj(c);
  ps.success_probability = 2.0 * a;
  ps.fidelity_singlet = (a - c.real()) / (2.0 * a);
  ps.fidelity_defined = true;
  return ps;
}

PostselectedState numeric_post(double delta, const StateScenarioConfig& cfg) {
  if (!(cfg.gamma_tau > 0.0)) throw std::invalid_argument("numeric_post: gamma_tau must be positive");
  if (!(cfg.eval_t_over_tau > 0.0) || !(cfg.eval_t_over_tau < 2.0))
    throw std::invalid_argument("numeric_post: evaluation time must lie in (0, 2) delays");
  ZeemanConfig z;
  z.delta1 = delta;  // differential splitting carried entirely by the excited manifold
  z.delta2 = 0.0;
  z.neglect_f0 = cfg.neglect_f0;
  const LevelScheme scheme = build_level_scheme(z);
  MirrorGeometry geom;
  geom.perfect_mirror = true;
  geom.focal_length = cfg.gamma_tau / 4.0;
  geom.foci_separation = 0.0;
  const CouplingKernel kernel = build_kernel(scheme, geom, DyadicMatrix::Identity());
  const AmplitudeTrajectory traj =
      evolve(kernel, standard_initial_state(), cfg.eval_t_over_tau * kernel.tau, 1, cfg.steps_per_tau);
  const GroundDensity gd = ground_density(traj, kernel, cfg.eval_t_over_tau * kernel.tau);
  return postselect(gd);
}

FidelityCurve fidelity_curve(const Eigen::VectorXd& delta_grid, const StateScenarioConfig& cfg) {
  if (delta_grid.size() == 0) throw std::invalid_argument("fidelity_curve: empty grid");
  FidelityCurve fc;
  const long n = delta_grid.size();
  fc.delta = delta_grid;
  fc.success_closed.resize(n);
  fc.fidelity_closed.resize(n);
  fc.success_numeric.resize(n);
  fc.fidelity_numeric.resize(n);
  for (long i = 0; i < n; ++i) {
    const PostselectedState cf = closed_form_post(delta_grid(i));
    const PostselectedState nm = numeric_post(delta_grid(i), cfg);
    fc.success_closed(i) = cf.success_probability;
    fc.fidelity_closed(i) = cf.fidelity_singlet;
    fc.success_numeric(i) = nm.success_probability;
    fc.fidelity_numeric(i) = nm.fidelity_singlet;
  }
  return fc;
}

}  // namespace pmsim
