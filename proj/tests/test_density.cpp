#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "pmsim/density.hpp"

using namespace pmsim;
using cd = std::complex<double>;

namespace {

struct Rig {
  LevelScheme scheme;
  CouplingKernel kernel;
  AmplitudeTrajectory traj;
};

Rig make_rig(double gamma_tau, bool neglect_f0, int steps, double t_max_over_tau = 1.995) {
  ZeemanConfig z;
  z.neglect_f0 = neglect_f0;
  Rig r;
  r.scheme = build_level_scheme(z);
  MirrorGeometry geom;
  geom.perfect_mirror = true;
  geom.focal_length = gamma_tau / 4.0;
  r.kernel = build_kernel(r.scheme, geom, DyadicMatrix::Identity());
  r.traj = evolve(r.kernel, standard_initial_state(), t_max_over_tau * r.kernel.tau, 1, steps);
  return r;
}

}  // namespace

TEST_CASE("before the photon returns the trace grows like plain decay") {
  const Rig r = make_rig(3.0, false, 2000);
  for (double f : {0.2, 0.5, 0.9}) {
    const GroundDensity gd = ground_density(r.traj, r.kernel, f * r.kernel.tau);
    CHECK(gd.rho.trace().real() ==
          doctest::Approx(1.0 - std::exp(-3.0 * gd.t)).epsilon(1e-5));
    CHECK(gd.excited_population == doctest::Approx(std::exp(-3.0 * gd.t)).epsilon(1e-10));
  }
}

TEST_CASE("decayed plus residual population is conserved through the exchange window") {
  const Rig r = make_rig(3.0, false, 8000);
  for (int i = 0; i < 50; ++i) {
    const double t = (1.99 * i / 49.0) * r.kernel.tau;
    const GroundDensity gd = ground_density(r.traj, r.kernel, t);
    CHECK(std::abs(gd.rho.trace().real() + gd.excited_population - 1.0) < 1e-6);
  }
}

TEST_CASE("ground density stays hermitian and positive while interfering") {
  for (const bool keep_f0 : {false, true}) {
    const Rig r = make_rig(3.0, !keep_f0, 2000);
    for (double f : {0.6, 1.1, 1.5, 1.9}) {
      const GroundDensity gd = ground_density(r.traj, r.kernel, f * r.kernel.tau);
      CHECK((gd.rho - gd.rho.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gd.rho);
      CHECK(es.eigenvalues().minCoeff() > -1e-10);
      CHECK(es.eigenvalues().maxCoeff() < 1.0 + 1e-10);
    }
  }
}

TEST_CASE("ground_density validates trajectory, kernel, and window consistency") {
  const Rig r = make_rig(3.0, true, 500);
  CHECK_THROWS_AS(ground_density(r.traj, r.kernel, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(ground_density(r.traj, r.kernel, 2.5 * r.kernel.tau), std::invalid_argument);

  const Rig other_tau = make_rig(4.0, true, 500);
  CHECK_THROWS_AS(ground_density(r.traj, other_tau.kernel, 1.0), std::invalid_argument);

  const Rig other_f0 = make_rig(3.0, false, 500);
  CHECK_THROWS_AS(ground_density(r.traj, other_f0.kernel, 1.0), std::invalid_argument);

  AmplitudeTrajectory mangled = r.traj;
  mangled.b.conservativeResize(mangled.b.rows(), 8);
  CHECK_THROWS_AS(ground_density(mangled, r.kernel, 1.0), std::invalid_argument);
}

TEST_CASE("postselect extracts the qubit block verbatim") {
  GroundDensity gd;
  gd.rho = Eigen::MatrixXcd::Zero(16, 16);
  // pair index 4*g1+g2; qubit rows/cols {5, 7, 13, 15} in logical order.
  gd.rho(5, 5) = 0.10;
  gd.rho(7, 7) = 0.30;
  gd.rho(13, 13) = 0.20;
  gd.rho(15, 15) = 0.05;
  gd.rho(7, 13) = cd(-0.12, 0.04);
  gd.rho(13, 7) = cd(-0.12, -0.04);
  gd.rho(2, 2) = 0.25;  // outside the block, must not leak in
  const PostselectedState ps = postselect(gd);
  CHECK(ps.fidelity_defined);
  CHECK(ps.success_probability == doctest::Approx(0.65).epsilon(1e-14));
  CHECK(ps.rho_post(0, 0) == cd(0.10, 0.0));
  CHECK(ps.rho_post(1, 1) == cd(0.30, 0.0));
  CHECK(ps.rho_post(2, 2) == cd(0.20, 0.0));
  CHECK(ps.rho_post(3, 3) == cd(0.05, 0.0));
  CHECK(ps.rho_post(1, 2) == cd(-0.12, 0.04));
  // singlet overlap (rho11 + rho22 - 2 Re rho12)/2, normalised by the trace
  CHECK(ps.fidelity_singlet == doctest::Approx(0.5 * (0.30 + 0.20 + 0.24) / 0.65).epsilon(1e-14));

  GroundDensity empty;
  empty.rho = Eigen::MatrixXcd::Zero(16, 16);
  const PostselectedState none = postselect(empty);
  CHECK_FALSE(none.fidelity_defined);
  CHECK(none.success_probability == 0.0);

  GroundDensity bad;
  bad.rho = Eigen::MatrixXcd::Zero(4, 4);
  CHECK_THROWS_AS(postselect(bad), std::invalid_argument);
}

TEST_CASE("closed-form block has the advertised populations and coherence") {
  const PostselectedState ideal = closed_form_post(0.0);
  CHECK(ideal.success_probability == doctest::Approx(4.0 / 27.0).epsilon(1e-15));
  CHECK(ideal.fidelity_singlet == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ideal.rho_post(1, 1) == cd(2.0 / 27.0, 0.0));
  CHECK(ideal.rho_post(1, 2).real() == doctest::Approx(-2.0 / 27.0).epsilon(1e-15));
  CHECK(ideal.rho_post(0, 0) == cd(0.0, 0.0));
  CHECK(ideal.rho_post(3, 3) == cd(0.0, 0.0));

  const PostselectedState three = closed_form_post(3.0);
  CHECK(three.success_probability == doctest::Approx(2.0 / 27.0).epsilon(1e-15));
  CHECK(three.fidelity_singlet == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(three.rho_post(2, 1) == std::conj(three.rho_post(1, 2)));

  // Dephasing only moves coherence: populations are even in delta.
  const PostselectedState plus = closed_form_post(1.7);
  const PostselectedState minus = closed_form_post(-1.7);
  CHECK(plus.success_probability == doctest::Approx(minus.success_probability).epsilon(1e-15));
  CHECK(plus.rho_post(1, 2) == std::conj(minus.rho_post(1, 2)));
  CHECK(plus.fidelity_singlet == doctest::Approx(minus.fidelity_singlet).epsilon(1e-14));

  CHECK_THROWS_AS(closed_form_post(std::nan("")), std::invalid_argument);
}

TEST_CASE("end-to-end state matches the closed form element by element") {
  for (double d : {-5.0, -1.5, 0.0, 0.8, 3.0}) {
    const PostselectedState nm = numeric_post(d, {});
    const PostselectedState cf = closed_form_post(d);
    CHECK((nm.rho_post - cf.rho_post).cwiseAbs().maxCoeff() < 1e-4);
    CHECK(nm.success_probability == doctest::Approx(cf.success_probability).epsilon(1e-6));
    CHECK(nm.fidelity_singlet == doctest::Approx(cf.fidelity_singlet).epsilon(1e-5));
  }
  // The ideal point is sharp: 4/27 success, unit singlet fidelity.
  const PostselectedState ideal = numeric_post(0.0, {});
  CHECK(std::abs(ideal.success_probability - 4.0 / 27.0) < 1e-6);
  CHECK(ideal.fidelity_singlet >= 1.0 - 1e-6);
  CHECK(ideal.fidelity_singlet <= 1.0 + 1e-9);
}

TEST_CASE("late evaluation times converge on the asymptotic block") {
  double err[3];
  int i = 0;
  for (double ev : {1.2, 1.5, 1.8}) {
    StateScenarioConfig cfg;
    cfg.gamma_tau = 10.0;
    cfg.eval_t_over_tau = ev;
    err[i++] = std::abs(numeric_post(0.0, cfg).success_probability - 4.0 / 27.0);
  }
  CHECK(err[0] > 10.0 * err[1]);
  CHECK(err[1] > 10.0 * err[2]);
  CHECK(err[2] < 1e-6);
}

TEST_CASE("numeric_post validates its scenario") {
  StateScenarioConfig cfg;
  cfg.gamma_tau = 0.0;
  CHECK_THROWS_AS(numeric_post(0.0, cfg), std::invalid_argument);
  cfg = {};
  cfg.eval_t_over_tau = 2.0;
  CHECK_THROWS_AS(numeric_post(0.0, cfg), std::invalid_argument);
  cfg.eval_t_over_tau = 0.0;
  CHECK_THROWS_AS(numeric_post(0.0, cfg), std::invalid_argument);
}

TEST_CASE("fidelity curve stitches the two routes over a grid") {
  Eigen::VectorXd grid(3);
  grid << -2.0, 0.0, 2.0;
  const FidelityCurve fc = fidelity_curve(grid, {});
  CHECK(fc.delta.size() == 3);
  for (int i = 0; i < 3; ++i) {
    const PostselectedState cf = closed_form_post(grid(i));
    CHECK(fc.success_closed(i) == doctest::Approx(cf.success_probability).epsilon(1e-14));
    CHECK(fc.fidelity_closed(i) == doctest::Approx(cf.fidelity_singlet).epsilon(1e-14));
    CHECK(std::abs(fc.success_numeric(i) - fc.success_closed(i)) < 1e-5);
    CHECK(std::abs(fc.fidelity_numeric(i) - fc.fidelity_closed(i)) < 1e-5);
  }
  CHECK_THROWS_AS(fidelity_curve(Eigen::VectorXd(), {}), std::invalid_argument);
}
