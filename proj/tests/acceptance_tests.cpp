// Acceptance gate: one printed line per criterion, every tolerance pinned here.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pmsim/budget.hpp"
#include "pmsim/density.hpp"
#include "pmsim/dynamics.hpp"
#include "pmsim/geometry.hpp"
#include "pmsim/levels.hpp"
#include "pmsim/postselect.hpp"
#include "pmsim/run.hpp"

#include "oracles.hpp"

using namespace pmsim;

namespace {

struct Gate {
  int id;
  const char* label;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  bool ok = true;
  std::string failed;

  Gate(int id_, const char* label_) : id(id_), label(label_) {}

  void note(bool pass, const std::string& what) {
    CHECK_MESSAGE(pass, what);
    if (!pass) {
      ok = false;
      failed += (failed.empty() ? "" : "; ") + what;
    }
  }

  void finish(const std::string& values, double budget_seconds) {
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char tbuf[64];
    std::snprintf(tbuf, sizeof tbuf, "%.2fs < %.0fs", dt, budget_seconds);
    note(dt < budget_seconds, std::string("runtime ") + tbuf);
    std::printf("ACCEPTANCE %02d %s: %s (%s, %s%s%s)\n", id, label, ok ? "PASS" : "FAIL",
                values.c_str(), tbuf, failed.empty() ? "" : " | ", failed.c_str());
    std::fflush(stdout);
  }
};

std::string fmt(const char* f, ...) {
  char buf[256];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

MirrorGeometry aperture(double theta_min, double theta_max) {
  MirrorGeometry g;
  g.theta_min = theta_min;
  g.theta_max = theta_max;
  return g;
}

const double kDeg = M_PI / 180.0;

CouplingKernel ideal_kernel(double gamma_tau) {
  MirrorGeometry geom;
  geom.perfect_mirror = true;
  geom.focal_length = gamma_tau / 4.0;
  geom.foci_separation = 0.0;
  return build_kernel(build_level_scheme(ZeemanConfig{}), geom, DyadicMatrix::Identity());
}

double min_eigenvalue(const Eigen::MatrixXcd& rho) {
  const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
  return es.eigenvalues().minCoeff();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("criterion 1: ideal success probability") {
  Gate g{1, "ideal_success_probability"};
  // defaults put the sample 20 lifetimes after the delay while staying inside
  // the single-round-trip window
  const PostselectedState ps = numeric_post(0.0);
  const double diff = std::abs(ps.success_probability - 4.0 / 27.0);
  g.note(diff < 1e-3, fmt("|success - 4/27| = %.3g < 1e-3", diff));
  g.finish(fmt("success=%.9f", ps.success_probability), 5.0);
}

TEST_CASE("criterion 2: singlet fidelity, ideal and detuned") {
  Gate g{2, "singlet_fidelity_ideal_and_detuned"};
  const PostselectedState ideal = numeric_post(0.0);
  g.note(ideal.fidelity_defined, "ideal fidelity defined");
  g.note(ideal.fidelity_singlet >= 1.0 - 1e-6,
         fmt("ideal fidelity %.9f >= 1 - 1e-6", ideal.fidelity_singlet));
  const PostselectedState det = numeric_post(3.0);
  const PostselectedState closed = closed_form_post(3.0);
  g.note(std::abs(closed.fidelity_singlet - 0.4) < 1e-12, "closed form sits at 0.4");
  g.note(std::abs(closed.success_probability - 2.0 / 27.0) < 1e-12, "closed form sits at 2/27");
  g.note(std::abs(det.fidelity_singlet - 0.4) < 1e-3,
         fmt("detuned fidelity %.6f = 0.4 +- 1e-3", det.fidelity_singlet));
  g.note(std::abs(det.success_probability - 2.0 / 27.0) < 1e-3,
         fmt("detuned success %.6f = 2/27 +- 1e-3", det.success_probability));
  g.finish(fmt("F_ideal=%.9f F_det=%.6f S_det=%.6f", ideal.fidelity_singlet, det.fidelity_singlet,
               det.success_probability),
           5.0);
}

TEST_CASE("criterion 3: numeric matches the closed form over the splitting grid") {
  Gate g{3, "numeric_matches_closed_form_over_grid"};
  double worst = 0.0;
  for (int i = 0; i < 21; ++i) {
    const double delta = -5.0 + 0.5 * i;
    const Eigen::Matrix4cd diff =
        numeric_post(delta).rho_post - closed_form_post(delta).rho_post;
    worst = std::max(worst, diff.cwiseAbs().maxCoeff());
  }
  g.note(worst < 1e-4, fmt("max element difference %.3g < 1e-4 over 21 points", worst));
  g.finish(fmt("max_diff=%.3g", worst), 30.0);
}

TEST_CASE("criterion 4: excitation dynamics shape") {
  Gate g{4, "excitation_dynamics_shape"};
  const CouplingKernel kernel = ideal_kernel(3.0);
  const AmplitudeTrajectory traj =
      evolve(kernel, standard_initial_state(), 1.995 * kernel.tau, 1, 2000);
  const Curve p1 = excitation_probability(traj, 1);
  const Curve p2 = excitation_probability(traj, 2);

  double pre = 0.0, decay_err = 0.0, peak = 0.0;
  long peak_idx = 0;
  for (long i = 0; i < traj.t.size(); ++i) {
    if (traj.t(i) < kernel.tau) pre = std::max(pre, std::abs(p2.y(i)));
    decay_err = std::max(decay_err, std::abs(p1.y(i) - std::exp(-3.0 * traj.t(i))));
    if (p2.y(i) > peak) {
      peak = p2.y(i);
      peak_idx = i;
    }
  }
  const double peak_pos = traj.t(peak_idx) / kernel.tau;
  g.note(pre < 1e-14, fmt("max P2 before the delay %.3g < 1e-14", pre));
  g.note(std::abs(peak_pos - (1.0 + 2.0 / 9.0)) <= 0.002,
         fmt("P2 peak at t/tau = %.6f = 1+2/9 +- 0.002", peak_pos));
  g.note(decay_err < 1e-10, fmt("max |P1 - exp(-3 Gamma t)| = %.3g < 1e-10", decay_err));
  g.finish(fmt("peak=%.6f decay_err=%.2g", peak_pos, decay_err), 2.0);
}

TEST_CASE("criterion 5: probability conservation") {
  Gate g{5, "probability_conservation"};
  const CouplingKernel kernel = ideal_kernel(3.0);
  const AmplitudeTrajectory traj =
      evolve(kernel, standard_initial_state(), 1.995 * kernel.tau, 1, 8000);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double t = 1.99 * kernel.tau * i / 49.0;
    const GroundDensity gd = ground_density(traj, kernel, t);
    worst = std::max(worst, std::abs(gd.rho.trace() + gd.excited_population - 1.0));
  }
  g.note(worst < 1e-6, fmt("max |trace + excited - 1| = %.3g < 1e-6 at 50 times", worst));
  g.finish(fmt("conservation_err=%.3g", worst), 10.0);
}

TEST_CASE("criterion 6: aperture dyadic identities") {
  Gate g{6, "aperture_dyadic_identities"};
  const double full = (gamma_rel(aperture(0.0, M_PI)) - DyadicMatrix::Identity())
                          .cwiseAbs()
                          .maxCoeff();
  const double hemi =
      (gamma_rel(aperture(0.0, M_PI / 2.0)) - 0.5 * DyadicMatrix::Identity())
          .cwiseAbs()
          .maxCoeff();
  const MirrorGeometry std_ap = aperture(20.0 * kDeg, 135.0 * kDeg);
  const double vs_oracle =
      (gamma_rel(std_ap) -
       oracles::gamma_rel_oracle(std_ap.theta_min, std_ap.theta_max, 0.0, 2.0 * M_PI))
          .cwiseAbs()
          .maxCoeff();
  g.note(full < 1e-9, fmt("full sphere vs identity %.3g < 1e-9", full));
  g.note(hemi < 1e-9, fmt("hemisphere vs identity/2 %.3g < 1e-9", hemi));
  g.note(vs_oracle < 1e-9, fmt("working aperture vs quadrature oracle %.3g < 1e-9", vs_oracle));
  g.finish(fmt("full=%.2g hemi=%.2g oracle=%.2g", full, hemi, vs_oracle), 1.0);
}

TEST_CASE("criterion 7: helicity orthogonality") {
  Gate g{7, "helicity_orthogonality"};
  const MirrorGeometry geom = aperture(20.0 * kDeg, 135.0 * kDeg);
  const double clean = std::abs(helicity_cross_overlap(geom));
  const double defect = std::abs(helicity_cross_overlap(
      geom, [](double, double phi) { return 1.0 + 0.5 * std::cos(2.0 * phi); }));
  g.note(clean < 1e-10, fmt("overlap %.3g < 1e-10 for the metal mirror", clean));
  g.note(defect > 1e-3, fmt("injected azimuthal defect raises it to %.3g > 1e-3", defect));
  g.finish(fmt("clean=%.2g defect=%.2g", clean, defect), 2.0);
}

TEST_CASE("criterion 8: collection efficiency") {
  Gate g{8, "collection_efficiency"};
  const LevelScheme scheme = build_level_scheme(ZeemanConfig{});
  const double eta = efficiency_eta(aperture(20.0 * kDeg, 135.0 * kDeg), scheme);
  MirrorGeometry perfect = aperture(0.0, M_PI);
  perfect.perfect_mirror = true;
  const double eta_ideal = efficiency_eta(perfect, scheme);
  g.note(std::abs(eta - 0.47) <= 0.05, fmt("eta = %.4f = 0.47 +- 0.05", eta));
  g.note(std::abs(eta_ideal - 1.0) <= 1e-12,
         fmt("ideal full coverage eta = %.15f = 1", eta_ideal));
  g.finish(fmt("eta=%.4f ideal=%.12f", eta, eta_ideal), 2.0);
}

TEST_CASE("criterion 9: fiber coupling bound") {
  Gate g{9, "fiber_coupling_bound"};
  double best = 0.0, best_w = 0.0;
  for (double w = 0.5; w <= 10.0; w += 0.005) {
    const double v = fiber_coupling_efficiency(w);
    if (v > best) {
      best = v;
      best_w = w;
    }
  }
  g.note(std::abs(best - 0.49) <= 0.02, fmt("peak overlap %.4f = 0.49 +- 0.02", best));
  g.note(std::abs(best * best - 0.24) <= 0.02,
         fmt("two-mirror bound %.4f = 0.24 +- 0.02", best * best));
  g.finish(fmt("best=%.4f squared=%.4f at_waist=%.3f", best, best * best, best_w), 5.0);
}

TEST_CASE("criterion 10: discrimination bound and thresholds") {
  Gate g{10, "discrimination_bound_and_thresholds"};
  std::mt19937 rng(20140814);
  std::uniform_real_distribution<double> prior(0.05, 0.95), photons(0.0, 25.0), phase(0.0, 0.6);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double p0 = prior(rng), n = photons(rng), phi = phase(rng);
    const double analytic = helstrom_error(p0, 1.0 - p0, coherent_overlap(n, phi));
    worst = std::max(worst, std::abs(analytic - oracles::helstrom_oracle(p0, n, phi)));
  }
  g.note(worst < 1e-9, fmt("Helstrom vs numeric oracle %.3g < 1e-9 on 100 draws", worst));

  const ProbeConfig probe = ProbeConfig::calibrated();
  const double r1 = threshold_reflectivity(probe, 1, probe.excitation_cap);
  const double r2 = threshold_reflectivity(probe, 2, probe.excitation_cap);
  g.note(std::abs(r1 - 0.5) <= 0.1, fmt("R1 = %.4f = 0.5 +- 0.1", r1));
  g.note(std::abs(r2 - 0.22) <= 0.08, fmt("R2 = %.4f = 0.22 +- 0.08", r2));
  const double reduction = success_reduction(0.5, 0.22);
  g.note(reduction == 0.61, fmt("success_reduction(0.5, 0.22) = %.17g, exactly 0.61", reduction));
  g.finish(fmt("helstrom_err=%.2g R1=%.4f R2=%.4f cut=%.2f", worst, r1, r2, reduction), 30.0);
}

TEST_CASE("criterion 11: probe fidelity") {
  Gate g{11, "probe_fidelity"};
  const ProbeConfig probe = ProbeConfig::calibrated();
  const double f = postselection_fidelity(probe, probe.zeeman_probe_delta);
  g.note(std::abs(f - 0.998) <= 0.001, fmt("fidelity %.6f = 0.998 +- 0.001", f));
  g.finish(fmt("fidelity=%.6f", f), 1.0);
}

TEST_CASE("criterion 12: rate budget") {
  Gate g{12, "rate_budget"};
  const BudgetLedger ledger;
  const double slow = repetition_rate(ledger);
  BudgetLedger fast = ledger;
  fast.trials_per_cooling = 80;
  const double quick = repetition_rate(fast);
  const double ent = entanglement_rate(ledger);
  const double product = (4.0 / 27.0) * 0.47 * 0.78 * 0.78 * 0.39 * 1.0;
  g.note(std::abs(slow / 3.33e3 - 1.0) <= 0.01, fmt("rate %.2f Hz = 3.33 kHz +- 1%%", slow));
  g.note(std::abs(quick / 9.76e3 - 1.0) <= 0.01,
         fmt("80-trial rate %.2f Hz = 9.76 kHz +- 1%%", quick));
  g.note(std::abs(ent - 54.0) <= 2.0, fmt("entanglement rate %.2f = 54 +- 2 per second", ent));
  g.note(std::abs(ent - slow * product) <= 1e-9, "rate equals the documented factor product");
  g.finish(fmt("slow=%.2f fast=%.2f ent=%.2f", slow, quick, ent), 1.0);
}

TEST_CASE("criterion 13: property suites") {
  Gate g{13, "property_suites"};

  // density matrices stay Hermitian and positive, f0 kept or dropped
  double herm = 0.0, min_eig = 0.0;
  for (const bool drop_f0 : {true, false}) {
    ZeemanConfig z;
    z.neglect_f0 = drop_f0;
    MirrorGeometry geom;
    geom.perfect_mirror = true;
    geom.focal_length = 3.0 / 4.0;
    const CouplingKernel kernel =
        build_kernel(build_level_scheme(z), geom, DyadicMatrix::Identity());
    const AmplitudeTrajectory traj =
        evolve(kernel, standard_initial_state(), 1.995 * kernel.tau, 1, 2000);
    for (const double frac : {0.5, 1.2, 1.9}) {
      const GroundDensity gd = ground_density(traj, kernel, frac * kernel.tau);
      herm = std::max(herm, (gd.rho - gd.rho.adjoint()).cwiseAbs().maxCoeff());
      min_eig = std::min(min_eig, min_eigenvalue(gd.rho));
      const PostselectedState ps = postselect(gd);
      herm = std::max(herm, (ps.rho_post - ps.rho_post.adjoint()).cwiseAbs().maxCoeff());
      min_eig = std::min(min_eig, min_eigenvalue(ps.rho_post));
    }
  }
  g.note(herm < 1e-13, fmt("worst Hermiticity defect %.3g < 1e-13", herm));
  g.note(min_eig > -1e-10, fmt("smallest eigenvalue %.3g > -1e-10", min_eig));

  // evolve is linear in the seed
  {
    const CouplingKernel kernel = ideal_kernel(3.0);
    const Eigen::VectorXcd v1 = standard_initial_state();
    Eigen::VectorXcd v2 = Eigen::VectorXcd::Zero(kAmpComponents);
    v2(amp_index(2, IonLevel{Manifold::P_half, 1, 0}, IonLevel{Manifold::S_half, 1, 0})) = 1.0;
    const double t_max = 2.5 * kernel.tau;
    const AmplitudeTrajectory t1 = evolve(kernel, v1, t_max, 2, 2000);
    const AmplitudeTrajectory t2 = evolve(kernel, v2, t_max, 2, 2000);
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    double lin = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      std::complex<double> a{coef(rng), coef(rng)}, b{coef(rng), coef(rng)};
      const double scale = std::sqrt(std::norm(a) + std::norm(b));  // v1 and v2 are orthonormal
      a /= scale;
      b /= scale;
      const AmplitudeTrajectory tc = evolve(kernel, a * v1 + b * v2, t_max, 2, 2000);
      lin = std::max(lin, (tc.b - a * t1.b - b * t2.b).cwiseAbs().maxCoeff());
    }
    g.note(lin < 1e-12, fmt("superposed-seed linearity defect %.3g < 1e-12", lin));
  }

  // the aperture dyadic is an operator between zero and one
  {
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> ang(0.0, M_PI), az(0.0, 2.0 * M_PI);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 50; ++i) {
      double t0 = ang(rng), t1 = ang(rng);
      if (t0 > t1) std::swap(t0, t1);
      if (t1 - t0 < 1e-3) t1 = std::min(M_PI, t0 + 1e-3);
      MirrorGeometry geom = aperture(t0, t1);
      if (i % 2 == 1) {
        double p0 = az(rng), p1 = az(rng);
        if (p0 > p1) std::swap(p0, p1);
        geom.phi_full = false;
        geom.phi_min = p0;
        geom.phi_max = std::max(p1, p0 + 1e-3);
      }
      Eigen::SelfAdjointEigenSolver<DyadicMatrix> es(gamma_rel(geom));
      lo = std::min(lo, es.eigenvalues().minCoeff());
      hi = std::max(hi, es.eigenvalues().maxCoeff());
    }
    g.note(lo > -1e-12 && hi < 1.0 + 1e-12,
           fmt("50 random apertures: eigenvalues in [%.3g, %.6f]", lo, hi));
  }

  // the scenario runner is byte-deterministic
  {
    namespace fs = std::filesystem;
    RunConfig rc;
    rc.scenario = "sweep";
    rc.delta_grid = "0:2:1";
    rc.overrides = {{"dynamics.steps_per_tau", "300"},  {"dynamics.t_max_over_tau", "1.6"},
                    {"density.gamma_tau", "12"},        {"density.steps_per_tau", "600"},
                    {"geometry.aperture_points", "6"},  {"geometry.waist_points", "10"},
                    {"postselect.r_points", "25"}};
    const fs::path root = fs::temp_directory_path() / "pmsim_acceptance";
    fs::remove_all(root);
    rc.out_dir = (root / "a").string();
    const std::vector<std::string> a = run(rc);
    rc.out_dir = (root / "b").string();
    const std::vector<std::string> b = run(rc);
    bool identical = a.size() == b.size() && a.size() >= 10;
    for (size_t i = 0; identical && i < a.size(); ++i) identical = slurp(a[i]) == slurp(b[i]);
    g.note(identical, fmt("two sweep runs write %zu byte-identical files", a.size()));
  }

  g.finish("hermiticity, linearity, dyadic bounds, determinism", 60.0);
}
