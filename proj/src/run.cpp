#include "pmsim/run.hpp"

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "pmsim/budget.hpp"
#include "pmsim/csv.hpp"
#include "pmsim/density.hpp"
#include "pmsim/dynamics.hpp"
#include "pmsim/geometry.hpp"
#include "pmsim/levels.hpp"
#include "pmsim/postselect.hpp"

namespace pmsim {

namespace {

constexpr double kDegree = M_PI / 180.0;

ZeemanConfig zeeman_from(const ConfigMap& cfg) {
  ZeemanConfig z;
  z.delta1 = get_double(cfg, "levels.delta1");
  z.delta2 = get_double(cfg, "levels.delta2");
  z.gamma = get_double(cfg, "levels.gamma");
  z.hyperfine_split_S = get_double(cfg, "levels.hyperfine_split_s");
  z.hyperfine_split_P = get_double(cfg, "levels.hyperfine_split_p");
  z.neglect_f0 = get_bool(cfg, "levels.neglect_f0");
  return z;
}

MirrorGeometry geometry_from(const ConfigMap& cfg) {
  MirrorGeometry g;
  g.focal_length = get_double(cfg, "geometry.focal_length");
  g.foci_separation = get_double(cfg, "geometry.foci_separation");
  g.theta_min = get_double(cfg, "geometry.theta_min_deg") * kDegree;
  g.theta_max = get_double(cfg, "geometry.theta_max_deg") * kDegree;
  g.phi_full = get_bool(cfg, "geometry.phi_full");
  g.phi_min = get_double(cfg, "geometry.phi_min_deg") * kDegree;
  g.phi_max = get_double(cfg, "geometry.phi_max_deg") * kDegree;
  g.epsilon = {get_double(cfg, "geometry.epsilon_re"), get_double(cfg, "geometry.epsilon_im")};
  g.perfect_mirror = get_bool(cfg, "geometry.perfect_mirror");
  g.wavelength = get_double(cfg, "geometry.wavelength");
  return g;
}

ProbeConfig probe_from(const ConfigMap& cfg) {
  ProbeConfig p;
  if (get_bool(cfg, "postselect.calibrated")) {
    p = ProbeConfig::calibrated();
    p.reflectivity = get_double(cfg, "postselect.reflectivity");
    return p;
  }
  p.saturation_s0 = get_double(cfg, "postselect.saturation_s0");
  p.detuning = get_double(cfg, "postselect.detuning");
  p.pulse_length = get_double(cfg, "postselect.pulse_length");
  p.reflectivity = get_double(cfg, "postselect.reflectivity");
  p.coupling_efficiency = get_double(cfg, "postselect.coupling_efficiency");
  p.excitation_cap = get_double(cfg, "postselect.excitation_cap");
  p.prior_bright = get_double(cfg, "postselect.prior_bright");
  p.photon_rate_scale = get_double(cfg, "postselect.photon_rate_scale");
  p.zeeman_probe_delta = get_double(cfg, "postselect.zeeman_probe_delta");
  return p;
}

BudgetLedger ledger_from(const ConfigMap& cfg) {
  BudgetLedger l;
  l.cooling_time = get_double(cfg, "budget.cooling_time_us");
  l.prep_time = get_double(cfg, "budget.prep_time_us");
  l.pi_pulse_time = get_double(cfg, "budget.pi_pulse_time_us");
  l.postselect_time = get_double(cfg, "budget.postselect_time_us");
  l.travel_plus_classical_time = get_double(cfg, "budget.travel_plus_classical_time_us");
  l.trials_per_cooling = get_int(cfg, "budget.trials_per_cooling");
  l.factors.success_ideal = get_double(cfg, "budget.success_ideal");
  l.factors.mirror_eta = get_double(cfg, "budget.mirror_eta");
  l.factors.focal_intensity_per_ion = get_double(cfg, "budget.focal_intensity_per_ion");
  l.factors.bs_transmission = get_double(cfg, "budget.bs_transmission");
  l.factors.extra_loss = get_double(cfg, "budget.extra_loss");
  return l;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::vector<std::string> run_dynamics(const ConfigMap& cfg, const std::string& dir) {
  const LevelScheme scheme = build_level_scheme(zeeman_from(cfg));
  const double gamma_tau = get_double(cfg, "dynamics.gamma_tau");
  if (!(gamma_tau > 0.0)) throw std::invalid_argument("dynamics.gamma_tau must be positive");
  MirrorGeometry geom;
  DyadicMatrix grel;
  if (get_bool(cfg, "dynamics.ideal")) {
    geom.perfect_mirror = true;
    geom.focal_length = gamma_tau / (4.0 * scheme.zeeman.gamma);
    geom.foci_separation = 0.0;
    grel = DyadicMatrix::Identity();
  } else {
    geom = geometry_from(cfg);
    grel = gamma_rel(geom);
  }
  const CouplingKernel kernel = build_kernel(scheme, geom, grel);
  const int order = get_int(cfg, "dynamics.order");
  const double t_max = get_double(cfg, "dynamics.t_max_over_tau") * kernel.tau;
  const int steps = get_int(cfg, "dynamics.steps_per_tau");
  const AmplitudeTrajectory traj = evolve(kernel, standard_initial_state(), t_max, order, steps);
  const RelevantAmplitudes rel = relevant_amplitudes(traj);
  const Eigen::VectorXd p1 = excitation_probability(traj, 1).y;
  const Eigen::VectorXd p2 = excitation_probability(traj, 2).y;

  const long n = traj.t.size();
  Eigen::MatrixXd rows(n, 7);
  for (long i = 0; i < n; ++i) {
    rows(i, 0) = traj.t(i) / kernel.tau;
    rows(i, 1) = p1(i);
    rows(i, 2) = p2(i);
    rows(i, 3) = std::abs(rel.seed(i));
    rows(i, 4) = std::abs(rel.sigma_plus(i));
    rows(i, 5) = std::abs(rel.sigma_minus(i));
    rows(i, 6) = std::abs(rel.f_zero(i));
  }
  const std::string path = join(dir, "dynamics.csv");
  write_csv(path,
            {"t_over_tau", "excitation_ion1_probability", "excitation_ion2_probability",
             "seed_amplitude_abs", "sigma_plus_amplitude_abs", "sigma_minus_amplitude_abs",
             "f0_amplitude_abs"},
            rows);
  return {path};
}

std::vector<std::string> run_state(const ConfigMap& cfg, const std::string& dir,
                                   const std::string& grid_text) {
  StateScenarioConfig sc;
  sc.gamma_tau = get_double(cfg, "density.gamma_tau");
  sc.eval_t_over_tau = get_double(cfg, "density.eval_t_over_tau");
  sc.steps_per_tau = get_int(cfg, "density.steps_per_tau");
  sc.neglect_f0 = get_bool(cfg, "levels.neglect_f0");
  Eigen::VectorXd grid;
  if (!grid_text.empty()) {
    grid = parse_grid(grid_text);
  } else {
    const double a = get_double(cfg, "density.delta_min");
    const double b = get_double(cfg, "density.delta_max");
    const double s = get_double(cfg, "density.delta_step");
    grid = parse_grid(format_number(a) + ":" + format_number(b) + ":" + format_number(s));
  }
  const FidelityCurve fc = fidelity_curve(grid, sc);
  Eigen::MatrixXd rows(grid.size(), 5);
  rows.col(0) = fc.delta;
  rows.col(1) = fc.success_closed;
  rows.col(2) = fc.fidelity_closed;
  rows.col(3) = fc.success_numeric;
  rows.col(4) = fc.fidelity_numeric;
  const std::string path = join(dir, "state.csv");
  write_csv(path,
            {"delta", "success_probability_closed", "fidelity_closed",
             "success_probability_numeric", "fidelity_numeric"},
            rows);
  return {path};
}

std::vector<std::string> run_geometry(const ConfigMap& cfg, const std::string& dir) {
  const MirrorGeometry base = geometry_from(cfg);
  const LevelScheme scheme = build_level_scheme(zeeman_from(cfg));
  const int n_ap = get_int(cfg, "geometry.aperture_points");
  if (n_ap < 2) throw std::invalid_argument("geometry.aperture_points must be at least 2");
  const double theta_min_deg = get_double(cfg, "geometry.theta_min_deg");

  Eigen::MatrixXd ap(n_ap, 4), eff(n_ap, 2);
  for (int i = 0; i < n_ap; ++i) {
    const double theta_max_deg =
        theta_min_deg + 1.0 + (179.0 - theta_min_deg) * i / (n_ap - 1.0);
    MirrorGeometry g = base;
    g.theta_max = theta_max_deg * kDegree;
    const DyadicMatrix grel = gamma_rel(g);
    ap(i, 0) = theta_max_deg;
    ap(i, 1) = grel(0, 0);
    ap(i, 2) = grel(1, 1);
    ap(i, 3) = grel(2, 2);
    eff(i, 0) = theta_max_deg;
    eff(i, 1) = efficiency_eta(g, scheme);
  }
  const std::string ap_path = join(dir, "aperture.csv");
  write_csv(ap_path, {"theta_max_deg", "gamma_rel_xx", "gamma_rel_yy", "gamma_rel_zz"}, ap);
  const std::string eff_path = join(dir, "efficiency.csv");
  write_csv(eff_path, {"theta_max_deg", "efficiency_eta"}, eff);

  const int n_w = get_int(cfg, "geometry.waist_points");
  if (n_w < 2) throw std::invalid_argument("geometry.waist_points must be at least 2");
  const double w0 = get_double(cfg, "geometry.waist_min");
  const double w1 = get_double(cfg, "geometry.waist_max");
  if (!(w0 > 0.0) || !(w1 > w0)) throw std::invalid_argument("geometry waist range is invalid");
  Eigen::MatrixXd fib(n_w, 3);
  for (int i = 0; i < n_w; ++i) {
    const double w = w0 + (w1 - w0) * i / (n_w - 1.0);
    const double one = fiber_coupling_efficiency(w);
    fib(i, 0) = w;
    fib(i, 1) = one;
    fib(i, 2) = one * one;
  }
  const std::string fib_path = join(dir, "fiber.csv");
  write_csv(fib_path, {"waist_over_pupil_radius", "single_pass_overlap", "two_mirror_bound"}, fib);
  return {ap_path, eff_path, fib_path};
}

std::vector<std::string> run_postselect(const ConfigMap& cfg, const std::string& dir) {
  const ProbeConfig probe = probe_from(cfg);
  const int n_r = get_int(cfg, "postselect.r_points");
  if (n_r < 2) throw std::invalid_argument("postselect.r_points must be at least 2");
  Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(n_r, 0.0, 1.0);
  const std::string p1 = join(dir, "error_ion1.csv");
  const std::string p2 = join(dir, "error_ion2.csv");
  write_csv(p1, {"reflectivity", "error_probability"}, error_vs_reflectivity(probe, 1, grid));
  write_csv(p2, {"reflectivity", "error_probability"}, error_vs_reflectivity(probe, 2, grid));

  const DiscriminationResult d1 = discriminate(probe, 1);
  const double r1 = threshold_reflectivity(probe, 1, probe.excitation_cap);
  const double r2 = threshold_reflectivity(probe, 2, probe.excitation_cap);
  std::vector<std::string> lines = {
      "phase_shift_rad = " + format_number(d1.phase_shift),
      "mean_photon_at_ion = " + format_number(d1.mean_photon_at_ion),
      "threshold_reflectivity_ion1 = " + format_number(r1),
      "threshold_reflectivity_ion2 = " + format_number(r2),
      "success_reduction = " + format_number(success_reduction(r1, r2)),
      "postselection_fidelity = " +
          format_number(postselection_fidelity(probe, probe.zeeman_probe_delta)),
  };
  const std::string rep = join(dir, "postselect.txt");
  write_lines(rep, lines);
  return {p1, p2, rep};
}

std::vector<std::string> run_budget(const ConfigMap& cfg, const std::string& dir) {
  const BudgetLedger ledger = ledger_from(cfg);
  std::vector<std::string> lines = budget_report(ledger);
  BudgetLedger fast = ledger;
  fast.trials_per_cooling = get_int(cfg, "budget.trials_per_cooling_fast");
  lines.push_back("trials_per_cooling_fast = " +
                  format_number(fast.trials_per_cooling));
  lines.push_back("repetition_rate_fast_hz = " + format_number(repetition_rate(fast)));
  lines.push_back("entanglement_rate_fast_hz = " + format_number(entanglement_rate(fast)));
  const std::string path = join(dir, "budget.txt");
  write_lines(path, lines);
  return {path};
}

}  // namespace

Eigen::VectorXd parse_grid(const std::string& text) {
  const size_t c1 = text.find(':');
  const size_t c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw std::invalid_argument("grid must look like start:stop:step: " + text);
  ConfigMap tmp{{"a", text.substr(0, c1)},
                {"b", text.substr(c1 + 1, c2 - c1 - 1)},
                {"s", text.substr(c2 + 1)}};
  const double a = get_double(tmp, "a");
  const double b = get_double(tmp, "b");
  const double s = get_double(tmp, "s");
  if (!(s > 0.0) || b < a) throw std::invalid_argument("grid range is empty or inverted: " + text);
  const long n = static_cast<long>(std::floor((b - a) / s + 1e-9)) + 1;
  Eigen::VectorXd grid(n);
  for (long i = 0; i < n; ++i) grid(i) = a + s * i;
  return grid;
}

std::vector<std::string> manifest_lines(const ConfigMap& resolved) {
  std::vector<std::string> lines;
  for (const auto& entry : config_schema()) {
    const auto it = resolved.find(entry.key);
    const std::string value = it == resolved.end() ? entry.default_value : it->second;
    lines.push_back(entry.key + " = " + value + "  # " + entry.description);
  }
  return lines;
}

std::vector<std::string> run(const RunConfig& config) {
  const ConfigMap cfg = resolve_with_defaults(config.overrides);
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory: " + config.out_dir);

  std::vector<std::string> manifest = manifest_lines(cfg);
  manifest.insert(manifest.begin(), "scenario = " + (config.scenario.empty()
                                                         ? std::string("manifest")
                                                         : config.scenario));
  const std::string man_path = join(config.out_dir, "manifest.txt");
  write_lines(man_path, manifest);
  std::vector<std::string> written = {man_path};

  auto append = [&written](std::vector<std::string> more) {
    written.insert(written.end(), more.begin(), more.end());
  };
  const std::string& s = config.scenario;
  if (s.empty()) return written;
  if (s == "dynamics") {
    append(run_dynamics(cfg, config.out_dir));
  } else if (s == "state") {
    append(run_state(cfg, config.out_dir, config.delta_grid));
  } else if (s == "geometry") {
    append(run_geometry(cfg, config.out_dir));
  } else if (s == "postselect") {
    append(run_postselect(cfg, config.out_dir));
  } else if (s == "budget") {
    append(run_budget(cfg, config.out_dir));
  } else if (s == "sweep") {
    append(run_dynamics(cfg, config.out_dir));
    append(run_state(cfg, config.out_dir, config.delta_grid));
    append(run_geometry(cfg, config.out_dir));
    append(run_postselect(cfg, config.out_dir));
    append(run_budget(cfg, config.out_dir));
  } else {
    throw std::invalid_argument("unknown scenario: " + s);
  }
  return written;
}

}  // namespace pmsim
