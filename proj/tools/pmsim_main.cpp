#include <clocale>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pmsim/config.hpp"
#include "pmsim/run.hpp"

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  CLI::App app{"two-ion parabolic-mirror entanglement simulator"};
  app.fallthrough();
  app.require_subcommand(0, 1);

  std::string config_path, out_dir = ".", delta_grid;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "INI config file; sections per module")
      ->envname("PMSIM_CONFIG");
  app.add_option("--out", out_dir, "output directory (default: current)");
  app.add_option("--set", sets, "override a config entry, section.key=value");

  auto* dynamics = app.add_subcommand("dynamics", "excitation amplitudes and probabilities vs time");
  auto* state = app.add_subcommand("state", "post-selected state fidelity and success vs splitting");
  state->add_option("--delta-grid", delta_grid, "splitting grid start:stop:step");
  auto* geometry = app.add_subcommand("geometry", "aperture dyadic, capture efficiency, fiber bound");
  auto* postselect = app.add_subcommand("postselect", "probe discrimination error vs reflectivity");
  auto* budget = app.add_subcommand("budget", "timing and rate ledger");
  auto* sweep = app.add_subcommand("sweep", "all scenarios into one directory");
  sweep->add_option("--delta-grid", delta_grid, "splitting grid start:stop:step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // help and friends
    std::cerr << "error: usage: " << e.what() << "\n";
    return 1;
  }

  pmsim::RunConfig rc;
  rc.out_dir = out_dir;
  rc.delta_grid = delta_grid;
  for (const CLI::App* sc : {dynamics, state, geometry, postselect, budget, sweep})
    if (sc->parsed()) rc.scenario = sc->get_name();

  try {
    if (!config_path.empty()) rc.overrides = pmsim::load_config_file(config_path);
    for (const auto& a : sets) pmsim::apply_override(rc.overrides, a);
    if (rc.scenario.empty()) {
      for (const auto& line : pmsim::manifest_lines(pmsim::resolve_with_defaults(rc.overrides)))
        std::cout << line << "\n";
      return 0;
    }
    for (const auto& path : pmsim::run(rc)) std::cout << path << "\n";
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: config: " << e.what() << "\n";
  } catch (const std::runtime_error& e) {
    std::cerr << "error: runtime: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
  }
  return 1;
}
