#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pmsim/config.hpp"

namespace pmsim {

// One CLI invocation, fully resolved: which scenario, the merged config
// overrides, and where outputs land.
struct RunConfig {
  std::string scenario;   // dynamics | state | geometry | postselect | budget | sweep
  ConfigMap overrides;    // config file plus --set assignments, before defaults
  std::string out_dir = ".";
  std::string delta_grid; // optional "start:stop:step" for the state scenario
};

// Executes the scenario and returns the paths written, manifest first.
// Throws std::invalid_argument for bad configuration and std::runtime_error
// for IO failures; outputs are byte-deterministic for identical inputs.
std::vector<std::string> run(const RunConfig& config);

// The resolved-parameter manifest: one line per key with value and description.
std::vector<std::string> manifest_lines(const ConfigMap& resolved);

// "start:stop:step" -> inclusive grid; rejects malformed or empty ranges.
Eigen::VectorXd parse_grid(const std::string& text);

}  // namespace pmsim
