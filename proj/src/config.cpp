#include "pmsim/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pmsim {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string strip_comment(const std::string& s) {
  for (size_t i = 0; i < s.size(); ++i)
    if (s[i] == '#' || s[i] == ';') return s.substr(0, i);
  return s;
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']' || body.size() < 3)
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": malformed section header");
      section = trim(body.substr(1, body.size() - 2));
      continue;
    }
    const size_t eq = body.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    cfg[section.empty() ? key : section + "." + key] = value;
  }
  return cfg;
}

ConfigMap load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void apply_override(ConfigMap& cfg, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("override must look like section.key=value: " + assignment);
  cfg[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

const std::vector<ConfigEntry>& config_schema() {
  static const std::vector<ConfigEntry> schema = {
      {"levels.delta1", "0", "upper-manifold Zeeman splitting over the linewidth"},
      {"levels.delta2", "0", "ground-manifold Zeeman splitting over the linewidth"},
      {"levels.gamma", "1", "spontaneous decay rate; sets the time unit"},
      {"levels.hyperfine_split_s", "643", "ground hyperfine splitting in linewidths"},
      {"levels.hyperfine_split_p", "107", "upper hyperfine splitting in linewidths"},
      {"levels.neglect_f0", "true", "drop the far-detuned upper F=0 level from the exchange"},

      {"geometry.focal_length", "0.75", "mirror focal length in light-travel lifetimes"},
      {"geometry.foci_separation", "0", "gap between the facing foci, same units"},
      {"geometry.theta_min_deg", "20", "aperture lower polar angle, degrees"},
      {"geometry.theta_max_deg", "135", "aperture upper polar angle, degrees"},
      {"geometry.phi_full", "true", "cover the full azimuth"},
      {"geometry.phi_min_deg", "0", "azimuth lower bound when not full, degrees"},
      {"geometry.phi_max_deg", "360", "azimuth upper bound when not full, degrees"},
      {"geometry.epsilon_re", "-18.74", "mirror dielectric constant, real part"},
      {"geometry.epsilon_im", "3.37", "mirror dielectric constant, imaginary part"},
      {"geometry.perfect_mirror", "false", "treat the mirror as a lossless conductor"},
      {"geometry.wavelength", "1e-4", "optical wavelength in light-travel lifetimes"},
      {"geometry.aperture_points", "60", "rows in the aperture sweep output"},
      {"geometry.waist_min", "0.5", "fiber-mode waist sweep start, pupil-radius units"},
      {"geometry.waist_max", "10", "fiber-mode waist sweep end"},
      {"geometry.waist_points", "96", "rows in the fiber sweep output"},

      {"dynamics.gamma_tau", "3", "photon delay between the ions in lifetimes"},
      {"dynamics.order", "1", "retarded exchange orders to include"},
      {"dynamics.t_max_over_tau", "1.995", "evolution horizon in delays"},
      {"dynamics.steps_per_tau", "1000", "time resolution per delay"},
      {"dynamics.ideal", "true", "use the ideal full-coverage lossless mirror pair"},

      {"density.gamma_tau", "25", "delay used for the long-time state extraction"},
      {"density.eval_t_over_tau", "1.8", "state evaluation time in delays"},
      {"density.steps_per_tau", "2000", "time resolution per delay for the state run"},
      {"density.delta_min", "-5", "differential-splitting grid start"},
      {"density.delta_max", "5", "differential-splitting grid end"},
      {"density.delta_step", "0.5", "differential-splitting grid step"},

      {"postselect.calibrated", "true", "recompute the calibrated probe constants from anchors"},
      {"postselect.saturation_s0", "0.5148394912", "operating saturation at the ion"},
      {"postselect.detuning", "2", "probe detuning in linewidths"},
      {"postselect.pulse_length", "1e4", "probe duration in upper-state lifetimes"},
      {"postselect.reflectivity", "0.5", "pickoff reflectivity for ion 1"},
      {"postselect.coupling_efficiency", "0.8946961", "ion-field coupling into the probe mode"},
      {"postselect.excitation_cap", "5e-4", "scattered-photon budget per pulse"},
      {"postselect.prior_bright", "0.6666666666666666", "bright-state prior for ion 1"},
      {"postselect.photon_rate_scale", "0.01244383",
       "mean photons per lifetime per unit saturation"},
      {"postselect.zeeman_probe_delta", "0.05958912",
       "qubit splitting seen by the probe, linewidths"},
      {"postselect.r_points", "200", "rows in the reflectivity sweep output"},

      {"budget.cooling_time_us", "200", "recooling interval, microseconds"},
      {"budget.prep_time_us", "7", "state preparation time, microseconds"},
      {"budget.pi_pulse_time_us", "0.001", "excitation pulse time, microseconds"},
      {"budget.postselect_time_us", "80", "probe and herald processing time, microseconds"},
      {"budget.travel_plus_classical_time_us", "13",
       "photon flight plus matched classical latency, microseconds"},
      {"budget.trials_per_cooling", "1", "attempts between cooling cycles"},
      {"budget.trials_per_cooling_fast", "80",
       "attempts between cooling cycles in the heating-limited mode"},
      {"budget.success_ideal", "0.14814814814814814", "ideal heralding probability per attempt"},
      {"budget.mirror_eta", "0.47", "collection efficiency of the mirror pair"},
      {"budget.focal_intensity_per_ion", "0.78", "thermal wave-packet overlap per ion"},
      {"budget.bs_transmission", "0.39", "herald photon passing both pickoffs"},
      {"budget.extra_loss", "1", "any further multiplicative loss"},
  };
  return schema;
}

void validate_keys(const ConfigMap& cfg) {
  std::string unknown;
  for (const auto& [key, value] : cfg) {
    (void)value;
    bool found = false;
    for (const auto& entry : config_schema())
      if (entry.key == key) {
        found = true;
        break;
      }
    if (!found) unknown += (unknown.empty() ? "" : ", ") + key;
  }
  if (!unknown.empty()) throw std::invalid_argument("unknown config key: " + unknown);
}

ConfigMap resolve_with_defaults(const ConfigMap& cfg) {
  validate_keys(cfg);
  ConfigMap out;
  for (const auto& entry : config_schema()) out[entry.key] = entry.default_value;
  for (const auto& [key, value] : cfg) out[key] = value;
  return out;
}

std::string get_string(const ConfigMap& cfg, const std::string& key) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) throw std::invalid_argument("missing config key: " + key);
  return it->second;
}

double get_double(const ConfigMap& cfg, const std::string& key) {
  const std::string v = get_string(cfg, key);
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw std::invalid_argument("config value for " + key + " is not a number: '" + v + "'");
  return x;
}

int get_int(const ConfigMap& cfg, const std::string& key) {
  const std::string v = get_string(cfg, key);
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw std::invalid_argument("config value for " + key + " is not an integer: '" + v + "'");
  return static_cast<int>(x);
}

bool get_bool(const ConfigMap& cfg, const std::string& key) {
  const std::string v = get_string(cfg, key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config value for " + key + " is not a boolean: '" + v + "'");
}

}  // namespace pmsim
