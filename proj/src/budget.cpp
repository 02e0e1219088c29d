#include "pmsim/budget.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace pmsim {

namespace {

void validate(const BudgetLedger& l) {
  const double durations[] = {l.cooling_time, l.prep_time, l.pi_pulse_time, l.postselect_time,
                              l.travel_plus_classical_time};
  for (double d : durations)
    if (!(d >= 0.0) || !std::isfinite(d))
      throw std::invalid_argument("budget: durations must be finite and nonnegative");
  if (l.trials_per_cooling < 1)
    throw std::invalid_argument("budget: trials_per_cooling must be at least 1");
  const double factors[] = {l.factors.success_ideal, l.factors.mirror_eta,
                            l.factors.focal_intensity_per_ion, l.factors.bs_transmission,
                            l.factors.extra_loss};
  for (double f : factors)
    if (!(f >= 0.0) || !(f <= 1.0))
      throw std::invalid_argument("budget: factors must lie in [0,1]");
}

double factor_product(const BudgetLedger::Factors& f, double focal) {
  return f.success_ideal * f.mirror_eta * focal * focal * f.bs_transmission * f.extra_loss;
}

std::string line(const char* key, double value) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s = %.6g", key, value);
  return buf;
}

}  // namespace

double BudgetLedger::attempt_time() const {
  return prep_time + pi_pulse_time + travel_plus_classical_time + postselect_time;
}

double repetition_rate(const BudgetLedger& ledger) {
  validate(ledger);
  const double attempt = ledger.attempt_time();
  if (!(attempt > 0.0)) throw std::invalid_argument("budget: attempt time must be positive");
  const double n = ledger.trials_per_cooling;
  const double cycle_us = n * attempt + ledger.cooling_time;
  return 1e6 * n / cycle_us;
}

double entanglement_rate(const BudgetLedger& ledger) {
  return repetition_rate(ledger) *
         factor_product(ledger.factors, ledger.factors.focal_intensity_per_ion);
}

std::vector<std::string> budget_report(const BudgetLedger& ledger) {
  validate(ledger);
  std::vector<std::string> out;
  out.push_back(line("cooling_time_us", ledger.cooling_time));
  out.push_back(line("prep_time_us", ledger.prep_time));
  out.push_back(line("pi_pulse_time_us", ledger.pi_pulse_time));
  out.push_back(line("travel_plus_classical_time_us", ledger.travel_plus_classical_time));
  out.push_back(line("postselect_time_us", ledger.postselect_time));
  out.push_back(line("attempt_time_us", ledger.attempt_time()));
  out.push_back(line("trials_per_cooling", ledger.trials_per_cooling));
  out.push_back(line("repetition_rate_hz", repetition_rate(ledger)));
  out.push_back(line("success_ideal", ledger.factors.success_ideal));
  out.push_back(line("mirror_eta", ledger.factors.mirror_eta));
  out.push_back(line("focal_intensity_per_ion", ledger.factors.focal_intensity_per_ion));
  out.push_back(line("bs_transmission", ledger.factors.bs_transmission));
  out.push_back(line("extra_loss", ledger.factors.extra_loss));
  out.push_back(line("entanglement_rate_hz", entanglement_rate(ledger)));
  // the focusing factor is an interpretation: thermal wave-packet overlap per
  // ion (squared in the product) or unity under perfect focusing
  out.push_back(line("entanglement_rate_perfect_focus_hz",
                     repetition_rate(ledger) * factor_product(ledger.factors, 1.0)));
  return out;
}

}  // namespace pmsim
