#pragma once

#include <string>
#include <vector>

namespace pmsim {

// Experiment timing and multiplicative loss bookkeeping; durations in
// microseconds, rates in hertz.
struct BudgetLedger {
  double cooling_time = 200.0;
  double prep_time = 7.0;               // hyperfine init plus microwave flip
  double pi_pulse_time = 0.001;
  double postselect_time = 80.0;
  double travel_plus_classical_time = 13.0;  // photon flight plus matched classical latency
  int trials_per_cooling = 1;

  struct Factors {
    double success_ideal = 4.0 / 27.0;
    double mirror_eta = 0.47;
    double focal_intensity_per_ion = 0.78;  // thermal wave-packet overlap, applied per ion
    double bs_transmission = 0.39;          // both pickoffs passed, (1-R1)(1-R2)
    double extra_loss = 1.0;
  } factors;

  double attempt_time() const;  // prep + pi pulse + travel + postselect
};

double repetition_rate(const BudgetLedger& ledger);

double entanglement_rate(const BudgetLedger& ledger);

// Line-oriented report of the ledger, its rates, and both readings of the
// focusing factor (thermal spread per ion squared vs none).
std::vector<std::string> budget_report(const BudgetLedger& ledger);

}  // namespace pmsim
