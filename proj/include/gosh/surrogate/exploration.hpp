// Feedback controller for the exploration factor k.

#pragma once

namespace gosh::surrogate {

struct ExplorationState {
  double k = 5.0;
  double xi_ma = 0.0;   // exponential moving average of epistemic uncertainty
  double psi = 0.9;     // exploration momentum
  double delta = 0.1;   // step size
  // The printed decrease branch overlaps the increase branch's complement;
  // the default uses (1-delta)*xi_ma so a dead zone exists. Literal mode
  // keeps (1+delta)*xi_ma for fidelity runs.
  bool literal_decrease_rule = false;
};

// Updates xi_ma first, then rescales k: up by (1+delta) when xi_t overshoots
// (1+delta)*xi_ma, down by (1-delta) when it undershoots the decrease
// threshold, unchanged in between.
ExplorationState update_exploration(ExplorationState state, double xi_t);

}  // namespace gosh::surrogate
