#pragma once

#include <utility>
#include <vector>

#include "chemoloc/diagnostics.hpp"
#include "chemoloc/solver.hpp"

namespace chemoloc {

struct RunResult {
  State final_state;
  StopReason stop_reason = StopReason::none;
  double t_stop = 0.0;
  std::vector<DiagnosticsRecord> records;
  std::vector<std::pair<double, State>> snapshots;
  long steps = 0;         // accepted steps
  long halved_steps = 0;  // accepted steps that needed at least one halving
};

// Advances the state with adaptive explicit steps, landing exactly on every
// diagnostic and snapshot time (dt shortened to hit the mark; a residual gap
// below dt_min is snapped without stepping so landing can never trigger the
// underflow stop). Emits a DiagnosticsRecord at each diagnostic time. Halts
// at T, at the u_cap sup-norm trigger, or on dt underflow; diagnostics
// collected before an early stop are returned.
RunResult run(const ProblemSpec& spec, const StepperConfig& cfg, DiagnosticsEngine& engine,
              const std::vector<double>& diag_times,
              const std::vector<double>& snapshot_times = {});

}  // namespace chemoloc
