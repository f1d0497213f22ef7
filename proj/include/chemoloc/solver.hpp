#pragma once

#include <string>

#include "chemoloc/grid.hpp"

namespace chemoloc {

// Coupled system on a rectangle with no-flux boundaries:
//   u_t = lap(u) - div(u grad v) + kappa(x) u - mu(x) u^2
//   v_t = lap(v) - v + u
// kappa and mu are fixed coefficient fields; mu >= 0 and the initial data
// are nonnegative.
struct ProblemSpec {
  Grid grid;
  Field kappa, mu;
  Field u0, v0;
  double T = 0.0;    // final time
  double tau = 0.0;  // diagnostic warm-up time, 0 < tau < T
};

void validate_problem(const ProblemSpec& spec);

struct State {
  Field u, v;
  double t = 0.0;
};

// Step-size control and stopping thresholds. A run halts when u reaches
// u_cap in sup norm or when positivity rejection drives dt below dt_min;
// both are treated as numerical blow-up evidence and reported verbatim.
struct StepperConfig {
  double cfl_safety = 0.9;  // sigma in (0, 1]
  double dt_max = 1e-2;
  double dt_min = 1e-12;
  double u_cap = 1e6;
};

void validate_stepper(const StepperConfig& cfg);

enum class StopReason { none, t_reached_T, u_exceeded_cap, dt_underflow };

std::string to_string(StopReason r);

struct StepOutcome {
  bool accepted = false;
  double dt_used = 0.0;
  StopReason stop_reason = StopReason::none;
};

struct StepResult {
  State state;  // the accepted state, or the unchanged input on rejection
  StepOutcome outcome;
};

// sigma * min(diffusion, x-taxis, y-taxis, reaction) clamped to
// [dt_min, dt_max]:
//   diffusion  1 / (2/hx^2 + 2/hy^2)
//   taxis      hx / max|a_x|, hy / max|a_y| over interior faces,
//              a = central difference of v across the face
//   reaction   1 / (max|kappa| + max(mu) * max(u) + 1)
// Clamping is silent; an unworkable dt surfaces later as dt underflow.
double compute_stable_dt(const State& s, const ProblemSpec& spec, const StepperConfig& cfg);

// One explicit Euler step in flux form. The taxis flux at a face is
// u_donor * a with the donor cell taken upwind of the face velocity;
// boundary faces carry zero flux. If the candidate state has any negative
// cell, the step is retried with dt/2 (tendencies are dt-independent and
// reused); halving below dt_min rejects the step with stop_reason
// dt_underflow.
StepResult step(const State& s, const ProblemSpec& spec, double dt, const StepperConfig& cfg);

}  // namespace chemoloc
