#include "chemoloc/runner.hpp"

#include <algorithm>
#include <cmath>

namespace chemoloc {

namespace {

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

RunResult run(const ProblemSpec& spec, const StepperConfig& cfg, DiagnosticsEngine& engine,
              const std::vector<double>& diag_times,
              const std::vector<double>& snapshot_times) {
  validate_problem(spec);
  validate_stepper(cfg);
  if (max_value(spec.u0) >= cfg.u_cap)
    throw ConfigError("u_cap must exceed the initial sup norm of u");
  for (double t : diag_times)
    if (!(t > 0.0 && t <= spec.T))
      throw ConfigError("diagnostic times must lie in (0, T]");
  for (double t : snapshot_times)
    if (!(t > 0.0 && t <= spec.T))
      throw ConfigError("snapshot times must lie in (0, T]");

  const std::vector<double> diags = sorted_unique(diag_times);
  const std::vector<double> snaps = sorted_unique(snapshot_times);

  RunResult res;
  State state{spec.u0, spec.v0, 0.0};
  std::size_t di = 0, si = 0;
  double last_dt = 0.0;

  auto process_marks = [&]() {
    const double eps = 0.5 * cfg.dt_min;
    while (di < diags.size() && state.t >= diags[di] - eps) {
      res.records.push_back(engine.record(state, last_dt));
      ++di;
    }
    while (si < snaps.size() && state.t >= snaps[si] - eps) {
      res.snapshots.emplace_back(snaps[si], state);
      ++si;
    }
  };

  for (;;) {
    if (state.t >= spec.T - 0.5 * cfg.dt_min) {
      res.stop_reason = StopReason::t_reached_T;
      break;
    }
    double next_mark = spec.T;
    if (di < diags.size()) next_mark = std::fmin(next_mark, diags[di]);
    if (si < snaps.size()) next_mark = std::fmin(next_mark, snaps[si]);

    const double remaining = next_mark - state.t;
    if (remaining <= cfg.dt_min) {
      // Residual gap narrower than the underflow threshold: snap to the
      // mark; the fields do not change over a sub-dt_min interval we can
      // neither resolve nor reject.
      state.t = next_mark;
      process_marks();
      continue;
    }

    const double dt = std::fmin(compute_stable_dt(state, spec, cfg), remaining);
    StepResult sr = step(state, spec, dt, cfg);
    if (!sr.outcome.accepted) {
      res.stop_reason = StopReason::dt_underflow;
      break;
    }
    engine.accumulate(state, sr.outcome.dt_used);
    state = std::move(sr.state);
    if (sr.outcome.dt_used == dt && dt == remaining) state.t = next_mark;
    last_dt = sr.outcome.dt_used;
    ++res.steps;
    if (sr.outcome.dt_used < dt) ++res.halved_steps;

    process_marks();

    if (max_value(state.u) >= cfg.u_cap) {
      res.stop_reason = StopReason::u_exceeded_cap;
      break;
    }
  }

  res.final_state = std::move(state);
  res.t_stop = res.final_state.t;
  return res;
}

}  // namespace chemoloc
