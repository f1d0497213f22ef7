#include "chemoloc/solver.hpp"

#include <cmath>

namespace chemoloc {

void validate_problem(const ProblemSpec& spec) {
  if (!(spec.kappa.grid == spec.grid) || !(spec.mu.grid == spec.grid) ||
      !(spec.u0.grid == spec.grid) || !(spec.v0.grid == spec.grid))
    throw ConfigError("problem fields must share the problem grid");
  if (min_value(spec.mu) < 0.0)
    throw ConfigError("mu must be nonnegative everywhere");
  if (min_value(spec.u0) < 0.0 || min_value(spec.v0) < 0.0)
    throw ConfigError("initial data must be nonnegative");
  if (!(spec.T > 0.0)) throw ConfigError("final time T must be positive");
  if (!(spec.tau > 0.0 && spec.tau < spec.T))
    throw ConfigError("warm-up time tau must lie in (0, T)");
}

void validate_stepper(const StepperConfig& cfg) {
  if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0))
    throw ConfigError("cfl_safety must lie in (0, 1]");
  if (!(cfg.dt_min > 0.0 && cfg.dt_min < cfg.dt_max))
    throw ConfigError("step sizes must satisfy 0 < dt_min < dt_max");
  if (!(cfg.u_cap > 0.0)) throw ConfigError("u_cap must be positive");
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::none: return "none";
    case StopReason::t_reached_T: return "t_reached_T";
    case StopReason::u_exceeded_cap: return "u_exceeded_cap";
    case StopReason::dt_underflow: return "dt_underflow";
  }
  return "none";
}

namespace {

// Largest face-velocity magnitudes |a_x|, |a_y| over interior faces.
void max_face_speeds(const Field& v, double& ax_max, double& ay_max) {
  const Grid& g = v.grid;
  ax_max = 0.0;
  ay_max = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) {
      const double a = std::fabs((v.at(i, j) - v.at(i - 1, j)) / g.hx);
      if (a > ax_max) ax_max = a;
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double a = std::fabs((v.at(i, j) - v.at(i, j - 1)) / g.hy);
      if (a > ay_max) ay_max = a;
    }
}

// Explicit tendencies for both equations. Taxis is assembled from shared
// per-face fluxes so the divergence telescopes and total u-mass is conserved
// to rounding when kappa = mu = 0.
void tendencies(const State& s, const ProblemSpec& spec, Field& Ru, Field& Rv) {
  const Grid& g = s.u.grid;
  Field lap_u = laplacian(s.u);
  Field lap_v = laplacian(s.v);

  // Interior face fluxes F = u_donor * a; boundary faces carry zero flux.
  std::vector<double> fx(static_cast<std::size_t>(g.nx - 1) * g.ny, 0.0);
  std::vector<double> fy(static_cast<std::size_t>(g.nx) * (g.ny - 1), 0.0);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 1; i < g.nx; ++i) {
      const double a = (s.v.at(i, j) - s.v.at(i - 1, j)) / g.hx;
      const double donor = a > 0.0 ? s.u.at(i - 1, j) : s.u.at(i, j);
      fx[static_cast<std::size_t>(j) * (g.nx - 1) + (i - 1)] = donor * a;
    }
  }
  for (int j = 1; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double a = (s.v.at(i, j) - s.v.at(i, j - 1)) / g.hy;
      const double donor = a > 0.0 ? s.u.at(i, j - 1) : s.u.at(i, j);
      fy[static_cast<std::size_t>(j - 1) * g.nx + i] = donor * a;
    }
  }

  Ru = Field(g);
  Rv = Field(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double fe = i < g.nx - 1 ? fx[static_cast<std::size_t>(j) * (g.nx - 1) + i] : 0.0;
      const double fw = i > 0 ? fx[static_cast<std::size_t>(j) * (g.nx - 1) + (i - 1)] : 0.0;
      const double fn = j < g.ny - 1 ? fy[static_cast<std::size_t>(j) * g.nx + i] : 0.0;
      const double fs = j > 0 ? fy[static_cast<std::size_t>(j - 1) * g.nx + i] : 0.0;
      const double div_f = (fe - fw) / g.hx + (fn - fs) / g.hy;
      const double u = s.u.at(i, j);
      Ru.at(i, j) = lap_u.at(i, j) - div_f +
                    spec.kappa.at(i, j) * u - spec.mu.at(i, j) * u * u;
      Rv.at(i, j) = lap_v.at(i, j) - s.v.at(i, j) + u;
    }
  }
}

}  // namespace

double compute_stable_dt(const State& s, const ProblemSpec& spec, const StepperConfig& cfg) {
  const Grid& g = s.u.grid;
  double limit = 1.0 / (2.0 / (g.hx * g.hx) + 2.0 / (g.hy * g.hy));
  double ax, ay;
  max_face_speeds(s.v, ax, ay);
  if (ax > 0.0) limit = std::fmin(limit, g.hx / ax);
  if (ay > 0.0) limit = std::fmin(limit, g.hy / ay);
  double kappa_inf = 0.0;
  for (double k : spec.kappa.data) kappa_inf = std::fmax(kappa_inf, std::fabs(k));
  const double react = max_value(spec.mu) * max_value(s.u);
  limit = std::fmin(limit, 1.0 / (kappa_inf + react + 1.0));
  double dt = cfg.cfl_safety * limit;
  if (dt > cfg.dt_max) dt = cfg.dt_max;
  if (dt < cfg.dt_min) dt = cfg.dt_min;
  return dt;
}

StepResult step(const State& s, const ProblemSpec& spec, double dt, const StepperConfig& cfg) {
  Field Ru, Rv;
  tendencies(s, spec, Ru, Rv);

  const std::size_t n = s.u.data.size();
  Field u1(s.u.grid), v1(s.u.grid);
  for (double trial = dt;; trial *= 0.5) {
    bool ok = true;
    for (std::size_t c = 0; c < n; ++c) {
      u1.data[c] = s.u.data[c] + trial * Ru.data[c];
      v1.data[c] = s.v.data[c] + trial * Rv.data[c];
      if (u1.data[c] < 0.0 || v1.data[c] < 0.0) {
        ok = false;
        break;
      }
    }
    if (ok) {
      StepResult r;
      r.state.u = std::move(u1);
      r.state.v = std::move(v1);
      r.state.t = s.t + trial;
      r.outcome = {true, trial, StopReason::none};
      return r;
    }
    if (trial * 0.5 < cfg.dt_min) {
      StepResult r;
      r.state = s;
      r.outcome = {false, trial, StopReason::dt_underflow};
      return r;
    }
  }
}

}  // namespace chemoloc
