#include "chemoloc/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "chemoloc/field_io.hpp"

namespace chemoloc {

namespace {

std::string num_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double weighted_power_integral(const Field& w, const Field& f, double p) {
  double s = 0.0;
  for (std::size_t c = 0; c < f.data.size(); ++c)
    s += w.data[c] * std::pow(std::fabs(f.data[c]), p);
  return s * f.grid.hx * f.grid.hy;
}

FunctionalBudget budget_with_lap(const State& s, const ProblemSpec& spec,
                              const FunctionalSpec& f, const CutoffField& phi,
                              const Field& lap_v) {
  FunctionalBudget out;
  const Grid& g = s.u.grid;
  double diss = 0.0;
  for (std::size_t c = 0; c < s.u.data.size(); ++c) {
    const double u = s.u.data[c];
    diss += (spec.mu.data[c] - 4.0 * f.eps) * phi.phi.data[c] * std::pow(u, f.p + 1.0);
  }
  out.dissipation = diss * g.hx * g.hy;
  out.regularity = (f.p - 1.0) / (f.p * std::pow(f.eps, f.p)) *
                   weighted_power_integral(phi.phi, lap_v, f.p + 1.0);
  double kappa_inf = 0.0;
  for (double k : spec.kappa.data) kappa_inf = std::fmax(kappa_inf, std::fabs(k));
  out.growth = kappa_inf * weighted_power_integral(phi.phi, s.u, f.p);
  return out;
}

}  // namespace

double admissibility_margin(double mu_x0, double eps, double p, double kappa0, double T,
                            double bound_const_p1) {
  return mu_x0 / 2.0 - 4.0 * eps -
         (p - 1.0) * std::exp(p * kappa0 * T) * bound_const_p1 / (p * std::pow(eps, p));
}

FunctionalBudget functional_budget(const State& s, const ProblemSpec& spec,
                           const FunctionalSpec& f, const CutoffField& phi) {
  return budget_with_lap(s, spec, f, phi, laplacian(s.v));
}

DiagnosticsEngine::DiagnosticsEngine(const ProblemSpec& spec, DiagnosticsConfig cfg)
    : spec_(&spec), cfg_(std::move(cfg)) {
  u0_l1_ = integrate(spec.u0);  // u0 >= 0, so this is the L1 norm
  kappa_inf_ = 0.0;
  for (double k : spec.kappa.data) kappa_inf_ = std::fmax(kappa_inf_, std::fabs(k));

  for (const auto& f : cfg_.functionals) {
    ResolvedFunctional rf;
    rf.fspec = f;
    rf.cut = build_cutoff(f.cutoff, spec.grid);
    funcs_.push_back(std::move(rf));
  }

  for (double s : cfg_.v_norms) names_.push_back("v_L" + num_label(s));
  for (double q : cfg_.gradv_norms) names_.push_back("gradv_L" + num_label(q));
  for (std::size_t b = 0; b < cfg_.balls.size(); ++b) {
    const std::string base = "ball" + std::to_string(b + 1);
    for (double a : cfg_.balls[b].grad_exps)
      names_.push_back(base + "_gradv_L" + num_label(a));
    for (double r : cfg_.balls[b].lap_exps)
      names_.push_back(base + "_lapv_acc" + num_label(r));
    ball_lap_acc_.push_back(std::vector<double>(cfg_.balls[b].lap_exps.size(), 0.0));
  }
  for (std::size_t k = 0; k < funcs_.size(); ++k) {
    const std::string base = "F" + std::to_string(k + 1);
    names_.push_back(base + "_p");
    names_.push_back(base + "_dissipation");
    names_.push_back(base + "_regularity");
    names_.push_back(base + "_growth");
  }
}

void DiagnosticsEngine::accumulate(const State& before, double dt) {
  double a = 0.0;
  for (std::size_t c = 0; c < before.u.data.size(); ++c) {
    const double u = before.u.data[c];
    a += spec_->mu.data[c] * u * u;
  }
  A_ += dt * a * spec_->grid.hx * spec_->grid.hy;

  bool past_tau = before.t >= spec_->tau - 1e-15;
  if (past_tau && !cfg_.balls.empty()) {
    Field lap_v = laplacian(before.v);
    for (std::size_t b = 0; b < cfg_.balls.size(); ++b) {
      const BallSpec& ball = cfg_.balls[b];
      for (std::size_t ri = 0; ri < ball.lap_exps.size(); ++ri) {
        MaskedIntegral mi =
            masked_integrate(lap_v, ball.cx, ball.cy, ball.radius, ball.lap_exps[ri]);
        ball_lap_acc_[b][ri] += dt * mi.value;
      }
    }
  }
}

DiagnosticsRecord DiagnosticsEngine::record(const State& s, double dt_last) {
  DiagnosticsRecord r;
  r.t = s.t;
  r.dt = dt_last;
  r.mass = integrate(s.u);
  ArgMax am = argmax(s.u);
  r.sup_u = am.value;
  r.argmax_x = am.x;
  r.argmax_y = am.y;
  r.A = A_;
  r.z_bound = u0_l1_ * std::exp(kappa_inf_ * s.t);

  Field gx, gy;
  gradient_centers(s.v, gx, gy);
  Field gmag = magnitude(gx, gy);
  Field lap_v = laplacian(s.v);

  for (double sv : cfg_.v_norms) r.extra.push_back(lp_norm(s.v, sv));
  for (double q : cfg_.gradv_norms) r.extra.push_back(lp_norm(gmag, q));
  for (std::size_t b = 0; b < cfg_.balls.size(); ++b) {
    const BallSpec& ball = cfg_.balls[b];
    for (double a : ball.grad_exps) {
      MaskedIntegral mi = masked_integrate(gmag, ball.cx, ball.cy, ball.radius, a);
      r.extra.push_back(std::pow(mi.value, 1.0 / a));
    }
    for (std::size_t ri = 0; ri < ball.lap_exps.size(); ++ri)
      r.extra.push_back(ball_lap_acc_[b][ri]);
  }
  for (const auto& rf : funcs_) {
    r.extra.push_back(weighted_power_integral(rf.cut.phi, s.u, rf.fspec.p));
    FunctionalBudget terms = budget_with_lap(s, *spec_, rf.fspec, rf.cut, lap_v);
    r.extra.push_back(terms.dissipation);
    r.extra.push_back(terms.regularity);
    r.extra.push_back(terms.growth);
  }
  return r;
}

MassBoundCheck check_mass_bound(const std::vector<DiagnosticsRecord>& records,
                                double tol_quad) {
  if (records.empty()) throw ConfigError("check_mass_bound requires at least one record");
  MassBoundCheck out;
  out.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& r : records) {
    const double lhs = r.mass + r.A;
    const double rhs = r.z_bound * (1.0 + tol_quad);
    const double margin = rhs > 0.0 ? (rhs - lhs) / rhs : -std::numeric_limits<double>::infinity();
    if (margin < out.worst_margin) {
      out.worst_margin = margin;
      out.worst_t = r.t;
      out.lhs = lhs;
      out.rhs = rhs;
    }
  }
  out.pass = out.worst_margin >= 0.0;
  return out;
}

BlowUpReport blow_up_report(const State& final_state, StopReason reason,
                            const ProblemSpec& spec, double theta_B, double mu_tol) {
  BlowUpReport rep;
  rep.triggered =
      reason == StopReason::u_exceeded_cap || reason == StopReason::dt_underflow;
  rep.t_stop = final_state.t;
  rep.theta_B = theta_B;
  rep.mu_tol = mu_tol;
  ArgMax am = argmax(final_state.u);
  rep.sup_u = am.value;
  rep.argmax_x = am.x;
  rep.argmax_y = am.y;

  const Grid& g = spec.grid;
  std::vector<std::pair<double, double>> zset;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (spec.mu.at(i, j) <= mu_tol) zset.emplace_back(g.x(i), g.y(j));
  rep.zero_cells = static_cast<long>(zset.size());

  if (!rep.triggered) return rep;

  const double threshold = theta_B * rep.sup_u;
  double worst = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (final_state.u.at(i, j) < threshold) continue;
      ++rep.blow_cells;
      if (zset.empty()) continue;
      double best = std::numeric_limits<double>::infinity();
      const double bx = g.x(i), by = g.y(j);
      for (const auto& [zx, zy] : zset) {
        const double d2 = (bx - zx) * (bx - zx) + (by - zy) * (by - zy);
        if (d2 < best) best = d2;
      }
      best = std::sqrt(best);
      if (best > worst) worst = best;
    }
  }
  rep.distance = zset.empty() ? std::numeric_limits<double>::infinity() : worst;
  return rep;
}

void write_diagnostics_csv(const std::string& path,
                           const std::vector<DiagnosticsRecord>& records,
                           const std::vector<std::string>& extra_names,
                           const std::vector<std::string>& comment_lines) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open '" + path + "' for writing");
  for (const auto& line : comment_lines) os << "# " << line << '\n';
  os << "# extra columns:";
  for (const auto& n : extra_names) os << ' ' << n;
  os << '\n';
  os << "t,dt,mass,sup_u,argmax_x,argmax_y,A,z_bound";
  for (const auto& n : extra_names) os << ',' << n;
  os << '\n';
  for (const auto& r : records) {
    os << format_double(r.t) << ',' << format_double(r.dt) << ','
       << format_double(r.mass) << ',' << format_double(r.sup_u) << ','
       << format_double(r.argmax_x) << ',' << format_double(r.argmax_y) << ','
       << format_double(r.A) << ',' << format_double(r.z_bound);
    for (double e : r.extra) os << ',' << format_double(e);
    os << '\n';
  }
  if (!os) throw ConfigError("write to '" + path + "' failed");
}

}  // namespace chemoloc
