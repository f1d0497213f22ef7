#pragma once

#include <string>
#include <vector>

#include "chemoloc/cutoff.hpp"
#include "chemoloc/grid.hpp"
#include "chemoloc/solver.hpp"

namespace chemoloc {

// Weighted functional F_p = integral of phi * u^p with an admissibility
// budget: eps must stay below mu(x0)/8 and p in (1,2); the margin
//   mu(x0)/2 - 4 eps - (p-1) e^{p kappa0 T} C(p+1) / (p eps^p)
// is evaluated at load time, with C(p+1) the weighted-bound constant built
// from a probe estimate of K(p+1, p+1), and is advisory (negative margin
// warns, never refuses).
struct FunctionalSpec {
  double p = 1.5;
  double eps = 0.0;
  CutoffSpec cutoff;
  double mu_x0 = 0.0;          // mu evaluated at the cutoff center
  double bound_const_p1 = 0.0; // C(p+1) estimate used for the margin
  double margin = 0.0;
};

double admissibility_margin(double mu_x0, double eps, double p, double kappa0, double T,
                            double bound_const_p1);

// Ball monitor: instantaneous (integral of |grad v|^a)^(1/a) for each a in
// grad_exps, and time-accumulated integral over [tau, t] of
// integral_ball |lap v|^r for each r in lap_exps.
struct BallSpec {
  double cx = 0.0, cy = 0.0, radius = 0.0;
  std::vector<double> grad_exps;
  std::vector<double> lap_exps;
};

struct DiagnosticsConfig {
  std::vector<double> v_norms;      // s: ||v||_{L^s}
  std::vector<double> gradv_norms;  // q: ||grad v||_{L^q} over the whole domain
  std::vector<BallSpec> balls;
  std::vector<FunctionalSpec> functionals;
  double tol_quad = 0.02;
  double theta_B = 0.5;
  double mu_tol = 1e-8;
};

struct DiagnosticsRecord {
  double t = 0.0, dt = 0.0;
  double mass = 0.0;
  double sup_u = 0.0, argmax_x = 0.0, argmax_y = 0.0;
  double A = 0.0;        // integral over [0,t] of integral mu u^2
  double z_bound = 0.0;  // ||u0||_1 e^{kappa0 t}
  std::vector<double> extra;  // aligned with DiagnosticsEngine::extra_names()
};

// The three computable integrals in the energy budget of F_p: the damping
// term that must eventually dominate, the chemotaxis term controlled through
// maximal regularity of v, and the linear growth term. Monitored per record;
// no inequality between them is asserted.
struct FunctionalBudget {
  double dissipation = 0.0;  // integral (mu - 4 eps) phi u^{p+1}
  double regularity = 0.0;   // (p-1)/(p eps^p) * integral phi |lap v|^{p+1}
  double growth = 0.0;       // kappa0 * integral phi u^p
};

FunctionalBudget functional_budget(const State& s, const ProblemSpec& spec,
                                   const FunctionalSpec& f, const CutoffField& phi);

struct ResolvedFunctional {
  FunctionalSpec fspec;
  CutoffField cut;
};

// Owns the time accumulators (A and the per-ball lap integrals) and turns an
// accepted state into a DiagnosticsRecord. Accumulation is left-endpoint in
// time: the caller feeds the pre-step state and the accepted dt.
class DiagnosticsEngine {
 public:
  DiagnosticsEngine(const ProblemSpec& spec, DiagnosticsConfig cfg);

  void accumulate(const State& before, double dt);
  DiagnosticsRecord record(const State& s, double dt_last);

  const std::vector<std::string>& extra_names() const { return names_; }
  const std::vector<ResolvedFunctional>& functionals() const { return funcs_; }
  const DiagnosticsConfig& config() const { return cfg_; }
  double kappa_inf() const { return kappa_inf_; }
  double u0_l1() const { return u0_l1_; }
  double A() const { return A_; }

 private:
  const ProblemSpec* spec_;
  DiagnosticsConfig cfg_;
  std::vector<ResolvedFunctional> funcs_;
  std::vector<std::string> names_;
  double A_ = 0.0;
  double u0_l1_ = 0.0;
  double kappa_inf_ = 0.0;
  std::vector<std::vector<double>> ball_lap_acc_;
};

struct MassBoundCheck {
  bool pass = true;
  double worst_margin = 0.0;  // min over records of (rhs - lhs)/rhs
  double worst_t = 0.0;
  double lhs = 0.0, rhs = 0.0;  // sides at the worst record
};

// Checks mass + A <= z_bound (1 + tol_quad) at every record.
MassBoundCheck check_mass_bound(const std::vector<DiagnosticsRecord>& records,
                                double tol_quad);

struct BlowUpReport {
  bool triggered = false;
  double t_stop = 0.0;
  double sup_u = 0.0;
  double argmax_x = 0.0, argmax_y = 0.0;
  long blow_cells = 0;  // cells with u >= theta_B * sup_u at t_stop
  long zero_cells = 0;  // cells with mu <= mu_tol
  // max over blow-up cells of the min center-to-center distance to the
  // mu-zero set; 0 when not triggered, +inf when the mu-zero set is empty.
  double distance = 0.0;
  double theta_B = 0.5, mu_tol = 1e-8;  // thresholds echoed verbatim
};

BlowUpReport blow_up_report(const State& final_state, StopReason reason,
                            const ProblemSpec& spec, double theta_B, double mu_tol);

// diagnostics.csv: optional '#' comment lines (effective config echo), one
// '#' line naming the extra columns, the fixed header row, then one row per
// record with 17-significant-digit values.
void write_diagnostics_csv(const std::string& path,
                           const std::vector<DiagnosticsRecord>& records,
                           const std::vector<std::string>& extra_names,
                           const std::vector<std::string>& comment_lines);

}  // namespace chemoloc
