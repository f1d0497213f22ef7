#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "chemoloc/cutoff.hpp"
#include "chemoloc/grid.hpp"

namespace chemoloc {

struct ProbeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Discrete Neumann heat problem w_t = lap(w) - w + f on (0, T], w(0) = w0,
// advanced by explicit Euler. The forcing is given per time slab:
// f[n] acts on [n dt, (n+1) dt).
struct HeatSolveSpec {
  Grid grid;
  double dt = 0.0;
  int steps = 0;  // N; T = N dt
  std::vector<Field> forcing;  // N slabs
  Field w0;                    // empty means identically zero
};

// Trajectory slabs carry (w^n, (w^{n+1}-w^n)/dt, lap w^n) for n = 0..N-1,
// so the discrete identity w_t = lap w - w + f holds exactly slab-wise.
struct HeatTrajectory {
  Grid grid;
  double dt = 0.0;
  std::vector<Field> w;  // N+1 states
  std::vector<Field> f;  // N forcing slabs
  int steps() const { return static_cast<int>(f.size()); }
  Field wt(int n) const;
};

// Explicit Euler under the diffusion CFL including the -w term:
// dt (2/hx^2 + 2/hy^2 + 1) <= 1. Violation is a configuration error.
HeatTrajectory solve_heat(const HeatSolveSpec& spec);

// Mixed-norm ratio
//   ( sum_n dt [ (int |w|^q)^{p/q} + (int |w_t|^q)^{p/q} + (int |lap w|^q)^{p/q} ] )^{1/p}
//   / ( sum_n dt (int |f|^q)^{p/q} )^{1/p}
// over the trajectory slabs. Throws ProbeError when f is identically zero.
double regularity_ratio(const HeatTrajectory& traj, double p, double q);

struct ProbeResult {
  double p = 0.0, q = 0.0;
  double K_hat = 0.0;  // lower-bound estimate of the discrete constant
  long iterations = 0;
  std::string descriptor;  // how the best forcing was found
};

struct ProbeConfig {
  Grid grid;
  double dt = 0.0;
  int steps = 0;
  std::uint64_t seed = 1;
  int starts = 4;       // multi-start count for general (p, q)
  long budget = 2000;   // total ratio evaluations across starts
  double rtol = 1e-8;   // power-iteration Rayleigh stopping tolerance
  long max_iters = 20000;
};

// p = q = 2: deterministic power iteration on the map f -> (w, w_t, lap w)
// between Euclidean space-time norms (the uniform dt h^2 quadrature weights
// cancel in the ratio), using the analytically derived adjoint. The Rayleigh
// estimate is nondecreasing, so K_hat is an exact-operator-norm limit.
// General (p, q): multi-start forcings (one constant, the rest seeded noise)
// improved by randomized coordinate ascent; the best ratio is a certified
// lower bound on the discrete constant.
ProbeResult estimate_K(double p, double q, const ProbeConfig& cfg);

// Forward map on N forcing slabs with w0 = 0; outputs the three slab blocks.
void apply_forward(const Grid& g, double dt, const std::vector<Field>& f,
                   std::vector<Field>& w_block, std::vector<Field>& wt_block,
                   std::vector<Field>& lap_block);

// Adjoint of apply_forward with respect to the unweighted Euclidean inner
// products; used by the power iteration and checkable against the forward
// map by the inner-product identity.
std::vector<Field> apply_adjoint(const Grid& g, double dt,
                                 const std::vector<Field>& g1,
                                 const std::vector<Field>& g2,
                                 const std::vector<Field>& g3);

// Exact largest singular value of the densely assembled forward map,
// computed with an independent linear-algebra library. Intended as the
// cross-check oracle for estimate_K at p = q = 2 on small discretizations.
double svd_operator_norm(const Grid& g, double dt, int steps);

// Constant entering the weighted second-derivative bound:
// (8^{p-1} K^p + 6^{p-1}) 2^p with K = K(p,p).
double weighted_bound_constant(double p, double K_pp);

struct InterpolationReport {
  double p_theta = 0.0, q_theta = 0.0;
  double k_theta = 0.0;  // estimate at the interpolated exponents
  double k_bound = 0.0;  // k0^{1-theta} * k1^theta
  bool advisory_pass = false;
  bool hard = false;       // endpoint case theta in {0,1}: equality required
  bool hard_pass = false;  // only meaningful when hard
  double tol = 0.0;
};

// Checks K_hat(p_theta, q_theta) <= K_hat(p0,q0)^{1-theta} K_hat(p1,q1)^theta
// against supplied estimates. 1/p_theta = (1-theta)/p0 + theta/p1 and the
// same for q; a missing estimate at any required exponent pair is a
// configuration error. Advisory except at theta in {0,1}, where the two
// sides must agree to 1e-6 relative.
InterpolationReport interpolation_check(double p0, double q0, double p1, double q1,
                                        double theta,
                                        const std::vector<ProbeResult>& estimates,
                                        double tol_interp = 0.10);

struct WeightedBoundResult {
  bool pass = false;
  double lhs = 0.0, rhs = 0.0;
  double constant = 0.0;  // weighted_bound_constant(p, K)
  std::string forcing_descriptor;
};

// Evaluates both sides of the weighted second-derivative bound at p = 2:
//   sum_n dt int |phi lap w|^2
//     <= C(2, K) [ ||phi w0||_{W^{2,2}}^2
//                  + sum_n dt int ( |grad phi . grad w|^2 + |w lap phi|^2
//                                   + |phi f|^2 ) ]
// with K = K(2,2) supplied by the caller (exact discrete constant from the
// power-iteration/SVD oracle at the same discretization). Asserts
// lhs <= rhs (1 + 1e-6).
WeightedBoundResult weighted_bound_check(const CutoffField& cutoff,
                                         const HeatTrajectory& traj, double K22,
                                         const std::string& forcing_descriptor = "",
                                         double p = 2.0);

}  // namespace chemoloc
