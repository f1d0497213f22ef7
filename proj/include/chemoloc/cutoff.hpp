#pragma once

#include "chemoloc/grid.hpp"

namespace chemoloc {

enum class CutoffMode { radial, tensor };

// Placement of a C2 cutoff: phi = 1 on the inner region of size rA around
// (x0,y0) intersected with the domain, phi = 0 outside the outer region of
// size rV, with a smooth transition in between. Radial mode uses balls of
// radius rA and rV; tensor mode builds phi from 1-D profiles per coordinate,
// so its regions are the axis-aligned squares of half-width rA and rV (the
// price for an exactly vanishing normal derivative on every rectangle face).
// eta in (0, 1/2) controls the power m = ceil(2/eta) so that phi^eta is
// itself C2 and the fractional derivative bounds hold.
struct CutoffSpec {
  double x0 = 0.0, y0 = 0.0;
  double rA = 0.0, rV = 0.0;
  double eta = 0.0;
  CutoffMode mode = CutoffMode::radial;
};

// Built cutoff with analytic (chain-rule) gradient and Laplacian sampled at
// cell centers. C_phi is the smallest constant verified cell-wise to satisfy
//   |grad phi| <= C_phi * phi^(1-eta),  |lap phi| <= C_phi * phi^(1-2 eta).
struct CutoffField {
  CutoffSpec spec;
  int m = 0;
  double C_phi = 0.0;
  Field phi, grad_x, grad_y, lap;
};

// Pointwise values of chi^power and its chain-rule derivatives, where chi is
// the underlying C2 profile (before raising to the power m). power >= 2 keeps
// the Laplacian bounded as chi -> 0. Used for closed-form checks and for the
// smoothness proxy chi^(m*eta).
struct CutoffPoint {
  double phi = 0.0;
  double gx = 0.0, gy = 0.0;
  double lap = 0.0;
};
CutoffPoint eval_cutoff(const CutoffSpec& spec, double x, double y, double power);

// m = ceil(2/eta), guarded against floating-point ceil overshoot
// (2/(1/6) must give 12, not 13).
int cutoff_power(double eta);

// Validates the parameters against the grid, samples phi = chi^m and its analytic
// derivatives at every cell center, and computes C_phi. Radial mode requires
// the support ball to stay inside the rectangle; tensor mode works anywhere
// (its 1-D factors give a zero normal derivative on every face).
CutoffField build_cutoff(const CutoffSpec& spec, const Grid& grid);

// Recomputes the minimal C_phi from the stored fields. Throws logic_error if
// any cell has phi = 0 but a nonzero stored derivative (a construction bug:
// analytic derivatives must vanish identically outside the support).
double verify_fractional_bounds(const CutoffField& c);

}  // namespace chemoloc
