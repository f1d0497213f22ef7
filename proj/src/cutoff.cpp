#include "chemoloc/cutoff.hpp"

#include <cmath>
#include <stdexcept>

namespace chemoloc {

namespace {

// Descending quintic-smoothstep profile: 1 for r <= rA, 0 for r >= rV,
// 1 - (6 s^5 - 15 s^4 + 10 s^3) on the transition. First and second
// derivatives vanish at both ends, so the profile is C2 on [0, inf).
struct Profile {
  double rA, rV;

  void eval(double r, double& c, double& dc, double& ddc) const {
    if (r <= rA) {
      c = 1.0;
      dc = 0.0;
      ddc = 0.0;
      return;
    }
    if (r >= rV) {
      c = 0.0;
      dc = 0.0;
      ddc = 0.0;
      return;
    }
    const double w = rV - rA;
    const double s = (r - rA) / w;
    const double smoother = s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
    const double d1 = 30.0 * s * s * (s - 1.0) * (s - 1.0);
    const double d2 = 60.0 * s * (s - 1.0) * (2.0 * s - 1.0);
    c = 1.0 - smoother;
    dc = -d1 / w;
    ddc = -d2 / (w * w);
  }
};

void validate_spec(const CutoffSpec& s) {
  if (!(s.rA > 0.0) || !(s.rA < s.rV))
    throw ConfigError("cutoff radii must satisfy 0 < rA < rV");
  if (!(s.eta > 0.0) || !(s.eta < 0.5))
    throw ConfigError("cutoff eta must lie in (0, 1/2)");
}

// chi and its first/second partial derivatives at (x,y).
struct ChiDerivs {
  double chi, cx, cy, cxx, cyy;
};

ChiDerivs eval_chi(const CutoffSpec& spec, double x, double y) {
  Profile pr{spec.rA, spec.rV};
  ChiDerivs d{};
  if (spec.mode == CutoffMode::radial) {
    const double dx = x - spec.x0;
    const double dy = y - spec.y0;
    const double r = std::sqrt(dx * dx + dy * dy);
    double c, dc, ddc;
    pr.eval(r, c, dc, ddc);
    d.chi = c;
    if (r > 0.0) {
      // chi(x) = c(r): grad = c'(r) x/r, hessian diagonal terms below.
      const double ux = dx / r, uy = dy / r;
      d.cx = dc * ux;
      d.cy = dc * uy;
      d.cxx = ddc * ux * ux + dc * (1.0 - ux * ux) / r;
      d.cyy = ddc * uy * uy + dc * (1.0 - uy * uy) / r;
    } else {
      // r = 0 lies in the flat core (rA > 0), where all derivatives vanish.
      d.cx = d.cy = d.cxx = d.cyy = 0.0;
    }
  } else {
    const double ax = std::fabs(x - spec.x0);
    const double ay = std::fabs(y - spec.y0);
    double a, da, dda, b, db, ddb;
    pr.eval(ax, a, da, dda);
    pr.eval(ay, b, db, ddb);
    const double sx = x >= spec.x0 ? 1.0 : -1.0;
    const double sy = y >= spec.y0 ? 1.0 : -1.0;
    d.chi = a * b;
    d.cx = sx * da * b;
    d.cy = a * sy * db;
    d.cxx = dda * b;
    d.cyy = a * ddb;
  }
  return d;
}

CutoffPoint chain_rule(const ChiDerivs& d, double q) {
  CutoffPoint p{};
  if (d.chi <= 0.0) return p;
  const double cq = std::pow(d.chi, q);
  const double cq1 = std::pow(d.chi, q - 1.0);
  const double cq2 = std::pow(d.chi, q - 2.0);
  p.phi = cq;
  p.gx = q * cq1 * d.cx;
  p.gy = q * cq1 * d.cy;
  p.lap = q * (q - 1.0) * cq2 * (d.cx * d.cx + d.cy * d.cy) + q * cq1 * (d.cxx + d.cyy);
  // chi^q can underflow to zero while chi^(q-1) stays subnormal-positive;
  // keep the invariant "phi = 0 implies zero derivatives" exact.
  if (p.phi == 0.0) {
    p.gx = p.gy = p.lap = 0.0;
  }
  return p;
}

}  // namespace

int cutoff_power(double eta) {
  return static_cast<int>(std::ceil(2.0 / eta - 1e-9));
}

CutoffPoint eval_cutoff(const CutoffSpec& spec, double x, double y, double power) {
  validate_spec(spec);
  return chain_rule(eval_chi(spec, x, y), power);
}

CutoffField build_cutoff(const CutoffSpec& spec, const Grid& grid) {
  validate_spec(spec);
  if (!(spec.x0 >= 0.0 && spec.x0 <= grid.Lx && spec.y0 >= 0.0 && spec.y0 <= grid.Ly))
    throw ConfigError("cutoff center must lie in the closed domain");
  if (spec.mode == CutoffMode::radial) {
    if (spec.x0 - spec.rV < 0.0 || spec.x0 + spec.rV > grid.Lx ||
        spec.y0 - spec.rV < 0.0 || spec.y0 + spec.rV > grid.Ly)
      throw ConfigError(
          "radial cutoff support leaves the rectangle; use tensor mode for "
          "boundary-touching placements");
  }

  CutoffField out;
  out.spec = spec;
  out.m = cutoff_power(spec.eta);
  out.phi = Field(grid);
  out.grad_x = Field(grid);
  out.grad_y = Field(grid);
  out.lap = Field(grid);
  const double q = static_cast<double>(out.m);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      CutoffPoint p = chain_rule(eval_chi(spec, grid.x(i), grid.y(j)), q);
      out.phi.at(i, j) = p.phi;
      out.grad_x.at(i, j) = p.gx;
      out.grad_y.at(i, j) = p.gy;
      out.lap.at(i, j) = p.lap;
    }
  }
  out.C_phi = verify_fractional_bounds(out);
  return out;
}

double verify_fractional_bounds(const CutoffField& c) {
  const Grid& g = c.phi.grid;
  const double eta = c.spec.eta;
  double worst = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double phi = c.phi.at(i, j);
      const double gmag =
          std::sqrt(c.grad_x.at(i, j) * c.grad_x.at(i, j) +
                    c.grad_y.at(i, j) * c.grad_y.at(i, j));
      const double lap = std::fabs(c.lap.at(i, j));
      if (phi == 0.0) {
        if (gmag != 0.0 || lap != 0.0)
          throw std::logic_error(
              "cutoff construction bug: zero value with nonzero analytic derivative");
        continue;
      }
      const double r1 = gmag / std::pow(phi, 1.0 - eta);
      const double r2 = lap / std::pow(phi, 1.0 - 2.0 * eta);
      if (r1 > worst) worst = r1;
      if (r2 > worst) worst = r2;
    }
  }
  return worst;
}

}  // namespace chemoloc
