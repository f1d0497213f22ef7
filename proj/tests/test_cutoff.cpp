#include <cmath>

#include "chemoloc/cutoff.hpp"
#include "doctest.h"

using namespace chemoloc;

namespace {
// Quintic smoothstep and derivatives, frozen independently of the library.
double S(double s) { return ((6 * s - 15) * s + 10) * s * s * s; }
double Sp(double s) { return 30.0 * s * s * (s - 1.0) * (s - 1.0); }
}  // namespace

TEST_CASE("transition power guards against floating-point ceil overshoot") {
  CHECK(cutoff_power(1.0 / 6.0) == 12);
  CHECK(cutoff_power(0.25) == 8);
  CHECK(cutoff_power(0.4) == 5);
  CHECK(cutoff_power(2.0 / 7.0) == 7);
  CHECK(cutoff_power(0.3) == 7);
}

TEST_CASE("radial profile matches the quintic closed form at the midpoint") {
  CutoffSpec cs{0.5, 0.5, 0.1, 0.3, 1.0 / 6.0, CutoffMode::radial};
  const double w = cs.rV - cs.rA;
  const double r = 0.2;  // transition midpoint, sigma = 1/2
  const double chi = S(0.5);
  const double dchi = -Sp(0.5) / w;              // -9.375
  const double lap_chi = 0.0 + dchi / r;         // S'' vanishes at sigma = 1/2

  SUBCASE("bare profile, power 1") {
    const CutoffPoint p = eval_cutoff(cs, 0.5 + r, 0.5, 1.0);
    CHECK(p.phi == doctest::Approx(0.5));
    CHECK(p.gx == doctest::Approx(dchi));
    CHECK(p.gy == doctest::Approx(0.0));
    CHECK(p.lap == doctest::Approx(lap_chi));
  }

  SUBCASE("full power m = 12") {
    const int m = cutoff_power(cs.eta);
    REQUIRE(m == 12);
    const CutoffPoint p = eval_cutoff(cs, 0.5 + r, 0.5, m);
    CHECK(p.phi == doctest::Approx(std::pow(chi, m)));
    CHECK(p.gx == doctest::Approx(m * std::pow(chi, m - 1) * dchi));
    const double want_lap = m * (m - 1) * std::pow(chi, m - 2) * dchi * dchi +
                            m * std::pow(chi, m - 1) * lap_chi;
    CHECK(p.lap == doctest::Approx(want_lap));
  }

  SUBCASE("direction of the gradient flips across the center") {
    const CutoffPoint east = eval_cutoff(cs, 0.5 + r, 0.5, 2.0);
    const CutoffPoint west = eval_cutoff(cs, 0.5 - r, 0.5, 2.0);
    CHECK(east.gx == doctest::Approx(-west.gx));
    const CutoffPoint north = eval_cutoff(cs, 0.5, 0.5 + r, 2.0);
    CHECK(north.gy == doctest::Approx(east.gx));
  }
}

TEST_CASE("plateau and support: value 1 inside, 0 outside, flat derivatives") {
  CutoffSpec cs{0.5, 0.5, 0.1, 0.3, 0.2, CutoffMode::radial};
  const CutoffPoint in = eval_cutoff(cs, 0.52, 0.48, 3.0);
  CHECK(in.phi == 1.0);
  CHECK(in.gx == 0.0);
  CHECK(in.lap == 0.0);
  const CutoffPoint out = eval_cutoff(cs, 0.95, 0.5, 3.0);
  CHECK(out.phi == 0.0);
  CHECK(out.gx == 0.0);
  CHECK(out.lap == 0.0);
}

TEST_CASE("tensor mode has square regions and works at the boundary") {
  const Grid g(64, 64, 1.0, 1.0);
  CutoffSpec cs{0.0, 0.0, 0.1, 0.3, 0.25, CutoffMode::tensor};
  const CutoffField c = build_cutoff(cs, g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double dx = std::fabs(g.x(i)), dy = std::fabs(g.y(j));
      if (std::max(dx, dy) < cs.rA) CHECK(c.phi.at(i, j) == 1.0);
      if (std::max(dx, dy) > cs.rV) CHECK(c.phi.at(i, j) == 0.0);
      // corner of the support square is farther than rV in euclidean distance
      if (dx > cs.rA && dy > cs.rA && std::hypot(dx, dy) < cs.rV &&
          std::max(dx, dy) < cs.rV)
        CHECK(c.phi.at(i, j) < 1.0);
    }
  CHECK(verify_fractional_bounds(c) == c.C_phi);
}

TEST_CASE("radial mode refuses a support ball that leaves the rectangle") {
  const Grid g(32, 32, 1.0, 1.0);
  CutoffSpec cs{0.1, 0.5, 0.05, 0.3, 0.25, CutoffMode::radial};
  CHECK_THROWS_AS(build_cutoff(cs, g), ConfigError);
  cs.mode = CutoffMode::tensor;
  CHECK_NOTHROW(build_cutoff(cs, g));
}

TEST_CASE("spec validation") {
  const Grid g(32, 32, 1.0, 1.0);
  CHECK_THROWS_AS(build_cutoff({0.5, 0.5, 0.3, 0.2, 0.25, CutoffMode::radial}, g),
                  ConfigError);  // rA >= rV
  CHECK_THROWS_AS(build_cutoff({0.5, 0.5, 0.1, 0.3, 0.6, CutoffMode::radial}, g),
                  ConfigError);  // eta out of (0, 1/2)
  CHECK_THROWS_AS(build_cutoff({0.5, 0.5, 0.1, 0.3, 0.0, CutoffMode::radial}, g),
                  ConfigError);
  CHECK_THROWS_AS(build_cutoff({1.5, 0.5, 0.1, 0.3, 0.25, CutoffMode::tensor}, g),
                  ConfigError);  // center outside the domain
}

TEST_CASE("fractional bound constant shrinks as the transition widens") {
  const Grid g(128, 128, 1.0, 1.0);
  CutoffSpec narrow{0.5, 0.5, 0.1, 0.2, 0.25, CutoffMode::radial};
  CutoffSpec wide{0.5, 0.5, 0.1, 0.3, 0.25, CutoffMode::radial};
  const CutoffField cn = build_cutoff(narrow, g);
  const CutoffField cw = build_cutoff(wide, g);
  CHECK(cw.C_phi < cn.C_phi);

  narrow.mode = wide.mode = CutoffMode::tensor;
  CHECK(build_cutoff(wide, g).C_phi < build_cutoff(narrow, g).C_phi);
}

TEST_CASE("an inner-square cutoff covering the whole domain is identically 1") {
  const Grid g(16, 16, 1.0, 1.0);
  CutoffSpec cs{0.5, 0.5, 0.8, 0.9, 0.25, CutoffMode::tensor};
  const CutoffField c = build_cutoff(cs, g);
  CHECK(min_value(c.phi) == 1.0);
  CHECK(c.C_phi == 0.0);
}

TEST_CASE("nested cutoffs: the outer plateau covers the inner support") {
  const Grid g(96, 96, 1.0, 1.0);
  CutoffSpec inner{0.5, 0.5, 0.05, 0.15, 0.25, CutoffMode::radial};
  CutoffSpec outer{0.5, 0.5, 0.15, 0.4, 0.25, CutoffMode::radial};
  const CutoffField ci = build_cutoff(inner, g);
  const CutoffField co = build_cutoff(outer, g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (ci.phi.at(i, j) > 0.0) CHECK(co.phi.at(i, j) == 1.0);
}

TEST_CASE("phi^eta stays C2: chain-rule power m*eta has bounded derivatives") {
  CutoffSpec cs{0.5, 0.5, 0.1, 0.3, 0.2, CutoffMode::radial};
  const int m = cutoff_power(cs.eta);
  const double me = m * cs.eta;
  REQUIRE(me >= 2.0);
  for (double r : {0.11, 0.15, 0.2, 0.25, 0.295, 0.2999}) {
    const CutoffPoint base = eval_cutoff(cs, 0.5 + r, 0.5, 1.0);
    const CutoffPoint frac = eval_cutoff(cs, 0.5 + r, 0.5, me);
    CHECK(frac.phi == doctest::Approx(std::pow(base.phi, me)));
    CHECK(std::isfinite(frac.gx));
    CHECK(std::isfinite(frac.lap));
    CHECK(std::fabs(frac.lap) < 1e4);  // bounded up to the support edge
  }
}

TEST_CASE("cell-wise verification of both fractional bound exponents") {
  const Grid g(64, 64, 1.0, 1.0);
  for (double eta : {0.1, 0.3}) {
    CutoffSpec cs{0.5, 0.5, 0.12, 0.35, eta, CutoffMode::radial};
    const CutoffField c = build_cutoff(cs, g);
    const double C = c.C_phi;
    CHECK(std::isfinite(C));
    CHECK(C > 0.0);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double phi = c.phi.at(i, j);
        if (phi == 0.0) {
          CHECK(c.grad_x.at(i, j) == 0.0);
          CHECK(c.grad_y.at(i, j) == 0.0);
          CHECK(c.lap.at(i, j) == 0.0);
          continue;
        }
        const double gmag = std::hypot(c.grad_x.at(i, j), c.grad_y.at(i, j));
        CHECK(gmag <= C * std::pow(phi, 1.0 - eta));
        CHECK(std::fabs(c.lap.at(i, j)) <= C * std::pow(phi, 1.0 - 2.0 * eta));
      }
  }
}

TEST_CASE("verification rejects a corrupted field") {
  const Grid g(32, 32, 1.0, 1.0);
  CutoffField c = build_cutoff({0.5, 0.5, 0.1, 0.3, 0.25, CutoffMode::radial}, g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (c.grad_x.at(i, j) != 0.0) {
        c.phi.at(i, j) = 0.0;  // nonzero derivative outside the claimed support
        CHECK_THROWS_AS(verify_fractional_bounds(c), std::logic_error);
        return;
      }
  FAIL("no transition cell found");
}
