#include <cmath>

#include "chemoloc/grid.hpp"
#include "doctest.h"

using namespace chemoloc;

TEST_CASE("grid geometry and validation") {
  const Grid g(8, 4, 2.0, 1.0);
  CHECK(g.hx == 0.25);
  CHECK(g.hy == 0.25);
  CHECK(g.x(0) == 0.125);
  CHECK(g.y(3) == doctest::Approx(0.875));
  CHECK(g.idx(2, 1) == 10);
  CHECK_THROWS_AS(Grid(3, 8, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(Grid(8, 8, -1.0, 1.0), ConfigError);
}

TEST_CASE("laplacian stencil weights from a single-cell impulse") {
  const Grid g(8, 8, 1.0, 1.0);
  Field f(g);
  f.at(4, 4) = 1.0;
  const Field lf = laplacian(f);
  const double w = 1.0 / (g.hx * g.hx);
  CHECK(lf.at(4, 4) == doctest::Approx(-4.0 * w));
  CHECK(lf.at(3, 4) == doctest::Approx(w));
  CHECK(lf.at(5, 4) == doctest::Approx(w));
  CHECK(lf.at(4, 3) == doctest::Approx(w));
  CHECK(lf.at(4, 5) == doctest::Approx(w));
  CHECK(lf.at(2, 4) == 0.0);
}

TEST_CASE("mirror ghosts make cosine modes exact eigenvectors") {
  const Grid g(16, 12, 2.0, 1.5);
  for (int k : {1, 2, 5}) {
    Field f(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) f.at(i, j) = std::cos(k * M_PI * g.x(i) / g.Lx);
    const Field lf = laplacian(f);
    const double lam = cosine_mode_eigenvalue(g.hx, g.Lx, k);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)  // boundary cells included
        CHECK(lf.at(i, j) == doctest::Approx(-lam * f.at(i, j)).epsilon(1e-12));
  }
}

TEST_CASE("eigenvalue approaches the continuum limit") {
  CHECK(cosine_mode_eigenvalue(1.0 / 512, 1.0, 1) ==
        doctest::Approx(M_PI * M_PI).epsilon(1e-4));
  CHECK(cosine_mode_eigenvalue(0.25, 1.0, 0) == 0.0);
}

TEST_CASE("gradient uses the mirrored stencil at boundary cells") {
  const Grid g(8, 8, 1.0, 1.0);
  Field f(g), gx(g), gy(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) f.at(i, j) = g.x(i);
  gradient_centers(f, gx, gy);
  CHECK(gx.at(3, 3) == doctest::Approx(1.0));
  CHECK(gx.at(0, 3) == doctest::Approx(0.5));  // (f1 - f0)/(2h) with mirror ghost
  CHECK(gx.at(7, 3) == doctest::Approx(0.5));
  CHECK(gy.at(3, 3) == 0.0);
  const Field m = magnitude(gx, gy);
  CHECK(m.at(3, 3) == doctest::Approx(1.0));
}

TEST_CASE("quadrature, norms, masked integrals") {
  const Grid g(32, 16, 2.0, 1.0);
  Field one(g, 1.0);
  CHECK(integrate(one) == doctest::Approx(2.0));
  CHECK(lp_norm(one, 3.0) == doctest::Approx(std::pow(2.0, 1.0 / 3.0)));
  CHECK_THROWS_AS(lp_norm(one, 0.5), ConfigError);

  Field f(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) f.at(i, j) = g.x(i);
  CHECK(integrate(f) == doctest::Approx(2.0));  // midpoint is exact on linears

  const MaskedIntegral mi = masked_integrate(one, 1.0, 0.5, 0.3, 2.0);
  CHECK(mi.cells > 0);
  CHECK(mi.value == doctest::Approx(mi.cells * g.hx * g.hy));
  const MaskedIntegral empty = masked_integrate(one, 1.0, 0.5, 1e-9, 2.0);
  CHECK(empty.cells == 0);
  CHECK(empty.value == 0.0);
}

TEST_CASE("argmax reports the first maximizer in scan order") {
  const Grid g(8, 8, 1.0, 1.0);
  Field f(g);
  f.at(2, 1) = 3.0;
  f.at(5, 6) = 3.0;
  const ArgMax am = argmax(f);
  CHECK(am.i == 2);
  CHECK(am.j == 1);
  CHECK(am.value == 3.0);
  CHECK(am.x == g.x(2));
  CHECK(am.y == g.y(1));
  CHECK(min_value(f) == 0.0);
  CHECK(max_value(f) == 3.0);
}

TEST_CASE("sampling an expression hits every cell center") {
  const Grid g(4, 4, 1.0, 1.0);
  const Field f = sample(g, Expr::parse("x + 10*y"));
  CHECK(f.at(1, 2) == doctest::Approx(g.x(1) + 10 * g.y(2)));
  CHECK_THROWS_AS(sample(g, Expr::parse("1/(x-0.125)")), EvalError);
}
