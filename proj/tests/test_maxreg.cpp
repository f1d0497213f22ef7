#include <cmath>
#include <random>

#include "chemoloc/maxreg.hpp"
#include "doctest.h"

using namespace chemoloc;

namespace {

std::vector<Field> constant_forcing(const Grid& g, int steps, double c) {
  return std::vector<Field>(static_cast<std::size_t>(steps), Field(g, c));
}

std::vector<Field> random_forcing(const Grid& g, int steps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Field> f(static_cast<std::size_t>(steps), Field(g));
  for (auto& slab : f)
    for (double& v : slab.data) v = gauss(rng);
  return f;
}

}  // namespace

TEST_CASE("heat solve validation") {
  const Grid g(8, 8, 1.0, 1.0);
  const double limit = 1.0 / (2.0 / (g.hx * g.hx) + 2.0 / (g.hy * g.hy) + 1.0);
  HeatSolveSpec spec{g, 2.0 * limit, 4, constant_forcing(g, 4, 1.0), Field()};
  CHECK_THROWS_AS(solve_heat(spec), ConfigError);  // CFL violation
  spec.dt = 0.5 * limit;
  spec.forcing.pop_back();  // slab count mismatch
  CHECK_THROWS_AS(solve_heat(spec), ConfigError);
  spec.forcing = constant_forcing(g, 4, 1.0);
  CHECK_NOTHROW(solve_heat(spec));
}

TEST_CASE("zero forcing keeps w identically zero and has no ratio") {
  const Grid g(8, 8, 1.0, 1.0);
  HeatSolveSpec spec{g, 1e-3, 6, constant_forcing(g, 6, 0.0), Field()};
  const HeatTrajectory traj = solve_heat(spec);
  for (const Field& w : traj.w)
    for (double v : w.data) CHECK(v == 0.0);
  CHECK_THROWS_AS(regularity_ratio(traj, 2.0, 2.0), ProbeError);
  CHECK_THROWS_AS(regularity_ratio(traj, 0.5, 2.0), ConfigError);
}

TEST_CASE("constant forcing follows the scalar recurrence exactly") {
  const Grid g(8, 8, 1.0, 1.0);
  const double dt = 2e-3, c = 3.0;
  const int N = 200;
  const HeatTrajectory traj = solve_heat({g, dt, N, constant_forcing(g, N, c), Field()});
  double a = 0.0;  // the recurrence a' = a + dt (c - a), spatially flat
  for (int n = 0; n < N; ++n) a += dt * (c - a);
  CHECK(traj.w.back().at(4, 4) == doctest::Approx(a).epsilon(1e-14));
  // and approaches the continuum relaxation c (1 - e^{-T})
  CHECK(traj.w.back().at(4, 4) ==
        doctest::Approx(c * (1.0 - std::exp(-dt * N))).epsilon(1e-3));
}

TEST_CASE("separable cosine mode follows its one-dimensional recurrence") {
  const Grid g(16, 16, 1.0, 1.0);
  const double dt = 5e-4;  // CFL limit at this grid is about 9.76e-4
  const int N = 100;
  const int k = 2;
  std::vector<Field> f(static_cast<std::size_t>(N), Field(g));
  for (auto& slab : f)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) slab.at(i, j) = std::cos(k * M_PI * g.x(i));
  const HeatTrajectory traj = solve_heat({g, dt, N, f, Field()});

  const double lam = cosine_mode_eigenvalue(g.hx, g.Lx, k);
  double a = 0.0;  // mode amplitude: a' = a + dt (1 - (lam + 1) a)
  for (int n = 0; n < N; ++n) a += dt * (1.0 - (lam + 1.0) * a);
  for (int i = 0; i < g.nx; ++i)
    CHECK(traj.w.back().at(i, 5) ==
          doctest::Approx(a * std::cos(k * M_PI * g.x(i))).epsilon(1e-12));
}

TEST_CASE("trajectory slabs satisfy the discrete equation") {
  const Grid g(8, 8, 1.0, 1.0);
  const HeatTrajectory traj = solve_heat({g, 1e-3, 5, random_forcing(g, 5, 21), Field()});
  for (int n = 0; n < traj.steps(); ++n) {
    const Field wt = traj.wt(n);
    const Field lap = laplacian(traj.w[static_cast<std::size_t>(n)]);
    for (std::size_t c = 0; c < wt.data.size(); ++c) {
      const double rhs = lap.data[c] - traj.w[static_cast<std::size_t>(n)].data[c] +
                         traj.f[static_cast<std::size_t>(n)].data[c];
      CHECK(wt.data[c] == doctest::Approx(rhs).epsilon(1e-10));
    }
  }
}

TEST_CASE("forward and adjoint satisfy the inner-product identity") {
  const Grid g(6, 5, 1.0, 1.3);
  const double dt = 1e-3;
  const int N = 4;
  const auto f = random_forcing(g, N, 31);
  std::vector<Field> w_block, wt_block, lap_block;
  apply_forward(g, dt, f, w_block, wt_block, lap_block);

  const auto g1 = random_forcing(g, N, 32);
  const auto g2 = random_forcing(g, N, 33);
  const auto g3 = random_forcing(g, N, 34);
  double lhs = 0.0;
  for (int n = 0; n < N; ++n) {
    for (std::size_t c = 0; c < g.size(); ++c) {
      lhs += w_block[n].data[c] * g1[n].data[c] + wt_block[n].data[c] * g2[n].data[c] +
             lap_block[n].data[c] * g3[n].data[c];
    }
  }
  const std::vector<Field> adj = apply_adjoint(g, dt, g1, g2, g3);
  double rhs = 0.0;
  for (int n = 0; n < N; ++n)
    for (std::size_t c = 0; c < g.size(); ++c) rhs += f[n].data[c] * adj[n].data[c];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("ratio properties: homogeneity and the lower-bound role of estimates") {
  const Grid g(8, 8, 1.0, 1.0);
  const double dt = 2e-3;
  const int N = 10;
  const auto f = random_forcing(g, N, 41);
  const HeatTrajectory traj = solve_heat({g, dt, N, f, Field()});

  auto scaled = f;
  for (auto& slab : scaled)
    for (double& v : slab.data) v *= 2.0;
  const HeatTrajectory traj2 = solve_heat({g, dt, N, scaled, Field()});
  for (double p : {2.0, 1.5})
    for (double q : {2.0, 3.0})
      CHECK(regularity_ratio(traj, p, q) ==
            doctest::Approx(regularity_ratio(traj2, p, q)).epsilon(1e-12));

  ProbeConfig pc;
  pc.grid = g;
  pc.dt = dt;
  pc.steps = N;
  pc.starts = 3;
  pc.budget = 300;
  const ProbeResult pr = estimate_K(1.5, 2.0, pc);
  CHECK(pr.K_hat >= regularity_ratio(
                        solve_heat({g, dt, N, constant_forcing(g, N, 1.0), Field()}), 1.5,
                        2.0) *
                        (1.0 - 1e-12));
  CHECK(pr.iterations > 0);
  CHECK(pr.descriptor.find("multi-start") != std::string::npos);

  const ProbeResult again = estimate_K(1.5, 2.0, pc);
  CHECK(pr.K_hat == again.K_hat);  // same seed, same search path

  CHECK_THROWS_AS(estimate_K(1.0, 2.0, pc), ConfigError);
}

TEST_CASE("power iteration matches the dense SVD on a small problem") {
  const Grid g(4, 4, 1.0, 1.0);
  ProbeConfig pc;
  pc.grid = g;
  pc.dt = 0.01;
  pc.steps = 4;
  pc.rtol = 1e-13;
  pc.max_iters = 100000;
  const ProbeResult pr = estimate_K(2.0, 2.0, pc);
  CHECK(pr.descriptor == "power-iteration");
  const double svd = svd_operator_norm(g, pc.dt, pc.steps);
  CHECK(pr.K_hat == doctest::Approx(svd).epsilon(1e-8));
  // the Euclidean operator norm and the quadrature-weighted ratio agree:
  // uniform dt h^2 weights cancel
  const auto f = random_forcing(g, pc.steps, 51);
  const HeatTrajectory traj = solve_heat({g, pc.dt, pc.steps, f, Field()});
  CHECK(regularity_ratio(traj, 2.0, 2.0) <= svd * (1.0 + 1e-10));
}

TEST_CASE("weighted bound constant formula") {
  CHECK(weighted_bound_constant(2.0, 3.0) == doctest::Approx((8.0 * 9.0 + 6.0) * 4.0));
  CHECK(weighted_bound_constant(1.5, 2.0) ==
        doctest::Approx((std::pow(8.0, 0.5) * std::pow(2.0, 1.5) + std::pow(6.0, 0.5)) *
                        std::pow(2.0, 1.5)));
}

TEST_CASE("interpolation check: advisory interior, exact endpoints") {
  std::vector<ProbeResult> est;
  est.push_back({2.0, 2.0, 4.0, 1, "a"});
  est.push_back({4.0, 4.0, 8.0, 1, "b"});
  est.push_back({8.0 / 3.0, 8.0 / 3.0, 5.0, 1, "c"});

  InterpolationReport mid = interpolation_check(2.0, 2.0, 4.0, 4.0, 0.5, est);
  CHECK(mid.p_theta == doctest::Approx(8.0 / 3.0));
  CHECK(mid.k_bound == doctest::Approx(std::sqrt(32.0)));
  CHECK_FALSE(mid.hard);
  CHECK(mid.advisory_pass);  // 5 <= 5.657 (1 + 0.10)

  InterpolationReport end = interpolation_check(2.0, 2.0, 4.0, 4.0, 0.0, est);
  CHECK(end.hard);
  CHECK(end.hard_pass);  // k_theta and k_bound are both the (2,2) estimate

  est[2].K_hat = 7.0;  // far beyond the advisory band
  InterpolationReport fail = interpolation_check(2.0, 2.0, 4.0, 4.0, 0.5, est);
  CHECK_FALSE(fail.advisory_pass);

  CHECK_THROWS_AS(interpolation_check(2.0, 2.0, 4.0, 4.0, 0.25, est), ConfigError);
  CHECK_THROWS_AS(interpolation_check(2.0, 2.0, 4.0, 4.0, 1.5, est), ConfigError);
}

TEST_CASE("weighted second-derivative bound with a plateau weight") {
  const Grid g(16, 16, 1.0, 1.0);
  const double dt = 5e-4;  // below the CFL limit for this grid
  const int N = 12;
  const auto f = random_forcing(g, N, 61);
  const HeatTrajectory traj = solve_heat({g, dt, N, f, Field()});

  ProbeConfig pc;
  pc.grid = g;
  pc.dt = dt;
  pc.steps = N;
  pc.rtol = 1e-10;
  const double K22 = estimate_K(2.0, 2.0, pc).K_hat;

  // phi = 1 everywhere: commutator terms vanish and the bound reduces to the
  // unweighted inequality certified by K22
  const CutoffField plateau =
      build_cutoff({0.5, 0.5, 0.8, 0.9, 0.25, CutoffMode::tensor}, g);
  REQUIRE(min_value(plateau.phi) == 1.0);
  const WeightedBoundResult wb = weighted_bound_check(plateau, traj, K22, "random");
  CHECK(wb.pass);
  CHECK(wb.lhs < wb.rhs);
  CHECK(wb.constant == doctest::Approx(weighted_bound_constant(2.0, K22)));
  CHECK(wb.forcing_descriptor == "random");

  // a genuine cutoff engages the commutator terms and still passes
  const CutoffField cut =
      build_cutoff({0.5, 0.5, 0.15, 0.45, 0.3, CutoffMode::tensor}, g);
  const WeightedBoundResult wb2 = weighted_bound_check(cut, traj, K22);
  CHECK(wb2.pass);

  CHECK_THROWS_AS(weighted_bound_check(cut, traj, K22, "", 3.0), ConfigError);
}
