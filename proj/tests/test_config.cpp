#include <string>

#include "chemoloc/config.hpp"
#include "chemoloc/field_io.hpp"
#include "chemoloc/maxreg.hpp"
#include "doctest.h"

using namespace chemoloc;

namespace {

const char* kMinimal =
    "[domain]\nLx = 1\nLy = 1\nnx = 16\nny = 16\n"
    "[coefficients]\nkappa_expr = 1\nmu_expr = 0\nu0_expr = 1\nv0_expr = 0\n"
    "[time]\nT = 1\ntau = 0.5\n";

std::string lookup(const RunConfig& cfg, const std::string& key) {
  for (const auto& [k, v] : cfg.echo())
    if (k == key) return v;
  return "<missing>";
}

}  // namespace

TEST_CASE("minimal config fills documented defaults") {
  const RunConfig cfg = parse_config_text(kMinimal);
  CHECK(cfg.grid.nx == 16);
  CHECK(cfg.stepper.cfl_safety == 0.9);
  CHECK(cfg.stepper.dt_max == 1e-2);
  CHECK(cfg.stepper.dt_min == 1e-12);
  CHECK(cfg.stepper.u_cap == 1e6);
  CHECK(cfg.diag_times == std::vector<double>{0.25, 0.5, 0.75, 1.0});
  CHECK(cfg.diag.tol_quad == 0.02);
  CHECK(cfg.diag.theta_B == 0.5);
  CHECK(cfg.diag.mu_tol == 1e-8);
  CHECK(cfg.output.dir == "out");
  CHECK_FALSE(cfg.output.heatmaps);
  CHECK(cfg.seed == 1);
  CHECK(lookup(cfg, "time.dt_max") == "0.01");
  CHECK(lookup(cfg, "diagnostics.diag_times") == "0.25 0.5 0.75 1");
  CHECK(cfg.kappa.at(3, 3) == 1.0);
  CHECK(cfg.problem().T == 1.0);
}

TEST_CASE("negative mu sample is rejected naming the hypothesis and the cell") {
  std::string text = override_config_text(kMinimal, "coefficients.mu_expr", "-1");
  try {
    parse_config_text(text);
    FAIL("expected a load error");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("mu") != std::string::npos);
    CHECK(msg.find("nonnegativity hypothesis") != std::string::npos);
    CHECK(msg.find("cell") != std::string::npos);
  }
}

TEST_CASE("negative initial data is rejected") {
  CHECK_THROWS_AS(
      parse_config_text(override_config_text(kMinimal, "coefficients.u0_expr", "x - 2")),
      ConfigError);
  CHECK_THROWS_AS(
      parse_config_text(override_config_text(kMinimal, "coefficients.v0_expr", "-0.1")),
      ConfigError);
}

TEST_CASE("time window validation") {
  CHECK_THROWS_AS(parse_config_text(override_config_text(kMinimal, "time.tau", "1")),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text(override_config_text(kMinimal, "time.tau", "0")),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text(override_config_text(kMinimal, "time.T", "-1")),
                  ConfigError);
}

TEST_CASE("structural errors carry line numbers") {
  const std::string unknown = std::string(kMinimal) + "[time2]\nx = 1\n";
  CHECK_THROWS_AS(parse_config_text(unknown), ConfigError);

  const char* with_bogus =
      "[domain]\nLx = 1\nLy = 1\nbogus = 2\nnx = 16\nny = 16\n"
      "[coefficients]\nkappa_expr = 1\nmu_expr = 0\nu0_expr = 1\nv0_expr = 0\n"
      "[time]\nT = 1\ntau = 0.5\n";
  try {
    parse_config_text(with_bogus);
    FAIL("expected a load error");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 4") != std::string::npos);
    CHECK(msg.find("bogus") != std::string::npos);
  }

  CHECK_THROWS_AS(
      parse_config_text(std::string(kMinimal) + "[diagnostics]\ntheta_B = 0.5\n"
                                                "[diagnostics]\ntheta_B = 0.6\n"),
      ConfigError);  // duplicate singleton section
  CHECK_THROWS_AS(parse_config_text(std::string(kMinimal) + "[domain]\nLx = 2\n"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_config_text("[domain]\nLx = 1\nLx = 2\nLy = 1\nnx = 16\nny = 16\n"
                        "[coefficients]\nkappa_expr = 1\nmu_expr = 0\nu0_expr = 1\n"
                        "v0_expr = 0\n[time]\nT = 1\ntau = 0.5\n"),
      ConfigError);  // duplicate key
  CHECK_THROWS_AS(parse_config_text("[domain]\nLx\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(std::string(kMinimal) + "[time]\nT = not_a_number\n"),
                  ConfigError);
}

TEST_CASE("expression errors surface at load time") {
  CHECK_THROWS_AS(
      parse_config_text(override_config_text(kMinimal, "coefficients.kappa_expr", "2+*3")),
      ConfigError);
  // evaluation failure somewhere on the grid is also a load failure
  CHECK_THROWS_AS(parse_config_text(override_config_text(kMinimal, "coefficients.u0_expr",
                                                         "1/(x-0.03125)")),
                  ConfigError);
}

TEST_CASE("functional section: defaults, admissibility gate, khat override") {
  std::string text = std::string(kMinimal) +
                     "[functional]\np = 1.5\neps = 0.01\nx0 = 0.5\ny0 = 0.5\n"
                     "rA = 0.1\nrV = 0.3\nkhat = 2\n";
  text = override_config_text(text, "coefficients.mu_expr", "1");
  const RunConfig cfg = parse_config_text(text);
  REQUIRE(cfg.diag.functionals.size() == 1);
  const FunctionalSpec& f = cfg.diag.functionals[0];
  CHECK(f.cutoff.eta == 1.0 / (2.0 * (1.5 + 1.0)));  // default eta = 1/(2(p+1))
  CHECK(f.cutoff.mode == CutoffMode::radial);
  CHECK(f.mu_x0 == 1.0);  // expression evaluated at the exact center
  CHECK(f.bound_const_p1 ==
        doctest::Approx(weighted_bound_constant(2.5, 2.0)));
  CHECK(f.margin == doctest::Approx(admissibility_margin(1.0, 0.01, 1.5, 1.0, 1.0,
                                                         f.bound_const_p1)));
  CHECK(lookup(cfg, "functional1.margin") == format_double(f.margin));

  SUBCASE("eps outside (0, mu(x0)/8) is refused with the bound in the message") {
    try {
      parse_config_text(override_config_text(text, "functional.eps", "0.2"));
      FAIL("expected a load error");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("0.125") != std::string::npos);
    }
  }

  SUBCASE("p is confined to (1,2)") {
    CHECK_THROWS_AS(parse_config_text(override_config_text(text, "functional.p", "2")),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text(override_config_text(text, "functional.p", "1")),
                    ConfigError);
  }

  SUBCASE("the cutoff is built eagerly, so placement errors are load errors") {
    CHECK_THROWS_AS(parse_config_text(override_config_text(text, "functional.x0", "0.05")),
                    ConfigError);  // radial support ball leaves the domain
  }

  SUBCASE("a second functional is addressed by suffix") {
    std::string two = text +
                      "[functional]\np = 1.2\neps = 0.01\nx0 = 0.4\ny0 = 0.6\n"
                      "rA = 0.1\nrV = 0.3\nkhat = 2\nmode = tensor\n";
    RunConfig c2 = parse_config_text(two);
    REQUIRE(c2.diag.functionals.size() == 2);
    CHECK(c2.diag.functionals[1].cutoff.mode == CutoffMode::tensor);
    std::string swapped = override_config_text(two, "functional2.y0", "0.7");
    CHECK(parse_config_text(swapped).diag.functionals[1].cutoff.y0 == 0.7);
    CHECK(parse_config_text(swapped).diag.functionals[0].cutoff.y0 == 0.5);
  }
}

TEST_CASE("ball and output sections") {
  std::string text = std::string(kMinimal) +
                     "[ball]\ncx = 0.25\ncy = 0.75\nradius = 0.2\n"
                     "grad_exps = 2 3\nlap_exps = 1.5\n"
                     "[output]\ndir = results\ncsv = d.csv\n"
                     "snapshot_times = 0.5 1\nheatmaps = true\n"
                     "[diagnostics]\ndiag_times = 0.5 1\nv_norms = 2\ngradv_norms = 2 4\n";
  const RunConfig cfg = parse_config_text(text);
  REQUIRE(cfg.diag.balls.size() == 1);
  CHECK(cfg.diag.balls[0].grad_exps == std::vector<double>{2.0, 3.0});
  CHECK(cfg.diag.balls[0].lap_exps == std::vector<double>{1.5});
  CHECK(cfg.output.dir == "results");
  CHECK(cfg.output.snapshot_times == std::vector<double>{0.5, 1.0});
  CHECK(cfg.output.heatmaps);
  CHECK(cfg.diag_times == std::vector<double>{0.5, 1.0});
  CHECK(cfg.diag.gradv_norms == std::vector<double>{2.0, 4.0});

  CHECK_THROWS_AS(parse_config_text(std::string(kMinimal) +
                                    "[ball]\ncx = 0.5\ncy = 0.5\nradius = -1\n"),
                  ConfigError);
}

TEST_CASE("u_cap must exceed the initial sup norm") {
  std::string text = override_config_text(kMinimal, "coefficients.u0_expr", "10");
  text = override_config_text(text, "time.u_cap", "5");
  CHECK_THROWS_AS(parse_config_text(text), ConfigError);
}

TEST_CASE("raw config round trip and overrides") {
  const std::string text =
      "# leading comment\nseed = 4\n[domain]\nLx = 1\n; another comment\nLy = 2\n";
  const RawConfig raw = parse_raw_config(text);
  REQUIRE(raw.sections.size() == 2);  // preamble + [domain]
  CHECK(raw.sections[0].name.empty());
  CHECK(raw.sections[0].entries[0].key == "seed");
  CHECK(raw.sections[1].entries[1].value == "2");
  CHECK(raw.sections[1].entries[1].line == 6);

  const std::string replaced = override_config_text(text, "domain.Lx", "7");
  CHECK(parse_raw_config(replaced).sections[1].entries[0].value == "7");
  const std::string appended = override_config_text(text, "domain.nx", "32");
  const RawConfig araw = parse_raw_config(appended);
  CHECK(araw.sections[1].entries.back().key == "nx");
  CHECK_THROWS_AS(override_config_text(text, "missing.key", "1"), ConfigError);

  const std::string again = serialize_raw_config(raw);
  const RawConfig raw2 = parse_raw_config(again);
  REQUIRE(raw2.sections.size() == 2);
  CHECK(raw2.sections[1].entries[1].value == "2");
}

TEST_CASE("loading a missing file is a config error") {
  CHECK_THROWS_AS(load_config("/nonexistent/path/config.ini"), ConfigError);
}

TEST_CASE("parsing is deterministic: identical text, identical echo") {
  const RunConfig a = parse_config_text(kMinimal);
  const RunConfig b = parse_config_text(kMinimal);
  CHECK(a.echo() == b.echo());
}
