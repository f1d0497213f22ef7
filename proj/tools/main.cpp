#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "chemoloc/acceptance.hpp"
#include "chemoloc/config.hpp"
#include "chemoloc/cutoff.hpp"
#include "chemoloc/diagnostics.hpp"
#include "chemoloc/field_io.hpp"
#include "chemoloc/maxreg.hpp"
#include "chemoloc/runner.hpp"

namespace fs = std::filesystem;
using namespace chemoloc;

namespace {

std::string time_tag(double t) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

// Executes one fully parsed config and writes every artifact into
// cfg.output.dir: diagnostics.csv (config echoed as comments), text-grid
// snapshots (plus PGM heatmaps when enabled), and a run_meta.txt sidecar
// with the stop report. Returns a one-line summary.
std::string execute_run(const RunConfig& cfg) {
  const fs::path dir(cfg.output.dir);
  fs::create_directories(dir);

  ProblemSpec spec = cfg.problem();
  DiagnosticsEngine engine(spec, cfg.diag);
  RunResult rr = run(spec, cfg.stepper, engine, cfg.diag_times, cfg.output.snapshot_times);

  const auto echo = cfg.echo();
  std::vector<std::string> comments;
  comments.reserve(echo.size());
  for (const auto& [k, v] : echo) comments.push_back(k + " = " + v);
  write_diagnostics_csv((dir / cfg.output.csv).string(), rr.records,
                        engine.extra_names(), comments);

  for (const auto& [t, state] : rr.snapshots) {
    const std::string tag = time_tag(t);
    write_text_grid((dir / ("u_t" + tag + ".txt")).string(), state.u);
    write_text_grid((dir / ("v_t" + tag + ".txt")).string(), state.v);
    if (cfg.output.heatmaps) {
      write_pgm((dir / ("u_t" + tag + ".pgm")).string(), state.u);
      write_pgm((dir / ("v_t" + tag + ".pgm")).string(), state.v);
    }
  }

  BlowUpReport rep = blow_up_report(rr.final_state, rr.stop_reason, spec,
                                    cfg.diag.theta_B, cfg.diag.mu_tol);
  std::vector<std::pair<std::string, std::string>> meta = echo;
  meta.emplace_back("stop_reason", to_string(rr.stop_reason));
  meta.emplace_back("t_stop", format_double(rr.t_stop));
  meta.emplace_back("steps", std::to_string(rr.steps));
  meta.emplace_back("halved_steps", std::to_string(rr.halved_steps));
  if (!rr.records.empty()) {
    MassBoundCheck mb = check_mass_bound(rr.records, cfg.diag.tol_quad);
    meta.emplace_back("mass_bound_pass", mb.pass ? "true" : "false");
    meta.emplace_back("mass_bound_worst_margin", format_double(mb.worst_margin));
    meta.emplace_back("mass_bound_worst_t", format_double(mb.worst_t));
  }
  meta.emplace_back("blowup_triggered", rep.triggered ? "true" : "false");
  meta.emplace_back("blowup_sup_u", format_double(rep.sup_u));
  meta.emplace_back("blowup_argmax_x", format_double(rep.argmax_x));
  meta.emplace_back("blowup_argmax_y", format_double(rep.argmax_y));
  meta.emplace_back("blowup_cells", std::to_string(rep.blow_cells));
  meta.emplace_back("mu_zero_cells", std::to_string(rep.zero_cells));
  meta.emplace_back("blowup_distance_to_mu_zero", format_double(rep.distance));
  write_metadata((dir / "run_meta.txt").string(), meta);

  std::ostringstream os;
  os << cfg.output.dir << ": stop_reason=" << to_string(rr.stop_reason)
     << " t_stop=" << time_tag(rr.t_stop) << " steps=" << rr.steps
     << " sup_u=" << time_tag(rep.sup_u);
  if (rep.triggered) os << " blowup_distance=" << time_tag(rep.distance);
  return os.str();
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
  RunConfig cfg = load_config(config_path);
  if (!out_dir.empty()) cfg.output.dir = out_dir;
  std::cout << execute_run(cfg) << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& key,
              const std::vector<std::string>& values, const std::string& out_dir,
              unsigned jobs) {
  std::ifstream in(config_path);
  if (!in) throw ConfigError("cannot open config file: " + config_path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string base_text = ss.str();

  const fs::path base_dir(out_dir.empty() ? "sweep" : out_dir);

  // Parse everything up front so a bad value fails before any run starts.
  std::vector<RunConfig> cfgs;
  cfgs.reserve(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    RunConfig cfg = parse_config_text(override_config_text(base_text, key, values[k]));
    char sub[32];
    std::snprintf(sub, sizeof sub, "sweep_%03zu", k);
    cfg.output.dir = (base_dir / sub).string();
    cfgs.push_back(std::move(cfg));
  }

  // Runs are independent and write only into their own directories, so they
  // execute concurrently; summaries print in order afterwards.
  std::vector<std::string> summaries(cfgs.size());
  std::vector<std::string> errors(cfgs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= cfgs.size()) return;
      try {
        summaries[k] = execute_run(cfgs[k]);
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
  };
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(cfgs.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  int rc = 0;
  for (std::size_t k = 0; k < cfgs.size(); ++k) {
    if (errors[k].empty()) {
      std::cout << key << "=" << values[k] << " -> " << summaries[k] << "\n";
    } else {
      std::cout << key << "=" << values[k] << " -> error: " << errors[k] << "\n";
      rc = 1;
    }
  }
  return rc;
}

int cmd_maxreg(const ProbeConfig& pc, std::vector<double> ps, std::vector<double> qs,
               bool with_svd, const std::string& csv_path,
               const std::vector<double>& interp, double tol_interp) {
  if (qs.empty()) qs = ps;
  if (ps.size() != qs.size())
    throw ConfigError("--p and --q must receive the same number of values");

  std::vector<ProbeResult> results;
  for (std::size_t i = 0; i < ps.size(); ++i)
    results.push_back(estimate_K(ps[i], qs[i], pc));

  if (!interp.empty()) {
    const double p0 = interp[0], q0 = interp[1], p1 = interp[2], q1 = interp[3];
    const double theta = interp[4];
    auto ensure = [&](double p, double q) {
      for (const auto& r : results)
        if (std::fabs(r.p - p) <= 1e-9 && std::fabs(r.q - q) <= 1e-9) return;
      results.push_back(estimate_K(p, q, pc));
    };
    ensure(p0, q0);
    ensure(p1, q1);
    const double p_theta = 1.0 / ((1.0 - theta) / p0 + theta / p1);
    const double q_theta = 1.0 / ((1.0 - theta) / q0 + theta / q1);
    ensure(p_theta, q_theta);
    InterpolationReport rep =
        interpolation_check(p0, q0, p1, q1, theta, results, tol_interp);
    std::cout << "interpolation p_theta=" << rep.p_theta << " q_theta=" << rep.q_theta
              << " k_theta=" << rep.k_theta << " k_bound=" << rep.k_bound
              << (rep.hard ? (rep.hard_pass ? " endpoint-exact=yes" : " endpoint-exact=NO")
                           : (rep.advisory_pass ? " advisory=holds" : " advisory=exceeded"))
              << " tol=" << rep.tol << "\n";
    if (rep.hard && !rep.hard_pass) return 1;
  }

  for (const auto& r : results) {
    std::cout << "p=" << r.p << " q=" << r.q << " K_hat=" << format_double(r.K_hat)
              << " iterations=" << r.iterations << " descriptor=" << r.descriptor << "\n";
    if (with_svd && r.p == 2.0 && r.q == 2.0) {
      const double svd = svd_operator_norm(pc.grid, pc.dt, pc.steps);
      std::cout << "  dense-svd=" << format_double(svd)
                << " rel_diff=" << time_tag(std::fabs(r.K_hat - svd) / svd) << "\n";
    }
  }

  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    if (!csv) throw ConfigError("cannot open csv output: " + csv_path);
    csv << "p,q,K_hat,iterations,descriptor\n";
    for (const auto& r : results)
      csv << format_double(r.p) << "," << format_double(r.q) << ","
          << format_double(r.K_hat) << "," << r.iterations << ",\"" << r.descriptor
          << "\"\n";
  }
  return 0;
}

int cmd_cutoff_check(const CutoffSpec& cs, const Grid& g, const std::string& out_dir) {
  CutoffField c = build_cutoff(cs, g);
  const double verified = verify_fractional_bounds(c);
  std::cout << "m=" << c.m << " C_phi=" << format_double(c.C_phi)
            << " reverified=" << format_double(verified)
            << " support=" << (cs.mode == CutoffMode::radial ? "ball" : "square")
            << " max_phi=" << time_tag(max_value(c.phi)) << "\n";
  if (!out_dir.empty()) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    write_text_grid((dir / "phi.txt").string(), c.phi);
    write_text_grid((dir / "grad_mag.txt").string(), magnitude(c.grad_x, c.grad_y));
    write_text_grid((dir / "lap.txt").string(), c.lap);
    write_metadata((dir / "cutoff_meta.txt").string(),
                   {{"x0", format_double(cs.x0)},
                    {"y0", format_double(cs.y0)},
                    {"rA", format_double(cs.rA)},
                    {"rV", format_double(cs.rV)},
                    {"eta", format_double(cs.eta)},
                    {"mode", cs.mode == CutoffMode::radial ? "radial" : "tensor"},
                    {"m", std::to_string(c.m)},
                    {"C_phi", format_double(c.C_phi)}});
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chemotaxis localization toolkit: adaptive explicit runs, acceptance "
               "verification, parameter sweeps, regularity-constant probes, and cutoff "
               "construction checks"};
  app.require_subcommand(1);

  // run
  std::string run_config, run_out;
  auto* run_cmd = app.add_subcommand("run", "Execute one configured run");
  run_cmd->add_option("--config", run_config, "config file")->required();
  run_cmd->add_option("--out-dir", run_out, "override the output directory");

  // verify
  int criterion = 0;
  auto* verify_cmd = app.add_subcommand("verify", "Run the acceptance suite");
  verify_cmd->add_option("--criterion", criterion, "single criterion id (1..10), 0 = all")
      ->check(CLI::Range(0, acceptance::kCriteria));

  // sweep
  std::string sweep_config, sweep_key, sweep_out;
  std::vector<std::string> sweep_values;
  unsigned sweep_jobs = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Vary one config key across values");
  sweep_cmd->add_option("--config", sweep_config, "base config file")->required();
  sweep_cmd->add_option("--key", sweep_key, "dotted key, e.g. coefficients.u0_expr")
      ->required();
  sweep_cmd->add_option("--value", sweep_values, "value (repeatable)")->required();
  sweep_cmd->add_option("--out-dir", sweep_out, "parent directory (default: sweep)");
  sweep_cmd->add_option("--jobs", sweep_jobs, "parallel runs (default: hardware)");

  // maxreg
  ProbeConfig pc;
  int mr_nx = 8, mr_ny = 8, mr_steps = 16;
  double mr_Lx = 1.0, mr_Ly = 1.0, mr_dt = 2.5e-3;
  std::vector<double> mr_p{2.0}, mr_q, mr_interp;
  bool mr_svd = false;
  std::string mr_csv;
  double mr_tol_interp = 0.10;
  auto* mr_cmd = app.add_subcommand("maxreg", "Estimate discrete regularity constants");
  mr_cmd->add_option("--nx", mr_nx, "cells in x (default 8)");
  mr_cmd->add_option("--ny", mr_ny, "cells in y (default 8)");
  mr_cmd->add_option("--Lx", mr_Lx, "domain length x (default 1)");
  mr_cmd->add_option("--Ly", mr_Ly, "domain length y (default 1)");
  mr_cmd->add_option("--dt", mr_dt, "time step (default 2.5e-3)");
  mr_cmd->add_option("--steps", mr_steps, "time steps (default 16)");
  mr_cmd->add_option("--seed", pc.seed, "rng seed for multi-start search");
  mr_cmd->add_option("--starts", pc.starts, "multi-start count");
  mr_cmd->add_option("--budget", pc.budget, "total ratio evaluations");
  mr_cmd->add_option("--rtol", pc.rtol, "power-iteration stopping tolerance");
  mr_cmd->add_option("--max-iters", pc.max_iters, "power-iteration cap");
  mr_cmd->add_option("--p", mr_p, "exponent p (repeatable)");
  mr_cmd->add_option("--q", mr_q, "exponent q (repeatable, defaults to p)");
  mr_cmd->add_flag("--svd", mr_svd, "cross-check p=q=2 against the dense SVD");
  mr_cmd->add_option("--csv", mr_csv, "write (p,q,K_hat) samples to this file");
  mr_cmd->add_option("--interp", mr_interp, "p0 q0 p1 q1 theta: interpolation check")
      ->expected(5);
  mr_cmd->add_option("--interp-tol", mr_tol_interp, "advisory tolerance (default 0.10)");

  // cutoff-check
  CutoffSpec cs;
  std::string cc_mode = "radial", cc_out;
  int cc_nx = 64, cc_ny = 64;
  double cc_Lx = 1.0, cc_Ly = 1.0;
  auto* cc_cmd = app.add_subcommand("cutoff-check", "Build a cutoff and verify its bounds");
  cc_cmd->add_option("--x0", cs.x0, "center x")->required();
  cc_cmd->add_option("--y0", cs.y0, "center y")->required();
  cc_cmd->add_option("--rA", cs.rA, "inner region size")->required();
  cc_cmd->add_option("--rV", cs.rV, "outer region size")->required();
  cc_cmd->add_option("--eta", cs.eta, "fractional exponent in (0, 1/2)")->required();
  cc_cmd->add_option("--mode", cc_mode, "radial | tensor")
      ->check(CLI::IsMember({"radial", "tensor"}));
  cc_cmd->add_option("--nx", cc_nx, "cells in x (default 64)");
  cc_cmd->add_option("--ny", cc_ny, "cells in y (default 64)");
  cc_cmd->add_option("--Lx", cc_Lx, "domain length x (default 1)");
  cc_cmd->add_option("--Ly", cc_Ly, "domain length y (default 1)");
  cc_cmd->add_option("--out-dir", cc_out, "write phi/grad_mag/lap text grids here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(run_config, run_out);
    if (verify_cmd->parsed()) return acceptance::run_and_report(std::cout, criterion);
    if (sweep_cmd->parsed())
      return cmd_sweep(sweep_config, sweep_key, sweep_values, sweep_out, sweep_jobs);
    if (mr_cmd->parsed()) {
      pc.grid = Grid(mr_nx, mr_ny, mr_Lx, mr_Ly);
      pc.dt = mr_dt;
      pc.steps = mr_steps;
      return cmd_maxreg(pc, mr_p, mr_q, mr_svd, mr_csv, mr_interp, mr_tol_interp);
    }
    if (cc_cmd->parsed()) {
      cs.mode = cc_mode == "tensor" ? CutoffMode::tensor : CutoffMode::radial;
      return cmd_cutoff_check(cs, Grid(cc_nx, cc_ny, cc_Lx, cc_Ly), cc_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
