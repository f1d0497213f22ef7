#include "chemoloc/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "chemoloc/field_io.hpp"
#include "chemoloc/maxreg.hpp"

namespace chemoloc {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double parse_double(const RawEntry& e) {
  double v = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    fail(e.line, "'" + e.key + "' expects a number, got '" + e.value + "'");
  return v;
}

long parse_long(const RawEntry& e) {
  long v = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    fail(e.line, "'" + e.key + "' expects an integer, got '" + e.value + "'");
  return v;
}

bool parse_bool(const RawEntry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  fail(e.line, "'" + e.key + "' expects true or false, got '" + e.value + "'");
}

std::vector<double> parse_list(const RawEntry& e) {
  std::vector<double> out;
  std::istringstream is(e.value);
  std::string tok;
  while (is >> tok) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = first + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
      fail(e.line, "'" + e.key + "' expects numbers, got '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

// Tracks which keys a section supplied, rejecting unknown and duplicate ones.
class SectionReader {
 public:
  SectionReader(const RawSection& s, std::vector<std::string> allowed)
      : sec_(s), allowed_(std::move(allowed)) {
    for (const auto& e : sec_.entries) {
      bool known = false;
      for (const auto& k : allowed_)
        if (k == e.key) known = true;
      if (!known) fail(e.line, "unknown key '" + e.key + "' in section [" + sec_.name + "]");
      for (const auto& other : sec_.entries)
        if (&other != &e && other.key == e.key && other.line < e.line)
          fail(e.line, "duplicate key '" + e.key + "' in section [" + sec_.name + "]");
    }
  }

  const RawEntry* find(const std::string& key) const {
    for (const auto& e : sec_.entries)
      if (e.key == key) return &e;
    return nullptr;
  }

  const RawEntry& require(const std::string& key) const {
    const RawEntry* e = find(key);
    if (!e)
      fail(sec_.line, "section [" + sec_.name + "] is missing required key '" + key + "'");
    return *e;
  }

  double number(const std::string& key, double def) const {
    const RawEntry* e = find(key);
    return e ? parse_double(*e) : def;
  }

 private:
  const RawSection& sec_;
  std::vector<std::string> allowed_;
};

Expr parse_expr_entry(const RawEntry& e) {
  try {
    return Expr::parse(e.value);
  } catch (const ParseError& pe) {
    fail(e.line, "'" + e.key + "': " + pe.what());
  }
}

Field sample_entry(const Grid& g, const Expr& ex, const RawEntry& e) {
  try {
    return sample(g, ex);
  } catch (const EvalError& ee) {
    fail(e.line, "'" + e.key + "': " + ee.what());
  }
}

std::string list_label(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

}  // namespace

RawConfig parse_raw_config(const std::string& text) {
  RawConfig raw;
  raw.sections.push_back(RawSection{"", 0, {}});
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') fail(lineno, "malformed section header '" + t + "'");
      std::string name = trim(t.substr(1, t.size() - 2));
      if (name.empty()) fail(lineno, "empty section name");
      raw.sections.push_back(RawSection{name, lineno, {}});
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) fail(lineno, "expected 'key = value', got '" + t + "'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) fail(lineno, "empty key");
    raw.sections.back().entries.push_back(RawEntry{key, value, lineno});
  }
  return raw;
}

std::string serialize_raw_config(const RawConfig& raw) {
  std::string out;
  for (const auto& s : raw.sections) {
    if (s.name.empty() && s.entries.empty()) continue;
    if (!s.name.empty()) out += "[" + s.name + "]\n";
    for (const auto& e : s.entries) out += e.key + " = " + e.value + "\n";
  }
  return out;
}

std::string override_config_text(const std::string& text, const std::string& dotted_key,
                                 const std::string& value) {
  std::size_t dot = dotted_key.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == dotted_key.size())
    throw ConfigError("override key must have the form section.key");
  std::string section = dotted_key.substr(0, dot);
  std::string key = dotted_key.substr(dot + 1);

  // Optional 1-based index suffix on the section name for repeated sections.
  int want_index = 1;
  std::size_t digits = section.find_last_not_of("0123456789");
  if (digits != std::string::npos && digits + 1 < section.size()) {
    want_index = std::stoi(section.substr(digits + 1));
    section = section.substr(0, digits + 1);
  }

  RawConfig raw = parse_raw_config(text);
  int seen = 0;
  for (auto& s : raw.sections) {
    if (s.name != section) continue;
    if (++seen != want_index) continue;
    for (auto& e : s.entries) {
      if (e.key == key) {
        e.value = value;
        return serialize_raw_config(raw);
      }
    }
    s.entries.push_back(RawEntry{key, value, 0});
    return serialize_raw_config(raw);
  }
  throw ConfigError("override target section [" + section + "] #" +
                    std::to_string(want_index) + " not found");
}

RunConfig parse_config_text(const std::string& text) {
  RawConfig raw = parse_raw_config(text);

  const RawSection* domain = nullptr;
  const RawSection* coeffs = nullptr;
  const RawSection* time_sec = nullptr;
  const RawSection* diag_sec = nullptr;
  const RawSection* output_sec = nullptr;
  const RawSection* probe_sec = nullptr;
  const RawSection* global = nullptr;
  std::vector<const RawSection*> functional_secs;
  std::vector<const RawSection*> ball_secs;

  auto set_singleton = [](const RawSection*& slot, const RawSection& s) {
    if (slot) fail(s.line, "duplicate section [" + s.name + "]");
    slot = &s;
  };

  for (const auto& s : raw.sections) {
    if (s.name.empty()) {
      if (!s.entries.empty()) global = &s;
      continue;
    }
    if (s.name == "domain") set_singleton(domain, s);
    else if (s.name == "coefficients") set_singleton(coeffs, s);
    else if (s.name == "time") set_singleton(time_sec, s);
    else if (s.name == "diagnostics") set_singleton(diag_sec, s);
    else if (s.name == "output") set_singleton(output_sec, s);
    else if (s.name == "probe") set_singleton(probe_sec, s);
    else if (s.name == "functional") functional_secs.push_back(&s);
    else if (s.name == "ball") ball_secs.push_back(&s);
    else fail(s.line, "unknown section [" + s.name + "]");
  }
  if (!domain) throw ConfigError("config is missing the [domain] section");
  if (!coeffs) throw ConfigError("config is missing the [coefficients] section");
  if (!time_sec) throw ConfigError("config is missing the [time] section");

  RunConfig cfg;

  if (global) {
    SectionReader r(*global, {"seed"});
    if (const RawEntry* e = r.find("seed")) cfg.seed = static_cast<std::uint64_t>(parse_long(*e));
  }

  {
    SectionReader r(*domain, {"Lx", "Ly", "nx", "ny"});
    const long nx = parse_long(r.require("nx"));
    const long ny = parse_long(r.require("ny"));
    const double Lx = parse_double(r.require("Lx"));
    const double Ly = parse_double(r.require("Ly"));
    cfg.grid = Grid(static_cast<int>(nx), static_cast<int>(ny), Lx, Ly);
  }

  {
    SectionReader r(*coeffs, {"kappa_expr", "mu_expr", "u0_expr", "v0_expr"});
    const RawEntry& ek = r.require("kappa_expr");
    const RawEntry& em = r.require("mu_expr");
    const RawEntry& eu = r.require("u0_expr");
    const RawEntry& ev = r.require("v0_expr");
    cfg.kappa_expr = ek.value;
    cfg.mu_expr = em.value;
    cfg.u0_expr = eu.value;
    cfg.v0_expr = ev.value;
    Expr xk = parse_expr_entry(ek);
    Expr xm = parse_expr_entry(em);
    Expr xu = parse_expr_entry(eu);
    Expr xv = parse_expr_entry(ev);
    cfg.kappa = sample_entry(cfg.grid, xk, ek);
    cfg.mu = sample_entry(cfg.grid, xm, em);
    cfg.u0 = sample_entry(cfg.grid, xu, eu);
    cfg.v0 = sample_entry(cfg.grid, xv, ev);
    for (int j = 0; j < cfg.grid.ny; ++j)
      for (int i = 0; i < cfg.grid.nx; ++i) {
        if (cfg.mu.at(i, j) < 0.0)
          fail(em.line, "mu violates the nonnegativity hypothesis at cell (" +
                            std::to_string(i) + ", " + std::to_string(j) + ") = (" +
                            format_double(cfg.grid.x(i)) + ", " + format_double(cfg.grid.y(j)) +
                            "): value " + format_double(cfg.mu.at(i, j)));
        if (cfg.u0.at(i, j) < 0.0)
          fail(eu.line, "u0 must be nonnegative; negative at cell (" + std::to_string(i) +
                            ", " + std::to_string(j) + ")");
        if (cfg.v0.at(i, j) < 0.0)
          fail(ev.line, "v0 must be nonnegative; negative at cell (" + std::to_string(i) +
                            ", " + std::to_string(j) + ")");
      }
  }

  {
    SectionReader r(*time_sec, {"T", "tau", "dt_max", "dt_min", "cfl_safety", "u_cap"});
    cfg.T = parse_double(r.require("T"));
    cfg.tau = parse_double(r.require("tau"));
    cfg.stepper.dt_max = r.number("dt_max", cfg.stepper.dt_max);
    cfg.stepper.dt_min = r.number("dt_min", cfg.stepper.dt_min);
    cfg.stepper.cfl_safety = r.number("cfl_safety", cfg.stepper.cfl_safety);
    cfg.stepper.u_cap = r.number("u_cap", cfg.stepper.u_cap);
    if (!(cfg.tau > 0.0 && cfg.tau < cfg.T))
      fail(time_sec->line, "tau must lie strictly between 0 and T");
    validate_stepper(cfg.stepper);
  }

  // Default diagnostic times: quarter marks of [0, T].
  cfg.diag_times = {cfg.T / 4.0, cfg.T / 2.0, 3.0 * cfg.T / 4.0, cfg.T};
  if (diag_sec) {
    SectionReader r(*diag_sec, {"diag_times", "v_norms", "gradv_norms", "tol_quad",
                                "theta_B", "mu_tol"});
    if (const RawEntry* e = r.find("diag_times")) {
      cfg.diag_times = parse_list(*e);
      if (cfg.diag_times.empty()) fail(e->line, "diag_times must not be empty");
      for (double t : cfg.diag_times)
        if (!(t > 0.0 && t <= cfg.T)) fail(e->line, "diag_times must lie in (0, T]");
    }
    if (const RawEntry* e = r.find("v_norms")) cfg.diag.v_norms = parse_list(*e);
    if (const RawEntry* e = r.find("gradv_norms")) cfg.diag.gradv_norms = parse_list(*e);
    cfg.diag.tol_quad = r.number("tol_quad", cfg.diag.tol_quad);
    cfg.diag.theta_B = r.number("theta_B", cfg.diag.theta_B);
    cfg.diag.mu_tol = r.number("mu_tol", cfg.diag.mu_tol);
    for (double s : cfg.diag.v_norms)
      if (!(s >= 1.0)) fail(diag_sec->line, "v_norms entries must be >= 1");
    for (double q : cfg.diag.gradv_norms)
      if (!(q >= 1.0)) fail(diag_sec->line, "gradv_norms entries must be >= 1");
  }

  if (probe_sec) {
    SectionReader r(*probe_sec, {"nx", "ny", "Lx", "Ly", "dt", "steps", "starts",
                                 "budget", "seed"});
    if (const RawEntry* e = r.find("nx")) cfg.probe.nx = static_cast<int>(parse_long(*e));
    if (const RawEntry* e = r.find("ny")) cfg.probe.ny = static_cast<int>(parse_long(*e));
    cfg.probe.Lx = r.number("Lx", cfg.probe.Lx);
    cfg.probe.Ly = r.number("Ly", cfg.probe.Ly);
    cfg.probe.dt = r.number("dt", cfg.probe.dt);
    if (const RawEntry* e = r.find("steps")) cfg.probe.steps = static_cast<int>(parse_long(*e));
    if (const RawEntry* e = r.find("starts")) cfg.probe.starts = static_cast<int>(parse_long(*e));
    if (const RawEntry* e = r.find("budget")) cfg.probe.budget = parse_long(*e);
    if (const RawEntry* e = r.find("seed"))
      cfg.probe.seed = static_cast<std::uint64_t>(parse_long(*e));
    else
      cfg.probe.seed = cfg.seed;
  } else {
    cfg.probe.seed = cfg.seed;
  }

  Expr mu_expr_parsed = Expr::parse(cfg.mu_expr);
  double kappa_inf = 0.0;
  for (double k : cfg.kappa.data) kappa_inf = std::fmax(kappa_inf, std::fabs(k));

  for (const RawSection* fs : functional_secs) {
    SectionReader r(*fs, {"p", "eps", "x0", "y0", "rA", "rV", "eta", "mode", "khat"});
    FunctionalSpec f;
    f.p = parse_double(r.require("p"));
    f.eps = parse_double(r.require("eps"));
    f.cutoff.x0 = parse_double(r.require("x0"));
    f.cutoff.y0 = parse_double(r.require("y0"));
    f.cutoff.rA = parse_double(r.require("rA"));
    f.cutoff.rV = parse_double(r.require("rV"));
    f.cutoff.eta = r.number("eta", 1.0 / (2.0 * (f.p + 1.0)));
    f.cutoff.mode = CutoffMode::radial;
    if (const RawEntry* e = r.find("mode")) {
      if (e->value == "radial") f.cutoff.mode = CutoffMode::radial;
      else if (e->value == "tensor") f.cutoff.mode = CutoffMode::tensor;
      else fail(e->line, "mode must be radial or tensor");
    }
    if (!(f.p > 1.0 && f.p < 2.0)) fail(fs->line, "functional exponent p must lie in (1, 2)");
    f.mu_x0 = mu_expr_parsed.eval(f.cutoff.x0, f.cutoff.y0);
    if (!(f.eps > 0.0 && f.eps < f.mu_x0 / 8.0))
      fail(fs->line, "eps must lie in (0, mu(x0)/8) = (0, " + format_double(f.mu_x0 / 8.0) +
                         ")");
    build_cutoff(f.cutoff, cfg.grid);  // placement errors surface at load

    double k_est = 0.0;
    if (const RawEntry* e = r.find("khat")) {
      k_est = parse_double(*e);
      if (!(k_est > 0.0)) fail(e->line, "khat must be positive");
    } else {
      ProbeConfig pc;
      pc.grid = Grid(cfg.probe.nx, cfg.probe.ny, cfg.probe.Lx, cfg.probe.Ly);
      pc.dt = cfg.probe.dt;
      pc.steps = cfg.probe.steps;
      pc.seed = cfg.probe.seed;
      pc.starts = cfg.probe.starts;
      pc.budget = cfg.probe.budget;
      k_est = estimate_K(f.p + 1.0, f.p + 1.0, pc).K_hat;
    }
    f.bound_const_p1 = weighted_bound_constant(f.p + 1.0, k_est);
    f.margin = admissibility_margin(f.mu_x0, f.eps, f.p, kappa_inf, cfg.T, f.bound_const_p1);
    if (f.margin < 0.0)
      std::cerr << "warning: functional at (" << f.cutoff.x0 << ", " << f.cutoff.y0
                << ") has negative admissibility margin " << f.margin
                << " (estimate-based, advisory)\n";
    cfg.diag.functionals.push_back(std::move(f));
  }

  for (const RawSection* bs : ball_secs) {
    SectionReader r(*bs, {"cx", "cy", "radius", "grad_exps", "lap_exps"});
    BallSpec b;
    b.cx = parse_double(r.require("cx"));
    b.cy = parse_double(r.require("cy"));
    b.radius = parse_double(r.require("radius"));
    if (!(b.radius > 0.0)) fail(bs->line, "ball radius must be positive");
    if (const RawEntry* e = r.find("grad_exps")) b.grad_exps = parse_list(*e);
    if (const RawEntry* e = r.find("lap_exps")) b.lap_exps = parse_list(*e);
    for (double a : b.grad_exps)
      if (!(a >= 1.0)) fail(bs->line, "grad_exps entries must be >= 1");
    for (double rr : b.lap_exps)
      if (!(rr >= 1.0)) fail(bs->line, "lap_exps entries must be >= 1");
    cfg.diag.balls.push_back(std::move(b));
  }

  if (output_sec) {
    SectionReader r(*output_sec, {"dir", "csv", "snapshot_times", "heatmaps"});
    if (const RawEntry* e = r.find("dir")) cfg.output.dir = e->value;
    if (const RawEntry* e = r.find("csv")) cfg.output.csv = e->value;
    if (const RawEntry* e = r.find("snapshot_times")) {
      cfg.output.snapshot_times = parse_list(*e);
      for (double t : cfg.output.snapshot_times)
        if (!(t > 0.0 && t <= cfg.T)) fail(e->line, "snapshot_times must lie in (0, T]");
    }
    if (const RawEntry* e = r.find("heatmaps")) cfg.output.heatmaps = parse_bool(*e);
  }

  validate_problem(cfg.problem());
  if (max_value(cfg.u0) >= cfg.stepper.u_cap)
    throw ConfigError("u_cap must exceed the initial sup norm of u0");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

ProblemSpec RunConfig::problem() const {
  ProblemSpec p;
  p.grid = grid;
  p.kappa = kappa;
  p.mu = mu;
  p.u0 = u0;
  p.v0 = v0;
  p.T = T;
  p.tau = tau;
  return p;
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> kv;
  auto add = [&](const std::string& k, const std::string& v) { kv.emplace_back(k, v); };
  add("seed", std::to_string(seed));
  add("domain.Lx", format_double(grid.Lx));
  add("domain.Ly", format_double(grid.Ly));
  add("domain.nx", std::to_string(grid.nx));
  add("domain.ny", std::to_string(grid.ny));
  add("coefficients.kappa_expr", kappa_expr);
  add("coefficients.mu_expr", mu_expr);
  add("coefficients.u0_expr", u0_expr);
  add("coefficients.v0_expr", v0_expr);
  add("time.T", format_double(T));
  add("time.tau", format_double(tau));
  add("time.dt_max", format_double(stepper.dt_max));
  add("time.dt_min", format_double(stepper.dt_min));
  add("time.cfl_safety", format_double(stepper.cfl_safety));
  add("time.u_cap", format_double(stepper.u_cap));
  add("diagnostics.diag_times", list_label(diag_times));
  add("diagnostics.v_norms", list_label(diag.v_norms));
  add("diagnostics.gradv_norms", list_label(diag.gradv_norms));
  add("diagnostics.tol_quad", format_double(diag.tol_quad));
  add("diagnostics.theta_B", format_double(diag.theta_B));
  add("diagnostics.mu_tol", format_double(diag.mu_tol));
  for (std::size_t k = 0; k < diag.functionals.size(); ++k) {
    const FunctionalSpec& f = diag.functionals[k];
    const std::string base = "functional" + std::to_string(k + 1) + ".";
    add(base + "p", format_double(f.p));
    add(base + "eps", format_double(f.eps));
    add(base + "x0", format_double(f.cutoff.x0));
    add(base + "y0", format_double(f.cutoff.y0));
    add(base + "rA", format_double(f.cutoff.rA));
    add(base + "rV", format_double(f.cutoff.rV));
    add(base + "eta", format_double(f.cutoff.eta));
    add(base + "mode", f.cutoff.mode == CutoffMode::radial ? "radial" : "tensor");
    add(base + "mu_x0", format_double(f.mu_x0));
    add(base + "bound_const", format_double(f.bound_const_p1));
    add(base + "margin", format_double(f.margin));
  }
  for (std::size_t k = 0; k < diag.balls.size(); ++k) {
    const BallSpec& b = diag.balls[k];
    const std::string base = "ball" + std::to_string(k + 1) + ".";
    add(base + "cx", format_double(b.cx));
    add(base + "cy", format_double(b.cy));
    add(base + "radius", format_double(b.radius));
    add(base + "grad_exps", list_label(b.grad_exps));
    add(base + "lap_exps", list_label(b.lap_exps));
  }
  add("output.dir", output.dir);
  add("output.csv", output.csv);
  add("output.snapshot_times", list_label(output.snapshot_times));
  add("output.heatmaps", output.heatmaps ? "true" : "false");
  add("probe.nx", std::to_string(probe.nx));
  add("probe.ny", std::to_string(probe.ny));
  add("probe.Lx", format_double(probe.Lx));
  add("probe.Ly", format_double(probe.Ly));
  add("probe.dt", format_double(probe.dt));
  add("probe.steps", std::to_string(probe.steps));
  add("probe.starts", std::to_string(probe.starts));
  add("probe.budget", std::to_string(probe.budget));
  add("probe.seed", std::to_string(probe.seed));
  return kv;
}

}  // namespace chemoloc
