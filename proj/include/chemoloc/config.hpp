#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "chemoloc/diagnostics.hpp"
#include "chemoloc/solver.hpp"

namespace chemoloc {

// Raw sectioned key=value file: '#' or ';' comment lines, [section] headers,
// key = value entries. Every section header opens a new instance, so
// [functional] and [ball] may repeat; singleton sections may not.
struct RawEntry {
  std::string key, value;
  int line = 0;
};
struct RawSection {
  std::string name;  // "" for keys before the first header
  int line = 0;
  std::vector<RawEntry> entries;
};
struct RawConfig {
  std::vector<RawSection> sections;
};

RawConfig parse_raw_config(const std::string& text);
std::string serialize_raw_config(const RawConfig& raw);

// Replaces (or appends) one value addressed as "section.key"; a repeated
// section is addressed by a 1-based suffix ("functional2.eps"). Used by
// sweeps to vary a single knob.
std::string override_config_text(const std::string& text, const std::string& dotted_key,
                                 const std::string& value);

// Probe discretization used to estimate the admissibility margin of each
// functional at load time.
struct ProbeSettings {
  int nx = 8, ny = 8;
  double Lx = 1.0, Ly = 1.0;
  double dt = 2.5e-3;
  int steps = 16;
  int starts = 3;
  long budget = 240;
  std::uint64_t seed = 1;
};

struct OutputConfig {
  std::string dir = "out";
  std::string csv = "diagnostics.csv";
  std::vector<double> snapshot_times;
  bool heatmaps = false;
};

// Fully validated run configuration. All derived objects (sampled fields,
// cutoffs, admissibility margins) are constructed at load so that every
// failure is a load-time failure.
struct RunConfig {
  Grid grid;
  std::string kappa_expr, mu_expr, u0_expr, v0_expr;
  Field kappa, mu, u0, v0;
  double T = 0.0, tau = 0.0;
  StepperConfig stepper;
  std::vector<double> diag_times;
  DiagnosticsConfig diag;
  OutputConfig output;
  ProbeSettings probe;
  std::uint64_t seed = 1;

  ProblemSpec problem() const;
  // Effective configuration (defaults filled in) as ordered key=value pairs,
  // embedded into every output file.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace chemoloc
