#include "chemoloc/field_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace chemoloc {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_grid(std::ostream& os, const Field& f) {
  const Grid& g = f.grid;
  os << "FIELD " << g.nx << ' ' << g.ny << ' ' << format_double(g.Lx) << ' '
     << format_double(g.Ly) << '\n';
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (i) os << ' ';
      os << format_double(f.at(i, j));
    }
    os << '\n';
  }
}

void write_text_grid(const std::string& path, const Field& f) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open '" + path + "' for writing");
  write_text_grid(os, f);
  if (!os) throw ConfigError("write to '" + path + "' failed");
}

Field read_text_grid(std::istream& is) {
  std::string tag;
  int nx = 0, ny = 0;
  double Lx = 0.0, Ly = 0.0;
  if (!(is >> tag) || tag != "FIELD")
    throw ConfigError("text grid: expected header starting with FIELD");
  if (!(is >> nx >> ny >> Lx >> Ly))
    throw ConfigError("text grid: malformed header");
  Grid g(nx, ny, Lx, Ly);
  Field f(g);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!(is >> f.at(i, j)))
        throw ConfigError("text grid: missing value at row " + std::to_string(j) +
                          ", column " + std::to_string(i));
    }
  }
  return f;
}

Field read_text_grid(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open '" + path + "'");
  return read_text_grid(is);
}

void write_pgm(std::ostream& os, const Field& f) {
  const Grid& g = f.grid;
  const double lo = min_value(f);
  const double hi = max_value(f);
  const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
  os << "P5\n" << g.nx << ' ' << g.ny << "\n255\n";
  std::string row(static_cast<std::size_t>(g.nx), '\0');
  for (int j = g.ny - 1; j >= 0; --j) {
    for (int i = 0; i < g.nx; ++i) {
      double t = (f.at(i, j) - lo) * scale;
      int q = static_cast<int>(std::lround(t));
      if (q < 0) q = 0;
      if (q > 255) q = 255;
      row[static_cast<std::size_t>(i)] = static_cast<char>(static_cast<unsigned char>(q));
    }
    os.write(row.data(), g.nx);
  }
}

void write_pgm(const std::string& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open '" + path + "' for writing");
  write_pgm(os, f);
  if (!os) throw ConfigError("write to '" + path + "' failed");
}

void write_metadata(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open '" + path + "' for writing");
  for (const auto& [k, v] : entries) os << k << '=' << v << '\n';
  if (!os) throw ConfigError("write to '" + path + "' failed");
}

}  // namespace chemoloc
