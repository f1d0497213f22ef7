#include "chemoloc/grid.hpp"

#include <cmath>

namespace chemoloc {

Grid::Grid(int nx_, int ny_, double Lx_, double Ly_)
    : nx(nx_), ny(ny_), Lx(Lx_), Ly(Ly_) {
  if (nx < 4 || ny < 4)
    throw ConfigError("grid must have at least 4 cells per direction");
  if (!(Lx > 0.0) || !(Ly > 0.0))
    throw ConfigError("domain side lengths must be positive");
  hx = Lx / nx;
  hy = Ly / ny;
}

Field sample(const Grid& g, const Expr& e) {
  Field f(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) f.at(i, j) = e.eval(g.x(i), g.y(j));
  return f;
}

Field laplacian(const Field& f) {
  const Grid& g = f.grid;
  Field out(g);
  const double ihx2 = 1.0 / (g.hx * g.hx);
  const double ihy2 = 1.0 / (g.hy * g.hy);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double c = f.at(i, j);
      const double xm = i > 0 ? f.at(i - 1, j) : c;
      const double xp = i < g.nx - 1 ? f.at(i + 1, j) : c;
      const double ym = j > 0 ? f.at(i, j - 1) : c;
      const double yp = j < g.ny - 1 ? f.at(i, j + 1) : c;
      out.at(i, j) = (xp - 2.0 * c + xm) * ihx2 + (yp - 2.0 * c + ym) * ihy2;
    }
  }
  return out;
}

void gradient_centers(const Field& f, Field& gx, Field& gy) {
  const Grid& g = f.grid;
  gx = Field(g);
  gy = Field(g);
  const double i2hx = 1.0 / (2.0 * g.hx);
  const double i2hy = 1.0 / (2.0 * g.hy);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double c = f.at(i, j);
      const double xm = i > 0 ? f.at(i - 1, j) : c;
      const double xp = i < g.nx - 1 ? f.at(i + 1, j) : c;
      const double ym = j > 0 ? f.at(i, j - 1) : c;
      const double yp = j < g.ny - 1 ? f.at(i, j + 1) : c;
      gx.at(i, j) = (xp - xm) * i2hx;
      gy.at(i, j) = (yp - ym) * i2hy;
    }
  }
}

Field magnitude(const Field& gx, const Field& gy) {
  if (!(gx.grid == gy.grid))
    throw ConfigError("magnitude: component grids differ");
  Field out(gx.grid);
  for (std::size_t n = 0; n < out.data.size(); ++n)
    out.data[n] = std::sqrt(gx.data[n] * gx.data[n] + gy.data[n] * gy.data[n]);
  return out;
}

double integrate(const Field& f) {
  double s = 0.0;
  for (double v : f.data) s += v;
  return s * f.grid.hx * f.grid.hy;
}

double lp_norm(const Field& f, double p) {
  if (!(p >= 1.0)) throw ConfigError("lp_norm requires p >= 1");
  double s = 0.0;
  for (double v : f.data) s += std::pow(std::fabs(v), p);
  return std::pow(s * f.grid.hx * f.grid.hy, 1.0 / p);
}

MaskedIntegral masked_integrate(const Field& f, double cx, double cy, double radius,
                                double p) {
  const Grid& g = f.grid;
  const double r2 = radius * radius;
  MaskedIntegral out;
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    const double dy = g.y(j) - cy;
    for (int i = 0; i < g.nx; ++i) {
      const double dx = g.x(i) - cx;
      if (dx * dx + dy * dy <= r2) {
        s += std::pow(std::fabs(f.at(i, j)), p);
        ++out.cells;
      }
    }
  }
  out.value = s * g.hx * g.hy;
  return out;
}

ArgMax argmax(const Field& f) {
  const Grid& g = f.grid;
  ArgMax best;
  best.value = f.at(0, 0);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (f.at(i, j) > best.value) {
        best.value = f.at(i, j);
        best.i = i;
        best.j = j;
      }
    }
  }
  best.x = g.x(best.i);
  best.y = g.y(best.j);
  return best;
}

double min_value(const Field& f) {
  double m = f.data[0];
  for (double v : f.data)
    if (v < m) m = v;
  return m;
}

double max_value(const Field& f) {
  double m = f.data[0];
  for (double v : f.data)
    if (v > m) m = v;
  return m;
}

double cosine_mode_eigenvalue(double h, double L, int k) {
  return 2.0 / (h * h) * (1.0 - std::cos(k * M_PI * h / L));
}

}  // namespace chemoloc
