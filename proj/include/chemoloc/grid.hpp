#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "chemoloc/errors.hpp"
#include "chemoloc/expr.hpp"

namespace chemoloc {

// Cell-centered uniform grid on [0,Lx] x [0,Ly] with nx*ny cells.
// Cell (i,j) has center ((i+1/2)hx, (j+1/2)hy); i runs along x, j along y.
struct Grid {
  int nx = 0, ny = 0;
  double Lx = 0.0, Ly = 0.0;
  double hx = 0.0, hy = 0.0;

  Grid() = default;
  Grid(int nx_, int ny_, double Lx_, double Ly_);

  double x(int i) const { return (i + 0.5) * hx; }
  double y(int j) const { return (j + 0.5) * hy; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }

  bool operator==(const Grid& o) const {
    return nx == o.nx && ny == o.ny && Lx == o.Lx && Ly == o.Ly;
  }
};

// Scalar field sampled at cell centers, stored row-major (j*nx + i).
struct Field {
  Grid grid;
  std::vector<double> data;

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0) : grid(g), data(g.size(), fill) {}

  double& at(int i, int j) { return data[grid.idx(i, j)]; }
  double at(int i, int j) const { return data[grid.idx(i, j)]; }
};

// Samples an expression at every cell center. Throws EvalError if the
// expression is not finite somewhere on the grid.
Field sample(const Grid& g, const Expr& e);

// Five-point Laplacian with mirror ghost cells (f_{-1} = f_0), the discrete
// form of the homogeneous Neumann condition. Cosine modes cos(k pi x / Lx)
// sampled at centers are exact eigenvectors, including boundary cells.
Field laplacian(const Field& f);

// Central-difference gradient components at cell centers with mirror ghosts;
// at a boundary cell the stencil degenerates to (f_1 - f_0) / (2h).
void gradient_centers(const Field& f, Field& gx, Field& gy);

// Pointwise Euclidean magnitude of a two-component field.
Field magnitude(const Field& gx, const Field& gy);

// Midpoint quadrature: hx*hy * sum of cell values, accumulated in a fixed
// scan order so results are bit-reproducible.
double integrate(const Field& f);

// (integral of |f|^p)^(1/p) by midpoint quadrature; requires p >= 1.
double lp_norm(const Field& f, double p);

struct MaskedIntegral {
  double value = 0.0;  // integral of |f|^p over the masked cells
  long cells = 0;      // number of cells whose center lies in the ball
};

// Integral of |f|^p over cells whose center satisfies
// (x-cx)^2 + (y-cy)^2 <= radius^2. cells == 0 means the mask is empty
// (ball too small for the grid); the integral is then 0 and the caller
// decides how to report it.
MaskedIntegral masked_integrate(const Field& f, double cx, double cy, double radius, double p);

struct ArgMax {
  int i = 0, j = 0;
  double value = 0.0;
  double x = 0.0, y = 0.0;
};

// Maximum value and its cell; ties resolve to the first cell in scan order.
ArgMax argmax(const Field& f);

double min_value(const Field& f);
double max_value(const Field& f);

// Eigenvalue of the mirror-ghost Laplacian for the x-direction cosine mode
// of index k: (2/hx^2) * (1 - cos(k pi hx / Lx)).
double cosine_mode_eigenvalue(double h, double L, int k);

}  // namespace chemoloc
