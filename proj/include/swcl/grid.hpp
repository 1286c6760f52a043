#pragma once
#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "errors.hpp"

// uniform 2D grids, nodal fields and high-order differences
namespace swcl {

using Field = Eigen::ArrayXXd;  // (i, j) = (x index, y index)

enum class Boundary { periodic, audited };

struct Grid {
  int nx = 64, ny = 64;
  double dx = 0.1, dy = 0.1;
  double x0 = 0, y0 = 0;
  Boundary mode = Boundary::periodic;

  double x(int i) const { return x0 + i * dx; }
  double y(int j) const { return y0 + j * dy; }
  void validate() const {
    if (nx < 16 || ny < 16) fail(ErrorKind::configuration, "grid needs at least 16 nodes per direction");
    if (!(dx > 0 && dy > 0)) fail(ErrorKind::configuration, "grid spacing must be positive");
  }
  // periodic grids have n cells over the period; audited grids include both end nodes
  static Grid periodic(int nx, int ny, double x0, double x1, double y0, double y1) {
    Grid g{nx, ny, (x1 - x0) / nx, (y1 - y0) / ny, x0, y0, Boundary::periodic};
    g.validate();
    return g;
  }
  static Grid audited(int nx, int ny, double x0, double x1, double y0, double y1) {
    Grid g{nx, ny, (x1 - x0) / (nx - 1), (y1 - y0) / (ny - 1), x0, y0, Boundary::audited};
    g.validate();
    return g;
  }
  Field sample(const std::function<double(double, double)>& f) const {
    Field out(nx, ny);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) out(i, j) = f(x(i), y(j));
    return out;
  }
};

namespace detail {

// first derivative along one index of a strided line; periodic lines use central
// differences of the given order (4 or 8), open lines 4th order with one-sided ends
inline void diff_line(const double* f, double* out, int n, long stride, double h, bool periodic, int order) {
  if (order != 4 && order != 8) fail(ErrorKind::parameter, "difference order must be 4 or 8");
  auto F = [&](int i) { return f[i * stride]; };
  if (periodic) {
    static constexpr double w8[4] = {4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
    static constexpr double w4[2] = {2.0 / 3, -1.0 / 12};
    const double* w = order == 8 ? w8 : w4;
    const int m = order == 8 ? 4 : 2;
    for (int i = 0; i < n; ++i) {
      double acc = 0;
      for (int k = 1; k <= m; ++k) acc += w[k - 1] * (F((i + k) % n) - F((i - k + 4 * n) % n));
      out[i * stride] = acc / h;
    }
    return;
  }
  const double c = 1.0 / (12 * h);
  for (int i = 2; i < n - 2; ++i) out[i * stride] = c * (F(i - 2) - 8 * F(i - 1) + 8 * F(i + 1) - F(i + 2));
  out[0] = c * (-25 * F(0) + 48 * F(1) - 36 * F(2) + 16 * F(3) - 3 * F(4));
  out[stride] = c * (-3 * F(0) - 10 * F(1) + 18 * F(2) - 6 * F(3) + F(4));
  int a = n - 1, b = n - 2;
  out[a * stride] = -c * (-25 * F(a) + 48 * F(a - 1) - 36 * F(a - 2) + 16 * F(a - 3) - 3 * F(a - 4));
  out[b * stride] = -c * (-3 * F(a) - 10 * F(a - 1) + 18 * F(a - 2) - 6 * F(a - 3) + F(a - 4));
}

}  // namespace detail

// default order 8: nested differences (vorticity, then R'(q)) eat accuracy fast
inline Field d_dx(const Grid& g, const Field& f, int order = 8) {
  Field out(f.rows(), f.cols());
  for (int j = 0; j < g.ny; ++j)
    detail::diff_line(&f(0, j), &out(0, j), g.nx, 1, g.dx, g.mode == Boundary::periodic, order);
  return out;
}

inline Field d_dy(const Grid& g, const Field& f, int order = 8) {
  Field out(f.rows(), f.cols());
  for (int i = 0; i < g.nx; ++i)
    detail::diff_line(&f(i, 0), &out(i, 0), g.ny, f.rows(), g.dy, g.mode == Boundary::periodic, order);
  return out;
}

struct SimState {
  Grid grid;
  Field u, v, h;
  double t = 0;
};

}  // namespace swcl
