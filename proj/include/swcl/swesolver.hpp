#pragma once
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "chartuple.hpp"
#include "grid.hpp"
#include "topography.hpp"

// method-of-lines integrator for the shallow water system and the conservation audit
namespace swcl {

struct Tendency {
  Field u, v, h;
};

struct BottomFields {
  Field bx, by;
};

inline BottomFields sample_bottom(const Grid& g, const Topography& topo) {
  BottomFields out{Field(g.nx, g.ny), Field(g.nx, g.ny)};
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      BVal b = topo.eval(g.x(i), g.y(j));
      out.bx(i, j) = b.bx;
      out.by(i, j) = b.by;
    }
  return out;
}

// 4th-order differences; h in flux form so the periodic sum of h_t telescopes
inline Tendency rhs(const SimState& s, const BottomFields& b) {
  if ((s.h <= 0).any()) fail(ErrorKind::state, "depth lost positivity at t = " + std::to_string(s.t));
  const Grid& g = s.grid;
  auto Dx = [&](const Field& f) { return d_dx(g, f, 4); };
  auto Dy = [&](const Field& f) { return d_dy(g, f, 4); };
  return {-s.u * Dx(s.u) - s.v * Dy(s.u) - Dx(s.h) + b.bx, -s.u * Dx(s.v) - s.v * Dy(s.v) - Dy(s.h) + b.by,
          -Dx(s.u * s.h) - Dy(s.v * s.h)};
}

inline Tendency rhs(const SimState& s, const Topography& topo) { return rhs(s, sample_bottom(s.grid, topo)); }

inline double cfl_limit(const SimState& s) {
  Field c = s.h.max(0).sqrt();
  double speed = std::max((s.u.abs() + c).maxCoeff(), (s.v.abs() + c).maxCoeff());
  return 0.5 * std::min(s.grid.dx, s.grid.dy) / std::max(speed, 1e-300);
}

inline SimState step_rk4(const SimState& s, const BottomFields& b, double dt) {
  if (!(dt > 0)) fail(ErrorKind::configuration, "time step must be positive");
  double lim = cfl_limit(s);
  if (dt > lim) fail(ErrorKind::configuration, "dt = " + std::to_string(dt) + " exceeds CFL bound " + std::to_string(lim));
  auto add = [&](const SimState& a, const Tendency& k, double w) {
    return SimState{a.grid, a.u + w * k.u, a.v + w * k.v, a.h + w * k.h, a.t + w};
  };
  Tendency k1 = rhs(s, b);
  Tendency k2 = rhs(add(s, k1, 0.5 * dt), b);
  Tendency k3 = rhs(add(s, k2, 0.5 * dt), b);
  Tendency k4 = rhs(add(s, k3, dt), b);
  SimState out = s;
  out.u += dt / 6 * (k1.u + 2 * k2.u + 2 * k3.u + k4.u);
  out.v += dt / 6 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
  out.h += dt / 6 * (k1.h + 2 * k2.h + 2 * k3.h + k4.h);
  out.t = s.t + dt;
  return out;
}

inline SimState step_rk4(const SimState& s, const Topography& topo, double dt) {
  return step_rk4(s, sample_bottom(s.grid, topo), dt);
}

struct AuditRecord {
  CharTuple tuple;
  std::vector<double> t;
  std::vector<double> integral;       // area integral of C1
  std::vector<double> boundary_flux;  // outward flux of (C2, C3); 0 on periodic grids
  std::vector<double> residual;       // d/dt integral + flux, 5-point centred; NaN at two samples per end

  double max_residual() const {
    double m = 0;
    for (double r : residual)
      if (std::isfinite(r)) m = std::max(m, std::abs(r));
    return m;
  }
  double relative_drift() const {
    double m = 0, ref = std::abs(integral.front());
    for (double I : integral) m = std::max(m, std::abs(I - integral.front()));
    return ref > 0 ? m / ref : m;
  }
};

struct AuditOptions {
  double smooth_guard = 50;  // stop once max |grad h| exceeds this
};

struct AuditResult {
  std::vector<AuditRecord> records;
  SimState final_state;
  int steps = 0;
  bool stopped_by_guard = false;
};

namespace detail {

struct CurrentSample {
  double integral = 0, flux = 0;
};

// periodic: plain sum (spectral for smooth periodic data); audited: Gregory end
// corrections (weights 3/8, 7/6, 23/24) on the area and on each boundary line, 4th order
inline double gregory_weight(int i, int n) {
  int k = std::min(i, n - 1 - i);
  return k == 0 ? 3.0 / 8 : (k == 1 ? 7.0 / 6 : (k == 2 ? 23.0 / 24 : 1.0));
}

inline CurrentSample integrate_current(const CharTuple& ct, const Topography& topo, const SimState& s) {
  const Grid& g = s.grid;
  Field C1(g.nx, g.ny), C2(g.nx, g.ny), C3(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      auto c = eval_current(ct, topo, {s.t, g.x(i), g.y(j), s.u(i, j), s.v(i, j), s.h(i, j)});
      C1(i, j) = c[0], C2(i, j) = c[1], C3(i, j) = c[2];
    }
  CurrentSample out;
  if (g.mode == Boundary::periodic) {
    out.integral = C1.sum() * g.dx * g.dy;
    return out;
  }
  auto wx = [&](int i) { return gregory_weight(i, g.nx); };
  auto wy = [&](int j) { return gregory_weight(j, g.ny); };
  double area = 0, flux = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) area += wx(i) * wy(j) * C1(i, j);
  for (int j = 0; j < g.ny; ++j) flux += wy(j) * (C2(g.nx - 1, j) - C2(0, j)) * g.dy;
  for (int i = 0; i < g.nx; ++i) flux += wx(i) * (C3(i, g.ny - 1) - C3(i, 0)) * g.dx;
  out.integral = area * g.dx * g.dy;
  out.flux = flux;
  return out;
}

}  // namespace detail

// integrates to T with fixed dt and records, per tuple, the balance of its current
inline AuditResult run_audit(const SimState& init, const Topography& topo, const std::vector<CharTuple>& basis,
                             double T, double dt, const AuditOptions& opt = {}) {
  init.grid.validate();
  if (!(T > 0) || !(dt > 0)) fail(ErrorKind::configuration, "T and dt must be positive");
  const int n = static_cast<int>(std::llround(T / dt));
  if (std::abs(n * dt - T) > 1e-9 * T) fail(ErrorKind::configuration, "T must be a whole number of steps");
  AuditResult res;
  res.records.resize(basis.size());
  for (size_t k = 0; k < basis.size(); ++k) res.records[k].tuple = basis[k];
  auto bottom = sample_bottom(init.grid, topo);
  auto record = [&](const SimState& s) {
    for (size_t k = 0; k < basis.size(); ++k) {
      auto c = detail::integrate_current(basis[k], topo, s);
      auto& r = res.records[k];
      r.t.push_back(s.t);
      r.integral.push_back(c.integral);
      r.boundary_flux.push_back(c.flux);
    }
  };
  SimState s = init;
  record(s);
  for (int i = 0; i < n; ++i) {
    double grad = std::max(d_dx(s.grid, s.h, 4).abs().maxCoeff(), d_dy(s.grid, s.h, 4).abs().maxCoeff());
    if (grad > opt.smooth_guard) {
      res.stopped_by_guard = true;
      break;
    }
    s = step_rk4(s, bottom, dt);
    ++res.steps;
    record(s);
  }
  for (auto& r : res.records) {
    const size_t m = r.integral.size();
    r.residual.assign(m, std::nan(""));
    const auto& I = r.integral;
    for (size_t i = 2; i + 2 < m; ++i)
      r.residual[i] = (I[i - 2] - 8 * I[i - 1] + 8 * I[i + 1] - I[i + 2]) / (12 * dt) + r.boundary_flux[i];
  }
  res.final_state = std::move(s);
  return res;
}

// smooth localized test flow: off-centre depth bump plus two velocity blobs
inline SimState gaussian_state(const Grid& g, double amp = 0.2) {
  auto blob = [](double x, double y, double cx, double cy, double w) {
    return std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (w * w));
  };
  return {g, g.sample([&](double x, double y) { return 0.5 * amp * blob(x, y, 0, 0.3, 0.8); }),
          g.sample([&](double x, double y) { return -0.25 * amp * blob(x, y, -0.4, 0, 0.8); }),
          g.sample([&](double x, double y) { return 1 + amp * blob(x, y, 0.3, 0, 0.7); }), 0};
}

}  // namespace swcl
