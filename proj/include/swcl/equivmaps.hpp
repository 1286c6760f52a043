#pragma once
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "charspace.hpp"
#include "equiv.hpp"
#include "swesolver.hpp"

// admissible point maps between systems of the class and their numerical checks
namespace swcl {

using D6 = Dual<6>;
using State6 = std::array<double, 6>;  // (t, x, y, u, v, h)

struct PointMap {
  std::string name;
  std::function<std::array<D6, 6>(const std::array<D6, 6>&)> fwd;
  std::function<bool(double)> valid_at = [](double) { return true; };
  std::string validity = "everywhere";
  std::function<void(const Topography&)> check_source = [](const Topography&) {};
  // bottom of the target system, read off at t = 0
  std::function<Topography(const Topography&)> image;

  std::array<D6, 6> apply(const std::array<D6, 6>& s) const {
    if (!valid_at(s[0].v)) fail(ErrorKind::domain, name + " undefined at t = " + std::to_string(s[0].v) + " (" + validity + ")");
    return fwd(s);
  }
  State6 operator()(const State6& s) const {
    std::array<D6, 6> z;
    for (int i = 0; i < 6; ++i) z[i] = D6(s[i]);
    auto r = apply(z);
    return {r[0].v, r[1].v, r[2].v, r[3].v, r[4].v, r[5].v};
  }
  Topography target(const Topography& src) const {
    check_source(src);
    return image(src);
  }
};

enum class MapKind { T1, T2, T3, T3_swapped };

inline std::string map_name(MapKind k) {
  switch (k) {
    case MapKind::T1: return "T1";
    case MapKind::T2: return "T2";
    case MapKind::T3: return "T3";
    case MapKind::T3_swapped: return "T3xy";
  }
  return "?";
}

inline MapKind parse_map(const std::string& s) {
  if (s == "T1") return MapKind::T1;
  if (s == "T2") return MapKind::T2;
  if (s == "T3") return MapKind::T3;
  if (s == "T3xy" || s == "T3s") return MapKind::T3_swapped;
  fail(ErrorKind::parameter, "unknown map '" + s + "' (T1, T2, T3, T3xy)");
}

namespace detail {

inline Topography swapped_bottom(const Topography& src) {
  Topography base = src;
  auto fn = [base](double x, double y) {
    BVal b = base.eval_unchecked(y, x);
    return BVal{b.b, b.by, b.bx};
  };
  std::vector<Locus> sing;
  for (Locus l : src.singular()) {
    std::swap(l.p.x, l.p.y);
    std::swap(l.dir.x, l.dir.y);
    sing.push_back(l);
  }
  Topography out(fn, sing, src.accuracy(), "swap(" + src.label() + ")", src.exclusion());
  out.set_center({src.center().y, src.center().x}).set_grid_error(src.grid_error());
  if (src.domain()) {
    const Box& d = *src.domain();
    out.set_domain({d.y0, d.y1, d.x0, d.x1});
  }
  return out;
}

// g(lam X) = lam^p g(X) at sample points, g = b + a
inline void require_homogeneous(const Topography& src, std::function<double(double, double)> a, double p,
                                const std::string& what) {
  const double lam = 1.3;
  int used = 0;
  for (const auto& q : sample_points(src, default_plan(src, 48, 5))) {
    if (!src.admissible(lam * q.x, lam * q.y)) continue;
    double g0 = src.eval(q.x, q.y).b + a(q.x, q.y), g1 = src.eval(lam * q.x, lam * q.y).b + a(lam * q.x, lam * q.y);
    if (std::abs(g1 - std::pow(lam, p) * g0) > 1e-8 * (1 + std::abs(g0)))
      fail(ErrorKind::precondition, "bottom is not of the form " + what);
    ++used;
  }
  if (used < 8) fail(ErrorKind::precondition, "too few admissible points to check the form " + what);
}

// g(X + s e) = g(X), g = b - lin
inline void require_translation(const Topography& src, bool along_x, const std::string& what) {
  const double s = 0.7;
  int used = 0;
  for (const auto& q : sample_points(src, default_plan(src, 48, 6))) {
    double x2 = q.x + (along_x ? s : 0), y2 = q.y + (along_x ? 0 : s);
    if (!src.admissible(x2, y2)) continue;
    double g0 = src.eval(q.x, q.y).b - (along_x ? q.x : q.y), g1 = src.eval(x2, y2).b - (along_x ? x2 : y2);
    if (std::abs(g1 - g0) > 1e-8 * (1 + std::abs(g0))) fail(ErrorKind::precondition, "bottom is not of the form " + what);
    ++used;
  }
  if (used < 8) fail(ErrorKind::precondition, "too few admissible points to check the form " + what);
}

}  // namespace detail

inline PointMap admissible_map(MapKind kind) {
  PointMap m;
  m.name = map_name(kind);
  switch (kind) {
    case MapKind::T1:
      m.fwd = [](const std::array<D6, 6>& s) {
        D6 c = cos(s[0]), sn = sin(s[0]);
        return std::array<D6, 6>{tan(s[0]), s[1] / c, s[2] / c, s[3] * c + s[1] * sn, s[4] * c + s[2] * sn, s[5] * c * c};
      };
      m.valid_at = [](double t) { return std::abs(std::cos(t)) > 1e-9; };
      m.validity = "cos t != 0";
      m.check_source = [](const Topography& b) {
        detail::require_homogeneous(b, [](double x, double y) { return 0.5 * (x * x + y * y); }, -2,
                                    "r^-2 f(phi) - r^2/2");
      };
      m.image = [](const Topography& b) {
        return b.plus([](double x, double y) { return BVal{0.5 * (x * x + y * y), x, y}; }, "+ r^2/2");
      };
      break;
    case MapKind::T2:
      m.fwd = [](const std::array<D6, 6>& s) {
        D6 e = exp(s[0]), ei = exp(-s[0]);
        return std::array<D6, 6>{0.5 * e * e, e * s[1], e * s[2], ei * (s[3] + s[1]), ei * (s[4] + s[2]), ei * ei * s[5]};
      };
      m.check_source = [](const Topography& b) {
        detail::require_homogeneous(b, [](double x, double y) { return -0.5 * (x * x + y * y); }, -2,
                                    "r^-2 f(phi) + r^2/2");
      };
      m.image = [](const Topography& b) {
        return b.plus([](double x, double y) { return BVal{-0.5 * (x * x + y * y), -x, -y}; }, "- r^2/2");
      };
      break;
    case MapKind::T3:
      // source b = f(y) + x
      m.fwd = [](const std::array<D6, 6>& s) {
        return std::array<D6, 6>{s[0], s[1] - 0.5 * s[0] * s[0], s[2], s[3] - s[0], s[4], s[5]};
      };
      m.check_source = [](const Topography& b) { detail::require_translation(b, true, "f(y) + x"); };
      m.image = [](const Topography& b) {
        return b.plus([](double x, double) { return BVal{-x, -1, 0}; }, "- x");
      };
      break;
    case MapKind::T3_swapped:
      // source b = f(x) + y: swap (x,u) <-> (y,v), then T3
      m.fwd = [](const std::array<D6, 6>& s) {
        return std::array<D6, 6>{s[0], s[2] - 0.5 * s[0] * s[0], s[1], s[4] - s[0], s[3], s[5]};
      };
      m.check_source = [](const Topography& b) { detail::require_translation(b, false, "f(x) + y"); };
      m.image = [](const Topography& b) {
        return detail::swapped_bottom(b).plus([](double x, double) { return BVal{-x, -1, 0}; }, "- x");
      };
      break;
  }
  return m;
}

inline PointMap equiv_map(const EquivElement& g) {
  g.require_valid();
  PointMap m;
  m.name = "G~";
  m.fwd = [g](const std::array<D6, 6>& s) {
    auto r = g.R();
    double K = g.K();
    return std::array<D6, 6>{g.d[0] * s[0] + g.d[1],
                             r[0] * s[1] + r[1] * s[2] + g.d[4],
                             r[2] * s[1] + r[3] * s[2] + g.d[5],
                             (r[0] * s[3] + r[1] * s[4]) / g.d[0],
                             (r[2] * s[3] + r[3] * s[4]) / g.d[0],
                             K * s[5]};
  };
  m.image = [g](const Topography& b) { return apply_equiv_to_topo(g, b); };
  return m;
}

inline PointMap identity_map() {
  PointMap m;
  m.name = "identity";
  m.fwd = [](const std::array<D6, 6>& s) { return s; };
  m.image = [](const Topography& b) { return b; };
  return m;
}

// source bottom of a map for a profile f
inline Topography admissible_source(MapKind kind, std::shared_ptr<const Profile> f) {
  std::vector<Locus> cut = {origin_locus()[0], negative_x_ray()};
  switch (kind) {
    case MapKind::T1: return from_expression("f(phi)/r^2 - (x^2+y^2)/2", cut, {}, f);
    case MapKind::T2: return from_expression("f(phi)/r^2 + (x^2+y^2)/2", cut, {}, f);
    case MapKind::T3: return from_expression("f(y) + x", {}, {}, f);
    case MapKind::T3_swapped: return from_expression("f(x) + y", {}, {}, f);
  }
  fail(ErrorKind::internal, "unreachable");
}

// first-order jet of a flow at a point
struct FlowJet {
  State6 s;                                   // t, x, y, u, v, h
  std::array<std::array<double, 3>, 3> d{};  // d[k][j]: (u, v, h) by (t, x, y)
};

// residuals of the three equations at a jet for bottom gradient (bx, by)
inline std::array<double, 3> equation_residual(const FlowJet& j, double bx, double by) {
  const double u = j.s[3], v = j.s[4], h = j.s[5];
  const auto& D = j.d;
  return {D[0][0] + u * D[0][1] + v * D[0][2] + D[2][1] - bx, D[1][0] + u * D[1][1] + v * D[1][2] + D[2][2] - by,
          D[2][0] + u * D[2][1] + h * D[0][1] + v * D[2][2] + h * D[1][2]};
}

// jet of the image flow: target derivatives = B A^-1 with total Jacobians A (base) and B (fibre)
inline FlowJet push_jet(const PointMap& m, const FlowJet& j) {
  std::array<D6, 6> z;
  for (int i = 0; i < 6; ++i) z[i] = D6::var(j.s[i], i);
  auto r = m.apply(z);
  Eigen::Matrix3d A, B;
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < 3; ++c) {
      double a = r[i].d[c], b = r[3 + i].d[c];
      for (int k = 0; k < 3; ++k) a += r[i].d[3 + k] * j.d[k][c], b += r[3 + i].d[3 + k] * j.d[k][c];
      A(i, c) = a;
      B(i, c) = b;
    }
  Eigen::FullPivLU<Eigen::Matrix3d> lu(A);
  if (!lu.isInvertible()) fail(ErrorKind::domain, m.name + " is singular at this point");
  Eigen::Matrix3d T = B * lu.inverse();
  FlowJet out;
  for (int i = 0; i < 6; ++i) out.s[i] = r[i].v;
  for (int k = 0; k < 3; ++k)
    for (int c = 0; c < 3; ++c) out.d[k][c] = T(k, c);
  return out;
}

struct PushResult {
  std::vector<State6> samples;  // image points (t~, x~, y~, u~, v~, h~)
  double residual = 0;           // RMS of the target equations on the image jets
  double baseline = 0;           // RMS of the source equations on the source jets
  double ratio() const { return baseline > 0 ? residual / baseline : (residual == 0 ? 1 : INFINITY); }
};

// pushes the discrete flow at the middle of three consecutive states through m;
// jets come from 4th-order space differences and a centred time difference, on the
// interior 80% of the grid
inline PushResult push_state(const PointMap& m, const Topography& src, const Topography& tgt, const SimState& prev,
                             const SimState& cur, const SimState& next) {
  const Grid& g = cur.grid;
  const double dt2 = next.t - prev.t;
  if (!(dt2 > 0)) fail(ErrorKind::configuration, "states must be in increasing time order");
  if (!m.valid_at(cur.t)) fail(ErrorKind::domain, m.name + " undefined at t = " + std::to_string(cur.t));
  const Field* F[3] = {&cur.u, &cur.v, &cur.h};
  const Field* P[3] = {&prev.u, &prev.v, &prev.h};
  const Field* N[3] = {&next.u, &next.v, &next.h};
  std::array<Field, 3> Dx, Dy;
  for (int k = 0; k < 3; ++k) Dx[k] = d_dx(g, *F[k], 4), Dy[k] = d_dy(g, *F[k], 4);
  const int i0 = g.nx / 10, i1 = g.nx - g.nx / 10, j0 = g.ny / 10, j1 = g.ny - g.ny / 10;
  PushResult res;
  double s_src = 0, s_tgt = 0;
  long n = 0;
  for (int j = j0; j < j1; ++j)
    for (int i = i0; i < i1; ++i) {
      FlowJet jet;
      jet.s = {cur.t, g.x(i), g.y(j), cur.u(i, j), cur.v(i, j), cur.h(i, j)};
      for (int k = 0; k < 3; ++k) {
        jet.d[k][0] = ((*N[k])(i, j) - (*P[k])(i, j)) / dt2;
        jet.d[k][1] = Dx[k](i, j);
        jet.d[k][2] = Dy[k](i, j);
      }
      BVal b = src.eval(jet.s[1], jet.s[2]);
      for (double r : equation_residual(jet, b.bx, b.by)) s_src += r * r;
      FlowJet img = push_jet(m, jet);
      if (!tgt.admissible(img.s[1], img.s[2]))
        fail(ErrorKind::domain, "image point outside the target domain");
      BVal bt = tgt.eval(img.s[1], img.s[2]);
      for (double r : equation_residual(img, bt.bx, bt.by)) s_tgt += r * r;
      res.samples.push_back(img.s);
      ++n;
    }
  res.baseline = std::sqrt(s_src / (3.0 * n));
  res.residual = std::sqrt(s_tgt / (3.0 * n));
  return res;
}

// runs the source flow and pushes the state at t_mid = steps_before * dt
inline PushResult push_flow(const PointMap& m, const Topography& src, const SimState& init, int steps_before, double dt) {
  Topography tgt = m.target(src);
  auto bottom = sample_bottom(init.grid, src);
  SimState s = init;
  for (int i = 0; i + 1 < steps_before; ++i) s = step_rk4(s, bottom, dt);
  SimState prev = s, cur = step_rk4(prev, bottom, dt), next = step_rk4(cur, bottom, dt);
  return push_state(m, src, tgt, prev, cur, next);
}

struct ListedEquivalence {
  MapKind map;
  std::string source_id;
  CaseParams source_params;
  std::string target_id;
  double target_delta = std::numeric_limits<double>::quiet_NaN();  // checked when finite
};

// additional equivalences from the three admissible families (T1 on -r^2/2 sources, T2 on +r^2/2)
inline std::vector<ListedEquivalence> listed_equivalences() {
  CaseParams d1{1, 1, 1}, d0{1, 0, 1};
  return {{MapKind::T1, "3c", {}, "3a"},
          {MapKind::T1, "7c", {1, 0, 1}, "7a"},
          {MapKind::T1, "8c", d0, "8a", 0},
          {MapKind::T1, "14d", {}, "14a"},
          {MapKind::T2, "3b", {}, "3a"},
          {MapKind::T2, "7b", {1, 0, 1}, "7a"},
          {MapKind::T2, "8b", d0, "8a", 0},
          {MapKind::T2, "14c", {}, "14a"},
          {MapKind::T3, "14b", {}, "14a"},
          {MapKind::T3, "4", d1, "4", 0},
          {MapKind::T3, "8a", d1, "8a", 0},
          {MapKind::T3_swapped, "10", d1, "10", 0},
          {MapKind::T3_swapped, "12", d1, "12", 0}};
}

}  // namespace swcl
