#pragma once
#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "charspace.hpp"
#include "chartuple.hpp"
#include "expr.hpp"
#include "grid.hpp"
#include "multiplier.hpp"

// Hamiltonian operator, Casimirs, the cosymmetry bracket and the Lie-symmetry
// action on characteristics
namespace swcl {

// Q = 2 D(F1) - c1 D^t - c2 J + P(F2, F3); F4 comes from the symmetry
// classifying equation once a bottom is fixed
struct SymmetryVF {
  QuasiPoly F1, F2, F3;
  double c1 = 0, c2 = 0;
  QuasiPoly F4;

  friend SymmetryVF operator+(const SymmetryVF& a, const SymmetryVF& b) {
    return {a.F1 + b.F1, a.F2 + b.F2, a.F3 + b.F3, a.c1 + b.c1, a.c2 + b.c2, a.F4 + b.F4};
  }
  friend SymmetryVF operator*(double k, const SymmetryVF& a) {
    return {k * a.F1, k * a.F2, k * a.F3, k * a.c1, k * a.c2, k * a.F4};
  }
  std::string str() const {
    std::string s;
    auto add = [&](const std::string& piece) { s += (s.empty() ? "" : " + ") + piece; };
    if (!F1.is_zero()) add("2D(" + F1.str() + ")");
    if (c1 != 0) add(std::to_string(-c1) + "*Dt");
    if (c2 != 0) add(std::to_string(-c2) + "*J");
    if (!F2.is_zero() || !F3.is_zero()) add("P(" + F2.str() + ", " + F3.str() + ")");
    return s.empty() ? "0" : s;
  }
};

// the paper's generators in this parametrization
inline SymmetryVF vf_D(const QuasiPoly& F) { return {0.5 * F, {}, {}, 0, 0, {}}; }
inline SymmetryVF vf_Dt() { return {{}, {}, {}, -1, 0, {}}; }
inline SymmetryVF vf_J() { return {{}, {}, {}, 0, -1, {}}; }
inline SymmetryVF vf_P(const QuasiPoly& F2, const QuasiPoly& F3) { return {{}, F2, F3, 0, 0, {}}; }
inline SymmetryVF vf_Ds() { return {QuasiPoly::mono(1), {}, {}, 2, 0, {}}; }

template <class T>
struct VFComponents {
  T tau, xi1, xi2, eu, ev, eh;
};

template <class T>
VFComponents<T> vf_components(const SymmetryVF& Q, const T& t, const T& x, const T& y, const T& u, const T& v,
                              const T& h) {
  double tv = value_of(t);
  QuasiPoly d1 = Q.F1.derivative(), d2 = d1.derivative(), d3 = d2.derivative();
  QuasiPoly p1 = Q.F2.derivative(), p2 = p1.derivative(), q1 = Q.F3.derivative(), q2 = q1.derivative();
  auto L = [&](const QuasiPoly& f, const QuasiPoly& df) { return lift(t, f(tv), df(tv)); };
  T F1 = L(Q.F1, d1), F1t = L(d1, d2), F1tt = L(d2, d3);
  T F2 = L(Q.F2, p1), F2t = L(p1, p2), F3 = L(Q.F3, q1), F3t = L(q1, q2);
  VFComponents<T> c;
  c.tau = 2.0 * F1 - Q.c1 * t;
  c.xi1 = F1t * x + Q.c2 * y + F2;
  c.xi2 = F1t * y - Q.c2 * x + F3;
  c.eu = -(F1t * u - F1tt * x) + Q.c1 * u + Q.c2 * v + F2t;
  c.ev = -(F1t * v - F1tt * y) + Q.c1 * v - Q.c2 * u + F3t;
  c.eh = -2.0 * F1t * h + 2.0 * Q.c1 * h;
  return c;
}

namespace detail {

inline const QuasiPoly& qp_t() {
  static const QuasiPoly t = QuasiPoly::mono(1);
  return t;
}

// F4-free part of the symmetry classifying equation, as t-profiles times values of b at (x, y)
inline QuasiPoly symmetry_profile(const SymmetryVF& Q, double x, double y, const BVal& b) {
  QuasiPoly d1 = Q.F1.derivative();
  return (x * b.bx + y * b.by + 2 * b.b) * d1 + QuasiPoly(Q.c2 * (y * b.bx - x * b.by)) + b.bx * Q.F2 +
         b.by * Q.F3 + QuasiPoly(-2 * Q.c1 * b.b) - (0.5 * (x * x + y * y)) * d1.derivative(2) -
         x * Q.F2.derivative(2) - y * Q.F3.derivative(2);
}

}  // namespace detail

// where t-profiles that must not depend on (x, y) are read off
inline Vec2 reference_point(const Topography& topo) {
  for (Vec2 p : {Vec2{0, 0}, Vec2{1, 0}, Vec2{0, 1}, Vec2{1, 1}})
    if (topo.admissible(p.x, p.y)) return p;
  Vec2 c = topo.center();
  if (topo.admissible(c.x, c.y)) return c;
  fail(ErrorKind::domain, "no admissible reference point");
}

inline QuasiPoly derive_F4(const SymmetryVF& Q, const Topography& topo) {
  Vec2 p = reference_point(topo);
  return detail::symmetry_profile(Q, p.x, p.y, topo.eval(p.x, p.y)).pruned(1e-13);
}

inline SymmetryVF with_F4(SymmetryVF Q, const Topography& topo) {
  Q.F4 = derive_F4(Q, topo);
  return Q;
}

// max over points of |classifying equation| with F4 as stored
inline double symmetry_residual(const SymmetryVF& Q, const Topography& topo, const std::vector<JetPoint>& pts) {
  double worst = 0;
  for (const auto& p : pts) {
    BVal b = topo.eval(p.x, p.y);
    worst = std::max(worst, std::abs(detail::symmetry_profile(Q, p.x, p.y, b)(p.t) - Q.F4(p.t)));
  }
  return worst;
}

// characteristic Q[w] = eta - tau w_t - xi . grad w, with w_t taken on solutions
inline std::array<double, 3> vf_characteristic(const SymmetryVF& Q, const Topography& topo, const JetPoint& p) {
  BVal b = topo.eval(p.x, p.y);
  auto [ut, vt, ht] = detail::on_shell_t(p, b);
  auto c = vf_components<double>(Q, p.t, p.x, p.y, p.u, p.v, p.h);
  return {c.eu - c.tau * ut - c.xi1 * p.ux - c.xi2 * p.uy, c.ev - c.tau * vt - c.xi1 * p.vx - c.xi2 * p.vy,
          c.eh - c.tau * ht - c.xi1 * p.hx - c.xi2 * p.hy};
}

// commutator from the structure relations of the symmetry algebra
inline SymmetryVF vf_bracket(const SymmetryVF& a, const SymmetryVF& b) {
  const QuasiPoly& t = detail::qp_t();
  auto d = [](const QuasiPoly& f) { return f.derivative(); };
  SymmetryVF r;
  r.F1 = 2.0 * (a.F1 * d(b.F1) - b.F1 * d(a.F1)) + b.c1 * (t * d(a.F1) - a.F1) - a.c1 * (t * d(b.F1) - b.F1);
  r.F2 = 2.0 * (a.F1 * d(b.F2)) - d(a.F1) * b.F2 - 2.0 * (b.F1 * d(a.F2)) + d(b.F1) * a.F2 - a.c1 * (t * d(b.F2)) +
         b.c1 * (t * d(a.F2)) - a.c2 * b.F3 + b.c2 * a.F3;
  r.F3 = 2.0 * (a.F1 * d(b.F3)) - d(a.F1) * b.F3 - 2.0 * (b.F1 * d(a.F3)) + d(b.F1) * a.F3 - a.c1 * (t * d(b.F3)) +
         b.c1 * (t * d(a.F3)) + a.c2 * b.F2 - b.c2 * a.F2;
  return r;
}

// the symmetry that H maps a characteristic to; Lambda4 is the kernel
inline SymmetryVF hamiltonian_image(const CharTuple& ct) { return {ct.F1, ct.F2, ct.F3, 0, -ct.c1, {}}; }

// (q g2 - Dx g3, -q g1 - Dy g3, -Dx g1 - Dy g2) with total derivatives along the jet
inline std::array<double, 3> apply_H(const CharTuple& ct, const Topography& topo, const JetPoint& p) {
  if (!(p.h > 0)) fail(ErrorKind::domain, "h must be positive");
  auto gj = detail::gamma_jet(TupleEval(ct), topo, p);
  detail::Totals T[3];
  for (int i = 0; i < 3; ++i) T[i] = detail::totals(gj.g[i], p, 0, 0, 0);
  double q = (p.vx - p.uy) / p.h;
  return {q * gj.g[1].v - T[2].Dx, -q * gj.g[0].v - T[2].Dy, -T[0].Dx - T[1].Dy};
}

// gridded version on nodal values of gamma
inline std::array<Field, 3> apply_H(const std::array<Field, 3>& g, const SimState& s) {
  if ((s.h <= 0).any()) fail(ErrorKind::domain, "h must be positive");
  const Grid& G = s.grid;
  Field q = (d_dx(G, s.v) - d_dy(G, s.u)) / s.h;
  return {q * g[1] - d_dx(G, g[2]), -q * g[0] - d_dy(G, g[2]), -d_dx(G, g[0]) - d_dy(G, g[1])};
}

inline std::array<Field, 3> apply_H(const CharTuple& ct, const Topography& topo, const SimState& s) {
  std::array<Field, 3> g{Field(s.grid.nx, s.grid.ny), Field(s.grid.nx, s.grid.ny), Field(s.grid.nx, s.grid.ny)};
  for (int j = 0; j < s.grid.ny; ++j)
    for (int i = 0; i < s.grid.nx; ++i) {
      auto v = eval_characteristic(ct, topo, {s.t, s.grid.x(i), s.grid.y(j), s.u(i, j), s.v(i, j), s.h(i, j)});
      for (int k = 0; k < 3; ++k) g[k](i, j) = v[k];
    }
  return apply_H(g, s);
}

// max over the grid of |H dC_R| for C_R = int h R(q)
inline double casimir_residual(const Profile& R, const SimState& s) {
  if ((s.h <= 0).any()) fail(ErrorKind::domain, "h must be positive");
  const Grid& G = s.grid;
  Field q = (d_dx(G, s.v) - d_dy(G, s.u)) / s.h;
  Field Rv(q.rows(), q.cols()), Rp(q.rows(), q.cols());
  for (int j = 0; j < q.cols(); ++j)
    for (int i = 0; i < q.rows(); ++i) {
      auto r = R(Dual<1>::var(q(i, j), 0));
      Rv(i, j) = r.v;
      Rp(i, j) = r.d[0];
    }
  auto out = apply_H({d_dy(G, Rp), -d_dx(G, Rp), Rv - q * Rp}, s);
  return (out[0].square() + out[1].square() + out[2].square()).sqrt().maxCoeff();
}

// bracket of two characteristics: tabulated principal tuple plus a remainder
// (0, 0, sum_j rem_j(t) e_j(x, y)) over the template basis e
struct BracketResult {
  CharTuple principal;
  std::array<QuasiPoly, 8> rem;

  double remainder_at(const Topography& topo, double t, double x, double y) const {
    Vec8 e = eval_template_basis(topo, x, y);
    double r = 0;
    for (int j = 0; j < 8; ++j) r += rem[j](t) * e(j);
    return r;
  }
  QuasiPoly remainder_profile(const Topography& topo, Vec2 p) const {
    Vec8 e = eval_template_basis(topo, p.x, p.y);
    QuasiPoly r;
    for (int j = 0; j < 8; ++j)
      if (e(j) != 0) r = r + e(j) * rem[j];
    return r.pruned(1e-13);
  }
  // how far the remainder is from a pure function of t
  double remainder_variation(const Topography& topo, const std::vector<JetPoint>& pts) const {
    Vec2 ref = reference_point(topo);
    double worst = 0;
    for (const auto& p : pts)
      worst = std::max(worst, std::abs(remainder_at(topo, p.t, p.x, p.y) - remainder_at(topo, p.t, ref.x, ref.y)));
    return worst;
  }
  // valid once the remainder depends on t only
  CharTuple as_tuple(const Topography& topo) const {
    CharTuple r = principal;
    r.F4 = r.F4 + remainder_profile(topo, reference_point(topo));
    return r;
  }
};

inline BracketResult bracket_H(const CharTuple& a, const CharTuple& b) {
  using QP = QuasiPoly;
  auto d = [](const QP& f, int n = 1) { return f.derivative(n); };
  BracketResult r;
  CharTuple& P = r.principal;
  auto& R = r.rem;
  // [L0, L1(G)] = 2G (0, 0, x b_y - y b_x); x b_y - y b_x = -e1
  auto l0_l1 = [&](double c, const QP& G, double sgn) { R[1] = R[1] + (-2.0 * c * sgn) * G; };
  l0_l1(a.c1, b.F1, 1);
  l0_l1(b.c1, a.F1, -1);
  // [L0, L2(G)] = -L3(G), [L0, L3(G)] = L2(G)
  P.F3 = P.F3 + (-a.c1) * b.F2 + b.c1 * a.F2;
  P.F2 = P.F2 + a.c1 * b.F3 - b.c1 * a.F3;
  // [L1(F), L1(G)]
  {
    const QP &F = a.F1, &G = b.F1;
    QP W = F * d(G) - G * d(F);
    P.F1 = P.F1 + 2.0 * W;
    R[0] = R[0] + (-2.0) * W;
    R[4] = R[4] + 2.0 * (F * d(G, 3) - G * d(F, 3));
  }
  // [L1(F), L2(G)] and [L1(F), L3(G)], plus the reversed orders
  auto l1_lk = [&](const QP& F, const QP& G, int slot, double sgn) {
    QP prin = 2.0 * (F * d(G)) - d(F) * G;
    (slot == 2 ? P.F2 : P.F3) = (slot == 2 ? P.F2 : P.F3) + sgn * prin;
    R[slot == 2 ? 2 : 3] = R[slot == 2 ? 2 : 3] + (-2.0 * sgn) * (F * G);
    R[slot == 2 ? 5 : 6] = R[slot == 2 ? 5 : 6] + (2.0 * sgn) * (F * d(G, 2));
  };
  l1_lk(a.F1, b.F2, 2, 1);
  l1_lk(a.F1, b.F3, 3, 1);
  l1_lk(b.F1, a.F2, 2, -1);
  l1_lk(b.F1, a.F3, 3, -1);
  // [L2(F), L2(G)] = [L3(F), L3(G)] = L4(G F_t - F G_t)
  P.F4 = P.F4 + (b.F2 * d(a.F2) - a.F2 * d(b.F2)) + (b.F3 * d(a.F3) - a.F3 * d(b.F3));
  return r;
}

// L_Q gamma = Q gamma + M gamma in closed form; Q must be a symmetry of the bottom
inline CharTuple lie_action(const SymmetryVF& Q0, const CharTuple& g, const Topography& topo, double tol = 1e-8) {
  SymmetryVF Q = Q0;
  if (Q.F4.is_zero()) Q.F4 = derive_F4(Q, topo);
  {
    double scale = 1 + std::max({Q.F1.max_coef(), Q.F2.max_coef(), Q.F3.max_coef(), std::abs(Q.c1), std::abs(Q.c2)});
    double res = symmetry_residual(Q, topo, random_jets<JetPoint>(topo, 64, 4242));
    if (res > tol * scale) fail(ErrorKind::precondition, "vector field is not a symmetry (residual " + std::to_string(res) + ")");
  }
  const QuasiPoly& t = detail::qp_t();
  auto d = [](const QuasiPoly& f) { return f.derivative(); };
  CharTuple r = (3 * Q.c1) * g;
  r.F1 = r.F1 + 2.0 * (Q.F1 * d(g.F1) - d(Q.F1) * g.F1) - Q.c1 * (t * d(g.F1) - g.F1);
  r.F2 = r.F2 + 2.0 * (Q.F1 * d(g.F2)) - d(Q.F1) * g.F2 - 2.0 * (g.F1 * d(Q.F2)) + d(g.F1) * Q.F2 -
         Q.c1 * (t * d(g.F2)) - Q.c2 * g.F3 - g.c1 * Q.F3;
  r.F3 = r.F3 + 2.0 * (Q.F1 * d(g.F3)) - d(Q.F1) * g.F3 - 2.0 * (g.F1 * d(Q.F3)) + d(g.F1) * Q.F3 -
         Q.c1 * (t * d(g.F3)) + Q.c2 * g.F2 + g.c1 * Q.F2;
  r.F4 = r.F4 + 2.0 * (Q.F1 * d(g.F4)) - Q.c1 * (t * d(g.F4)) + g.F2 * d(Q.F2) - Q.F2 * d(g.F2) +
         g.F3 * d(Q.F3) - Q.F3 * d(g.F3) - Q.c1 * g.F4 + 2.0 * (Q.F4 * g.F1);
  r.F1 = r.F1.pruned(1e-13), r.F2 = r.F2.pruned(1e-13), r.F3 = r.F3.pruned(1e-13), r.F4 = r.F4.pruned(1e-13);
  return r;
}

namespace detail {

// structural coordinates of vector fields via the tuple machinery (c2 rides in the F4 slot)
inline CharTuple pack(const SymmetryVF& q) { return {q.c1, q.F1, q.F2, q.F3, QuasiPoly(q.c2)}; }
inline SymmetryVF unpack(const CharTuple& c) { return {c.F1, c.F2, c.F3, c.c1, c.F4.constant_part(), {}}; }

// (x b_x + y b_y + 2b, y b_x - x b_y, b_x, b_y, b, r^2/2, x, y, 1)
inline Eigen::Matrix<double, 9, 1> symmetry_row(double x, double y, const BVal& v) {
  Eigen::Matrix<double, 9, 1> e;
  e << x * v.bx + y * v.by + 2 * v.b, y * v.bx - x * v.by, v.bx, v.by, v.b, 0.5 * (x * x + y * y), x, y, 1.0;
  return e;
}

}  // namespace detail

inline int vf_rank(const std::vector<SymmetryVF>& qs, double tol = 1e-9) {
  std::vector<CharTuple> ts;
  for (const auto& q : qs) ts.push_back(detail::pack(q));
  return tuple_rank(ts, tol);
}

// maximal Lie invariance algebra, from the relations the bottom satisfies among
// the nine symmetry template functions
inline std::vector<SymmetryVF> symmetry_algebra(const Topography& topo, const DetectOptions& opt = {}) {
  double rel_tol = opt.rel_tol;
  if (topo.accuracy() == Accuracy::gridded)
    rel_tol = std::min(rel_tol * (1 + topo.grid_error() / std::numeric_limits<double>::epsilon()), kGriddedTolCap);
  auto pts = sample_points(topo, default_plan(topo, opt.n, opt.seed + 101));
  Mat M(pts.size(), 9);
  for (size_t i = 0; i < pts.size(); ++i) M.row(i) = detail::symmetry_row(pts[i].x, pts[i].y, topo.eval(pts[i].x, pts[i].y)).transpose();
  Vec scale(9);
  double nb = M.leftCols(5).colwise().norm().maxCoeff();
  for (int j = 0; j < 9; ++j) {
    double n = j < 5 ? nb : M.col(j).norm();
    scale(j) = n > 0 ? 1.0 / n : 1.0;
    M.col(j) *= scale(j);
  }
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  int k = 0;
  for (int i = 8; i >= 0 && s(i) < rel_tol * s(0); --i) ++k;
  std::vector<SymmetryVF> out;
  if (k > 0) {
    Mat N = svd.matrixV().rightCols(k);
    for (int j = 0; j < 9; ++j) N.row(j) *= scale(j);
    Mat A = orth(N, 1e-14).transpose();
    A = A.unaryExpr([](double v) { return std::abs(v) < 1e-12 ? 0.0 : v; });
    MultiplierSystem sys;
    sys.k = k;
    Mat At = A.transpose();
    sys.second = {{At.row(0), At.row(5)}, {At.row(2), At.row(6)}, {At.row(3), At.row(7)}};
    sys.constant = {At.row(1), At.row(4)};
    for (const auto& lam : solve_multiplier_system(sys)) {
      SymmetryVF q;
      QuasiPoly c2 = detail::dot(At.row(1), lam), c1 = -0.5 * detail::dot(At.row(4), lam);
      for (const QuasiPoly* c : {&c1, &c2})
        if ((*c - QuasiPoly(c->constant_part())).max_coef() > 1e-8 * std::max(1.0, c->max_coef()))
          fail(ErrorKind::numeric, "scaling or rotation coefficient is not constant");
      q.c1 = c1.constant_part();
      q.c2 = c2.constant_part();
      q.F1 = detail::dot(At.row(0), lam).antiderivative();
      q.F2 = detail::dot(At.row(2), lam);
      q.F3 = detail::dot(At.row(3), lam);
      out.push_back(q);
    }
  }
  out.push_back(vf_D(QuasiPoly(1)));
  std::vector<CharTuple> packed;
  for (const auto& q : out) packed.push_back(detail::pack(q));
  std::vector<SymmetryVF> basis;
  for (auto& c : reduce_basis(packed, 1e-9)) {
    c.F1 = c.F1.pruned(1e-11), c.F2 = c.F2.pruned(1e-11), c.F3 = c.F3.pruned(1e-11);
    basis.push_back(with_F4(detail::unpack(c), topo));
  }
  return basis;
}

// dim of H applied to a basis, from values at sample jets
inline int hamiltonian_dim(const std::vector<CharTuple>& basis, const Topography& topo, int njets = 40,
                           uint64_t seed = 17) {
  auto jets = random_jets<JetPoint>(topo, njets, seed);
  Mat V(3 * njets, basis.size());
  for (size_t c = 0; c < basis.size(); ++c)
    for (int i = 0; i < njets; ++i) {
      auto h = apply_H(basis[c], topo, jets[i]);
      for (int k = 0; k < 3; ++k) V(3 * i + k, c) = h[k];
    }
  return rank_of(V, 1e-9);
}

struct OrbitResult {
  std::vector<CharTuple> span;
  int dim = 0;
  int target_dim = 0;
  bool closed = false;
  int iterations = 0;
};

// span of the seeds under the Lie-symmetry action and the bracket
inline OrbitResult generating_orbit(const Topography& topo, const std::vector<CharTuple>& seeds,
                                    const std::vector<SymmetryVF>& algebra, const std::vector<CharTuple>& full) {
  OrbitResult res;
  res.target_dim = static_cast<int>(full.size());
  auto cur = reduce_basis(seeds, 1e-9);
  auto jets = random_jets<JetPoint>(topo, 64, 99);
  const int bound = 12;
  for (int it = 0; it < bound; ++it) {
    res.iterations = it + 1;
    auto next = cur;
    for (const auto& g : cur)
      for (const auto& Q : algebra) next.push_back(lie_action(Q, g, topo));
    for (size_t i = 0; i < cur.size(); ++i)
      for (size_t j = i + 1; j < cur.size(); ++j) {
        auto br = bracket_H(cur[i], cur[j]);
        if (br.remainder_variation(topo, jets) > 1e-8)
          fail(ErrorKind::verification, "bracket remainder depends on (x, y); arguments are not characteristics");
        next.push_back(br.as_tuple(topo));
      }
    next = reduce_basis(next, 1e-9);
    bool stable = next.size() == cur.size();
    cur = std::move(next);
    if (stable) {
      res.span = cur;
      res.dim = static_cast<int>(cur.size());
      auto joint = cur;
      joint.insert(joint.end(), full.begin(), full.end());
      res.closed = res.dim == res.target_dim && tuple_rank(joint, 1e-8) == res.target_dim;
      return res;
    }
  }
  fail(ErrorKind::internal, "orbit did not stabilize within " + std::to_string(bound) + " rounds");
}

inline OrbitResult generating_orbit(const Topography& topo, const std::vector<CharTuple>& seeds) {
  return generating_orbit(topo, seeds, symmetry_algebra(topo), analyze(topo).basis);
}

}  // namespace swcl
