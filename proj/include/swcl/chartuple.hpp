#pragma once
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "dual.hpp"
#include "linalg.hpp"
#include "quasipoly.hpp"
#include "topography.hpp"

namespace swcl {

// c1 L0 + L1_b(F1) + L2(F2) + L3(F3) + L4(F4), with L0 = (-y h, x h, x v - y u)
struct CharTuple {
  double c1 = 0;
  QuasiPoly F1, F2, F3, F4;

  friend CharTuple operator+(const CharTuple& a, const CharTuple& b) {
    return {a.c1 + b.c1, a.F1 + b.F1, a.F2 + b.F2, a.F3 + b.F3, a.F4 + b.F4};
  }
  friend CharTuple operator-(const CharTuple& a, const CharTuple& b) {
    return {a.c1 - b.c1, a.F1 - b.F1, a.F2 - b.F2, a.F3 - b.F3, a.F4 - b.F4};
  }
  friend CharTuple operator*(double k, const CharTuple& a) {
    return {k * a.c1, k * a.F1, k * a.F2, k * a.F3, k * a.F4};
  }
  bool is_zero() const { return c1 == 0 && F1.is_zero() && F2.is_zero() && F3.is_zero() && F4.is_zero(); }
  bool approx_equal(const CharTuple& o, double tol = 1e-12) const {
    double scale = std::max({1.0, std::abs(c1), std::abs(o.c1)});
    return std::abs(c1 - o.c1) <= tol * scale && F1.approx_equal(o.F1, tol) && F2.approx_equal(o.F2, tol) &&
           F3.approx_equal(o.F3, tol) && F4.approx_equal(o.F4, tol);
  }
  std::string str() const {
    std::string s;
    auto add = [&](const std::string& piece) { s += (s.empty() ? "" : " + ") + piece; };
    if (c1 != 0) add(std::to_string(c1) + "*L0");
    if (!F1.is_zero()) add("L1(" + F1.str() + ")");
    if (!F2.is_zero()) add("L2(" + F2.str() + ")");
    if (!F3.is_zero()) add("L3(" + F3.str() + ")");
    if (!F4.is_zero()) add("L4(" + F4.str() + ")");
    return s.empty() ? "0" : s;
  }
};

inline CharTuple lam0(double c = 1) { return {c, {}, {}, {}, {}}; }
inline CharTuple lam1(QuasiPoly F) { return {0, std::move(F), {}, {}, {}}; }
inline CharTuple lam2(QuasiPoly F) { return {0, {}, std::move(F), {}, {}}; }
inline CharTuple lam3(QuasiPoly F) { return {0, {}, {}, std::move(F), {}}; }
inline CharTuple lam4(QuasiPoly F) { return {0, {}, {}, {}, std::move(F)}; }

// time profiles and the derivatives the formulas need
template <class T>
struct Profiles {
  T c;  // L0 coefficient
  T F1, F1t, F1tt, F1ttt, F2, F2t, F2tt, F3, F3t, F3tt, F4, F4t;
};

class TupleEval {
 public:
  explicit TupleEval(const CharTuple& ct) : ct_(ct) {
    f1_[0] = ct.F1;
    for (int i = 1; i < 5; ++i) f1_[i] = f1_[i - 1].derivative();
    f2_[0] = ct.F2;
    f3_[0] = ct.F3;
    for (int i = 1; i < 4; ++i) f2_[i] = f2_[i - 1].derivative(), f3_[i] = f3_[i - 1].derivative();
    f4_[0] = ct.F4;
    for (int i = 1; i < 3; ++i) f4_[i] = f4_[i - 1].derivative();
  }
  const CharTuple& tuple() const { return ct_; }

  template <class T>
  Profiles<T> at(const T& t) const {
    double tv = value_of(t);
    auto L = [&](const QuasiPoly* f, int i) { return lift(t, f[i](tv), f[i + 1](tv)); };
    Profiles<T> p;
    p.c = T(ct_.c1);
    p.F1 = L(f1_, 0), p.F1t = L(f1_, 1), p.F1tt = L(f1_, 2), p.F1ttt = L(f1_, 3);
    p.F2 = L(f2_, 0), p.F2t = L(f2_, 1), p.F2tt = L(f2_, 2);
    p.F3 = L(f3_, 0), p.F3t = L(f3_, 1), p.F3tt = L(f3_, 2);
    p.F4 = L(f4_, 0), p.F4t = L(f4_, 1);
    return p;
  }

 private:
  CharTuple ct_;
  QuasiPoly f1_[5], f2_[4], f3_[4], f4_[3];
};

template <class T>
std::array<T, 3> gamma_of(const Profiles<T>& P, const T& x, const T& y, const T& u, const T& v, const T& h,
                          const T& b) {
  T cr = -P.c;  // coefficient in the "+c y" refined form
  T A = P.F1t * x + cr * y + P.F2;
  T B = -cr * x + P.F1t * y + P.F3;
  T g1 = (-2.0 * P.F1 * u + A) * h;
  T g2 = (-2.0 * P.F1 * v + B) * h;
  T g3 = -P.F1 * (u * u + v * v + 2.0 * h) + A * u + B * v + 2.0 * P.F1 * b - 0.5 * P.F1tt * (x * x + y * y) -
         P.F2t * x - P.F3t * y + P.F4;
  return {g1, g2, g3};
}

template <class T>
std::array<T, 3> current_of(const Profiles<T>& P, const T& x, const T& y, const T& u, const T& v, const T& h,
                            const T& b) {
  std::array<T, 3> C{T(0.0), T(0.0), T(0.0)};
  // angular momentum
  T am = P.c * (x * v - y * u) * h;
  T hh = h * h;
  C[0] = C[0] + am;
  C[1] = C[1] + am * u - 0.5 * P.c * hh * y;
  C[2] = C[2] + am * v + 0.5 * P.c * hh * x;
  // energy family
  T S = -P.F1 * (u * u + v * v + 2.0 * h - 2.0 * b) + P.F1t * (x * u + y * v) - 0.5 * P.F1tt * (x * x + y * y);
  C[0] = C[0] + S * h + P.F1 * hh;
  C[1] = C[1] + S * h * u + 0.5 * P.F1t * hh * x;
  C[2] = C[2] + S * h * v + 0.5 * P.F1t * hh * y;
  // momentum families
  T m2 = (P.F2 * u - P.F2t * x) * h;
  T m3 = (P.F3 * v - P.F3t * y) * h;
  C[0] = C[0] + m2 + m3 + P.F4 * h;
  C[1] = C[1] + (m2 + m3 + P.F4 * h) * u + 0.5 * P.F2 * hh;
  C[2] = C[2] + (m2 + m3 + P.F4 * h) * v + 0.5 * P.F3 * hh;
  return C;
}

// left-hand side of the classifying equation at (t, x, y); the F4 sign is the one
// that makes div C - gamma.L = h * lhs with the Lambda4 and F4-current above
inline double classifying_lhs(const Profiles<double>& P, double x, double y, const BVal& b) {
  return (P.F1t * x - P.c * y + P.F2) * b.bx + (P.c * x + P.F1t * y + P.F3) * b.by + 2 * P.F1t * b.b -
         0.5 * P.F1ttt * (x * x + y * y) - P.F2tt * x - P.F3tt * y + P.F4t;
}

struct StatePoint {
  double t = 0, x = 0, y = 0, u = 0, v = 0, h = 1;
};

struct JetPoint {
  double t = 0, x = 0, y = 0, u = 0, v = 0, h = 1;
  double ux = 0, uy = 0, vx = 0, vy = 0, hx = 0, hy = 0;
};

struct ExtJet : JetPoint {
  double ut = 0, vt = 0, ht = 0;
};

inline std::array<double, 3> eval_characteristic(const CharTuple& ct, const Topography& topo, const StatePoint& s) {
  if (!(s.h > 0)) fail(ErrorKind::domain, "h must be positive");
  BVal b = topo.eval(s.x, s.y);
  return gamma_of(TupleEval(ct).at(s.t), s.x, s.y, s.u, s.v, s.h, b.b);
}

inline std::array<double, 3> eval_current(const CharTuple& ct, const Topography& topo, const StatePoint& s) {
  if (!(s.h > 0)) fail(ErrorKind::domain, "h must be positive");
  BVal b = topo.eval(s.x, s.y);
  return current_of(TupleEval(ct).at(s.t), s.x, s.y, s.u, s.v, s.h, b.b);
}

// jets drawn from [-2,2] per entry, h in [0.5, 2], (x, y) admissible
template <class J>
std::vector<J> random_jets(const Topography& topo, int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-2, 2), H(0.5, 2);
  Box box{-2, 2, -2, 2};
  Vec2 c = topo.center();
  if (topo.domain()) {
    const Box& d = *topo.domain();
    double mx = 0.15 * (d.x1 - d.x0), my = 0.15 * (d.y1 - d.y0);
    box = {d.x0 + mx, d.x1 - mx, d.y0 + my, d.y1 - my};
  } else {
    box = {c.x - 2, c.x + 2, c.y - 2, c.y + 2};
  }
  std::uniform_real_distribution<double> X(box.x0, box.x1), Y(box.y0, box.y1);
  std::vector<J> out;
  long tries = 0;
  while (static_cast<int>(out.size()) < n) {
    if (++tries > 1000L * n) fail(ErrorKind::configuration, "no admissible jet points");
    J j;
    j.t = U(rng);
    j.x = X(rng);
    j.y = Y(rng);
    j.u = U(rng);
    j.v = U(rng);
    j.h = H(rng);
    j.ux = U(rng), j.uy = U(rng), j.vx = U(rng), j.vy = U(rng), j.hx = U(rng), j.hy = U(rng);
    if constexpr (std::is_same_v<J, ExtJet>) j.ut = U(rng), j.vt = U(rng), j.ht = U(rng);
    if (!topo.admissible(j.x, j.y)) continue;
    out.push_back(j);
  }
  return out;
}

inline double residual_classifying(const CharTuple& ct, const Topography& topo, const std::vector<JetPoint>& pts) {
  TupleEval te(ct);
  double worst = 0;
  for (const auto& p : pts) {
    BVal b = topo.eval(p.x, p.y);
    worst = std::max(worst, std::abs(classifying_lhs(te.at(p.t), p.x, p.y, b)));
  }
  return worst;
}

namespace detail {
using D6 = Dual<6>;

struct GammaJet {
  std::array<D6, 3> g;
};

inline GammaJet gamma_jet(const TupleEval& te, const Topography& topo, const JetPoint& p) {
  BVal bv = topo.eval(p.x, p.y);
  D6 t = D6::var(p.t, 0), x = D6::var(p.x, 1), y = D6::var(p.y, 2), u = D6::var(p.u, 3), v = D6::var(p.v, 4),
     h = D6::var(p.h, 5);
  D6 b(bv.b);
  b.d[1] = bv.bx;
  b.d[2] = bv.by;
  return {gamma_of(te.at(t), x, y, u, v, h, b)};
}

// total derivatives of a function of (t,x,y,u,v,h) along a jet
struct Totals {
  double Dt, Dx, Dy;
};
inline Totals totals(const D6& f, const JetPoint& p, double ut, double vt, double ht) {
  const auto& d = f.d;
  return {d[0] + d[3] * ut + d[4] * vt + d[5] * ht, d[1] + d[3] * p.ux + d[4] * p.vx + d[5] * p.hx,
          d[2] + d[3] * p.uy + d[4] * p.vy + d[5] * p.hy};
}

inline std::array<double, 3> on_shell_t(const JetPoint& p, const BVal& b) {
  return {-(p.u * p.ux + p.v * p.uy + p.hx - b.bx), -(p.u * p.vx + p.v * p.vy + p.hy - b.by),
          -(p.u * p.hx + p.h * p.ux + p.v * p.hy + p.h * p.vy)};
}
}  // namespace detail

// adjoint linearization applied to gamma, on solutions
inline std::array<double, 3> cosymmetry_defect(const TupleEval& te, const Topography& topo, const JetPoint& p) {
  BVal b = topo.eval(p.x, p.y);
  auto [ut, vt, ht] = detail::on_shell_t(p, b);
  auto gj = detail::gamma_jet(te, topo, p);
  detail::Totals T[3];
  double g[3];
  for (int i = 0; i < 3; ++i) T[i] = detail::totals(gj.g[i], p, ut, vt, ht), g[i] = gj.g[i].v;
  auto adv = [&](int i) { return T[i].Dt + p.u * T[i].Dx + p.v * T[i].Dy; };
  return {-(adv(0) + p.vy * g[0]) + p.vx * g[1] - p.h * T[2].Dx,
          p.uy * g[0] - (adv(1) + p.ux * g[1]) - p.h * T[2].Dy,
          -T[0].Dx - T[1].Dy - adv(2)};
}

inline double residual_cosymmetry(const CharTuple& ct, const Topography& topo, const std::vector<JetPoint>& jets) {
  TupleEval te(ct);
  double worst = 0;
  for (const auto& j : jets) {
    auto r = cosymmetry_defect(te, topo, j);
    worst = std::max(worst, std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]));
  }
  return worst;
}

// D_t C1 + D_x C2 + D_y C3 - gamma . L at an off-shell jet
inline double divergence_defect(const TupleEval& te, const Topography& topo, const ExtJet& p) {
  using detail::D6;
  BVal bv = topo.eval(p.x, p.y);
  D6 t = D6::var(p.t, 0), x = D6::var(p.x, 1), y = D6::var(p.y, 2), u = D6::var(p.u, 3), v = D6::var(p.v, 4),
     h = D6::var(p.h, 5);
  D6 b(bv.b);
  b.d[1] = bv.bx;
  b.d[2] = bv.by;
  auto P = te.at(t);
  auto C = current_of(P, x, y, u, v, h, b);
  auto Pd = te.at(p.t);
  auto g = gamma_of(Pd, p.x, p.y, p.u, p.v, p.h, bv.b);
  double div = detail::totals(C[0], p, p.ut, p.vt, p.ht).Dt + detail::totals(C[1], p, p.ut, p.vt, p.ht).Dx +
               detail::totals(C[2], p, p.ut, p.vt, p.ht).Dy;
  double L1 = p.ut + p.u * p.ux + p.v * p.uy + p.hx - bv.bx;
  double L2 = p.vt + p.u * p.vx + p.v * p.vy + p.hy - bv.by;
  double L3 = p.ht + p.u * p.hx + p.h * p.ux + p.v * p.hy + p.h * p.vy;
  return div - (g[0] * L1 + g[1] * L2 + g[2] * L3);
}

inline double residual_divergence(const CharTuple& ct, const Topography& topo, const std::vector<ExtJet>& jets) {
  TupleEval te(ct);
  double worst = 0;
  for (const auto& j : jets) worst = std::max(worst, std::abs(divergence_defect(te, topo, j)));
  return worst;
}

// structural coordinates of tuples over a shared key set
struct TupleCoords {
  struct Key {
    int slot;  // 0 = c1, 1..4 = F1..F4
    double rate, freq;
    int deg;
    bool sine;
  };
  std::vector<Key> keys;
  Mat M;  // rows = tuples

  static TupleCoords build(const std::vector<CharTuple>& ts) {
    TupleCoords tc;
    auto find = [&](const Key& k) {
      for (size_t i = 0; i < tc.keys.size(); ++i) {
        const Key& q = tc.keys[i];
        if (q.slot == k.slot && q.deg == k.deg && q.sine == k.sine &&
            std::abs(q.rate - k.rate) < QuasiPoly::key_tol && std::abs(q.freq - k.freq) < QuasiPoly::key_tol)
          return static_cast<int>(i);
      }
      tc.keys.push_back(k);
      return static_cast<int>(tc.keys.size() - 1);
    };
    find({0, 0, 0, 0, false});
    std::vector<std::vector<std::pair<int, double>>> entries(ts.size());
    for (size_t r = 0; r < ts.size(); ++r) {
      entries[r].push_back({0, ts[r].c1});
      const QuasiPoly* F[4] = {&ts[r].F1, &ts[r].F2, &ts[r].F3, &ts[r].F4};
      for (int s = 0; s < 4; ++s)
        for (const auto& q : F[s]->terms()) {
          if (q.c != 0) entries[r].push_back({find({s + 1, q.rate, q.freq, q.deg, false}), q.c});
          if (q.s != 0) entries[r].push_back({find({s + 1, q.rate, q.freq, q.deg, true}), q.s});
        }
    }
    // order columns: slot, then rate, freq, degree
    std::vector<int> order(tc.keys.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const Key &p = tc.keys[a], &q = tc.keys[b];
      if (p.slot != q.slot) return p.slot < q.slot;
      if (std::abs(p.rate) != std::abs(q.rate)) return std::abs(p.rate) < std::abs(q.rate);
      if (p.rate != q.rate) return p.rate > q.rate;
      if (p.freq != q.freq) return p.freq < q.freq;
      if (p.deg != q.deg) return p.deg < q.deg;
      return p.sine < q.sine;
    });
    std::vector<int> where(order.size());
    for (size_t i = 0; i < order.size(); ++i) where[order[i]] = static_cast<int>(i);
    std::vector<Key> sorted;
    for (int o : order) sorted.push_back(tc.keys[o]);
    tc.M = Mat::Zero(ts.size(), tc.keys.size());
    for (size_t r = 0; r < ts.size(); ++r)
      for (auto [c, v] : entries[r]) tc.M(r, where[c]) += v;
    tc.keys = sorted;
    return tc;
  }

  CharTuple tuple(const Vec& row) const {
    CharTuple ct;
    std::vector<QpTerm> terms[4];
    for (size_t i = 0; i < keys.size(); ++i) {
      const Key& k = keys[i];
      double v = row(i);
      if (v == 0) continue;
      if (k.slot == 0) {
        ct.c1 = v;
        continue;
      }
      terms[k.slot - 1].push_back({k.rate, k.freq, k.deg, k.sine ? 0.0 : v, k.sine ? v : 0.0});
    }
    ct.F1 = QuasiPoly(terms[0]);
    ct.F2 = QuasiPoly(terms[1]);
    ct.F3 = QuasiPoly(terms[2]);
    ct.F4 = QuasiPoly(terms[3]);
    return ct;
  }
};

// Gauss-Jordan reduction of a list of tuples to a tidy basis of the same span
inline std::vector<CharTuple> reduce_basis(const std::vector<CharTuple>& ts, double tol = 1e-9) {
  if (ts.empty()) return {};
  TupleCoords tc = TupleCoords::build(ts);
  Mat M = tc.M;
  const int R = static_cast<int>(M.rows()), C = static_cast<int>(M.cols());
  double scale = std::max(1e-300, M.cwiseAbs().maxCoeff());
  int row = 0;
  for (int col = 0; col < C && row < R; ++col) {
    int piv = row;
    for (int r = row; r < R; ++r)
      if (std::abs(M(r, col)) > std::abs(M(piv, col))) piv = r;
    if (std::abs(M(piv, col)) <= tol * scale) continue;
    M.row(row).swap(M.row(piv));
    M.row(row) /= M(row, col);
    for (int r = 0; r < R; ++r)
      if (r != row) M.row(r) -= M(r, col) * M.row(row);
    ++row;
  }
  std::vector<CharTuple> out;
  for (int r = 0; r < row; ++r) {
    Vec v = M.row(r).transpose();
    for (int c = 0; c < C; ++c)
      if (std::abs(v(c)) < 1e-13) v(c) = 0;
    out.push_back(tc.tuple(v));
  }
  return out;
}

inline int tuple_rank(const std::vector<CharTuple>& ts, double tol = 1e-9) {
  if (ts.empty()) return 0;
  return rank_of(TupleCoords::build(ts).M, tol);
}

}  // namespace swcl
