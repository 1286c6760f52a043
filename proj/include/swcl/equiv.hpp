#pragma once
#include <array>
#include <cmath>
#include <random>
#include <string>

#include "errors.hpp"
#include "topography.hpp"

namespace swcl {

// element of the equivalence group:
//   t~ = d1 t + d2, X~ = R X + (d5, d6), U~ = R U / d1, h~ = K h, b~ = K b + d7
// with R = [[d3, -eps d4], [d4, eps d3]] and K = (d3^2 + d4^2) / d1^2
struct EquivElement {
  std::array<double, 7> d{1, 0, 1, 0, 0, 0, 0};
  int eps = 1;

  static EquivElement identity() { return {}; }
  static EquivElement shift(double p, double q, double s) {
    EquivElement g;
    g.d[4] = p, g.d[5] = q, g.d[6] = s;
    return g;
  }

  bool valid() const {
    return std::isfinite(d[0]) && d[0] != 0 && (d[2] * d[2] + d[3] * d[3]) != 0 && (eps == 1 || eps == -1);
  }
  void require_valid() const {
    if (!valid()) fail(ErrorKind::parameter, "equivalence element needs d1 (d3^2 + d4^2) != 0 and eps = +-1");
  }
  double K() const { return (d[2] * d[2] + d[3] * d[3]) / (d[0] * d[0]); }
  std::array<double, 4> R() const { return {d[2], -eps * d[3], d[3], eps * d[2]}; }

  Vec2 map_point(double x, double y) const {
    auto r = R();
    return {r[0] * x + r[1] * y + d[4], r[2] * x + r[3] * y + d[5]};
  }
  Vec2 map_vector(double x, double y) const {
    auto r = R();
    return {r[0] * x + r[1] * y, r[2] * x + r[3] * y};
  }
  // (t, x, y, u, v, h) -> transformed tuple
  std::array<double, 6> map_state(const std::array<double, 6>& s) const {
    Vec2 X = map_point(s[1], s[2]);
    Vec2 U = map_vector(s[3], s[4]);
    return {d[0] * s[0] + d[1], X.x, X.y, U.x / d[0], U.y / d[0], K() * s[5]};
  }

  // this after g
  EquivElement compose(const EquivElement& g) const {
    auto a = R(), b = g.R();
    double m00 = a[0] * b[0] + a[1] * b[2], m10 = a[2] * b[0] + a[3] * b[2];
    EquivElement r;
    r.d[0] = d[0] * g.d[0];
    r.d[1] = d[0] * g.d[1] + d[1];
    r.d[2] = m00;
    r.d[3] = m10;
    r.eps = eps * g.eps;
    Vec2 s = map_vector(g.d[4], g.d[5]);
    r.d[4] = s.x + d[4];
    r.d[5] = s.y + d[5];
    r.d[6] = K() * g.d[6] + d[6];
    return r;
  }
  EquivElement inverse() const {
    require_valid();
    auto r = R();
    double det = r[0] * r[3] - r[1] * r[2];
    double i00 = r[3] / det, i10 = -r[2] / det, i01 = -r[1] / det, i11 = r[0] / det;
    EquivElement g;
    g.d[0] = 1 / d[0];
    g.d[1] = -d[1] / d[0];
    g.d[2] = i00;
    g.d[3] = i10;
    g.eps = eps;
    g.d[4] = -(i00 * d[4] + i01 * d[5]);
    g.d[5] = -(i10 * d[4] + i11 * d[5]);
    g.d[6] = -d[6] / K();
    return g;
  }

  static EquivElement random(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1, 1), mag(0.5, 2), ang(-M_PI, M_PI);
    std::bernoulli_distribution coin(0.5);
    EquivElement g;
    g.d[0] = mag(rng) * (coin(rng) ? 1 : -1);
    g.d[1] = u(rng);
    double m = mag(rng), a = ang(rng);
    g.d[2] = m * std::cos(a);
    g.d[3] = m * std::sin(a);
    g.d[4] = u(rng);
    g.d[5] = u(rng);
    g.d[6] = u(rng);
    g.eps = coin(rng) ? 1 : -1;
    return g;
  }
};

// b~(X~) = K b(X) + d7 with X = R^{-1}(X~ - s)
inline Topography apply_equiv_to_topo(const EquivElement& g, const Topography& topo) {
  g.require_valid();
  EquivElement gi = g.inverse();
  double K = g.K();
  auto r = g.R();
  double det = r[0] * r[3] - r[1] * r[2];
  // grad~ b~ = K R^{-T} grad b
  double t00 = r[3] / det, t01 = -r[2] / det, t10 = -r[1] / det, t11 = r[0] / det;
  Topography base = topo;
  auto fn = [base, gi, K, g, t00, t01, t10, t11](double xt, double yt) {
    Vec2 X = gi.map_point(xt, yt);
    BVal v = base.eval_unchecked(X.x, X.y);
    return BVal{K * v.b + g.d[6], K * (t00 * v.bx + t01 * v.by), K * (t10 * v.bx + t11 * v.by)};
  };
  std::vector<Locus> sing;
  for (Locus l : topo.singular()) {
    l.p = g.map_point(l.p.x, l.p.y);
    l.dir = g.map_vector(l.dir.x, l.dir.y);
    sing.push_back(l);
  }
  Topography out(fn, sing, topo.accuracy(), "G~(" + topo.label() + ")", topo.exclusion());
  Vec2 c = g.map_point(topo.center().x, topo.center().y);
  out.set_center(c).set_grid_error(topo.grid_error());
  if (topo.domain()) {
    // bounding box of the mapped domain
    const Box& d = *topo.domain();
    Vec2 cs[4] = {g.map_point(d.x0, d.y0), g.map_point(d.x1, d.y0), g.map_point(d.x0, d.y1), g.map_point(d.x1, d.y1)};
    Box nb{cs[0].x, cs[0].x, cs[0].y, cs[0].y};
    for (auto& p : cs) nb = {std::min(nb.x0, p.x), std::max(nb.x1, p.x), std::min(nb.y0, p.y), std::max(nb.y1, p.y)};
    out.set_domain(nb);
  }
  return out;
}

}  // namespace swcl
