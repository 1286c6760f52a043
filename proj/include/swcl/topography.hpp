#pragma once
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dual.hpp"
#include "errors.hpp"
#include "expr.hpp"

namespace swcl {

struct Vec2 {
  double x = 0, y = 0;
};

struct BVal {
  double b = 0, bx = 0, by = 0;
};

// excluded locus: a point, a full line, or a ray from p along dir
struct Locus {
  enum Kind { point, line, ray } kind = point;
  Vec2 p;
  Vec2 dir{1, 0};

  double dist(double x, double y) const {
    double dx = x - p.x, dy = y - p.y;
    if (kind == point) return std::hypot(dx, dy);
    double n = std::hypot(dir.x, dir.y);
    double ux = dir.x / n, uy = dir.y / n;
    double along = dx * ux + dy * uy;
    if (kind == ray && along < 0) return std::hypot(dx, dy);
    return std::abs(-dx * uy + dy * ux);
  }
};

enum class Accuracy { exact, spline, gridded };

struct Box {
  double x0 = -2, x1 = 2, y0 = -2, y1 = 2;
};

class Topography {
 public:
  using Fn = std::function<BVal(double, double)>;

  Topography() : Topography([](double, double) { return BVal{}; }, {}, Accuracy::exact, "0") {}
  Topography(Fn f, std::vector<Locus> singular, Accuracy acc, std::string label, double exclusion = 0.05)
      : f_(std::move(f)), singular_(std::move(singular)), acc_(acc), label_(std::move(label)),
        exclusion_(exclusion) {}

  bool admissible(double x, double y) const {
    if (domain_ && (x < domain_->x0 || x > domain_->x1 || y < domain_->y0 || y > domain_->y1)) return false;
    for (const auto& l : singular_)
      if (l.dist(x, y) < exclusion_) return false;
    return true;
  }
  BVal eval(double x, double y) const {
    if (!admissible(x, y))
      fail(ErrorKind::domain, "point (" + std::to_string(x) + ", " + std::to_string(y) + ") inside exclusion zone of " + label_);
    BVal r = f_(x, y);
    if (!std::isfinite(r.b) || !std::isfinite(r.bx) || !std::isfinite(r.by))
      fail(ErrorKind::domain, "non-finite bottom value at (" + std::to_string(x) + ", " + std::to_string(y) + ")");
    return r;
  }
  BVal eval_unchecked(double x, double y) const { return f_(x, y); }

  const std::vector<Locus>& singular() const { return singular_; }
  double exclusion() const { return exclusion_; }
  Accuracy accuracy() const { return acc_; }
  const std::string& label() const { return label_; }
  // reference point: image of the origin for catalog forms, sampling centre
  Vec2 center() const { return center_; }
  const std::optional<Box>& domain() const { return domain_; }
  double grid_error() const { return grid_error_; }

  Topography& set_center(Vec2 c) { center_ = c; return *this; }
  Topography& set_domain(Box b) { domain_ = b; return *this; }
  Topography& set_grid_error(double e) { grid_error_ = e; return *this; }
  Topography& set_label(std::string l) { label_ = std::move(l); return *this; }
  Topography& set_exclusion(double e) { exclusion_ = e; return *this; }

  // verification tolerances widen for data-derived profiles
  double tolerance_scale() const {
    if (acc_ == Accuracy::spline) return 10;
    if (acc_ == Accuracy::gridded) return std::max(10.0, grid_error_ / 1e-9);
    return 1;
  }

  // this + analytic addend (same singular set)
  Topography plus(Fn add, const std::string& what) const {
    Fn base = f_;
    Topography t = *this;
    t.f_ = [base, add](double x, double y) {
      BVal a = base(x, y), b = add(x, y);
      return BVal{a.b + b.b, a.bx + b.bx, a.by + b.by};
    };
    t.label_ = label_ + " " + what;
    return t;
  }

 private:
  Fn f_;
  std::vector<Locus> singular_;
  Accuracy acc_;
  std::string label_;
  double exclusion_;
  Vec2 center_{0, 0};
  std::optional<Box> domain_;
  double grid_error_ = 0;
};

// expression in x, y, r, phi; gradient by forward-mode differentiation
inline Topography from_expression(const std::string& src, std::vector<Locus> singular = {},
                                  std::map<std::string, double> params = {},
                                  std::shared_ptr<const Profile> f = nullptr) {
  auto e = std::make_shared<Expr>(src, std::vector<std::string>{"x", "y", "r", "phi"}, std::move(params), f);
  Accuracy acc = (f && f->is_spline()) ? Accuracy::spline : Accuracy::exact;
  auto fn = [e](double x, double y) {
    using D = Dual<2>;
    D X = D::var(x, 0), Y = D::var(y, 1);
    D r = sqrt(X * X + Y * Y), phi = atan2(Y, X);
    D v = (*e)(std::vector<D>{X, Y, r, phi});
    return BVal{v.v, v.d[0], v.d[1]};
  };
  return Topography(fn, std::move(singular), acc, src);
}

inline std::vector<Locus> origin_locus() { return {Locus{Locus::point, {0, 0}, {1, 0}}}; }
inline Locus negative_x_ray() { return Locus{Locus::ray, {0, 0}, {-1, 0}}; }
inline Locus x_axis_line() { return Locus{Locus::line, {0, 0}, {1, 0}}; }

struct CaseParams {
  double beta = 1;
  double delta = 0;
  double eps = 1;
};

// closed forms of the classification list; profile defaults to sin for
// angular arguments, cos for Cases 4-6 and exp(-s^2) for Case 2
inline Topography make_case(const std::string& id, CaseParams p = {},
                            std::shared_ptr<const Profile> f = nullptr) {
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) fail(ErrorKind::parameter, "case " + id + ": " + msg);
  };
  auto prof = [&](const char* dflt) { return f ? f : Profile::from_expr(dflt); };
  std::map<std::string, double> pm{{"beta", p.beta}, {"delta", p.delta}, {"eps", p.eps}};
  std::vector<Locus> origin = origin_locus();
  std::vector<Locus> origin_cut = {origin[0], negative_x_ray()};
  std::vector<Locus> yline = {x_axis_line()};
  Topography t;
  if (id == "generic") {
    t = from_expression("exp(x)*sin(y) + x^3*y");
  } else if (id == "1") {
    need(p.beta > 0, "beta must be positive");
    t = from_expression("f(phi + beta*log(r))/r^2", origin_cut, pm, prof("sin(s)"));
  } else if (id == "2") {
    t = from_expression("f(r) + delta*phi", p.delta != 0 ? origin_cut : origin, pm, prof("exp(-s^2)"));
  } else if (id == "3a" || id == "3b" || id == "3c") {
    const char* add = id == "3a" ? "" : (id == "3b" ? " + (x^2+y^2)/2" : " - (x^2+y^2)/2");
    t = from_expression(std::string("f(phi)/r^2") + add, origin_cut, pm, prof("sin(s)"));
  } else if (id == "4") {
    t = from_expression("f(y) + delta*x", {}, pm, prof("cos(s)"));
  } else if (id == "5") {
    t = from_expression("f(y) + x^2/2", {}, pm, prof("cos(s)"));
  } else if (id == "6") {
    t = from_expression("f(y) - x^2/2", {}, pm, prof("cos(s)"));
  } else if (id == "7a" || id == "7b" || id == "7c") {
    need(p.eps == 1 || p.eps == -1, "eps must be +-1");
    const char* add = id == "7a" ? "" : (id == "7b" ? " + (x^2+y^2)/2" : " - (x^2+y^2)/2");
    t = from_expression(std::string("eps/(x^2+y^2)") + add, origin, pm);
  } else if (id == "8a" || id == "8b" || id == "8c") {
    need(p.eps == 1 || p.eps == -1, "eps must be +-1");
    const char* add = id == "8a" ? " + delta*x" : (id == "8b" ? " + (x^2+y^2)/2" : " - (x^2+y^2)/2");
    t = from_expression(std::string("eps/y^2") + add, yline, pm);
  } else if (id == "9") {
    need(p.beta > 0 && p.beta < 1, "0 < beta < 1 required");
    t = from_expression("x^2/2 + beta^2*y^2/2", {}, pm);
  } else if (id == "10") {
    t = from_expression("x^2/2 + delta*y", {}, pm);
  } else if (id == "11") {
    need(p.beta > 0, "beta must be positive");
    t = from_expression("x^2/2 - beta^2*y^2/2", {}, pm);
  } else if (id == "12") {
    t = from_expression("-x^2/2 + delta*y", {}, pm);
  } else if (id == "13") {
    need(p.beta > 0 && p.beta < 1, "0 < beta < 1 required");
    t = from_expression("-x^2/2 - beta^2*y^2/2", {}, pm);
  } else if (id == "14a") {
    t = from_expression("0");
  } else if (id == "14b") {
    t = from_expression("x");
  } else if (id == "14c") {
    t = from_expression("(x^2+y^2)/2");
  } else if (id == "14d") {
    t = from_expression("-(x^2+y^2)/2");
  } else {
    fail(ErrorKind::parameter, "unknown case id '" + id + "'");
  }
  return t.set_label("case " + id);
}

struct SamplePlan {
  Box box;
  bool annulus = false;
  Vec2 center;
  double rmin = 0.4, rmax = 2.5;
  int n = 256;
  uint64_t seed = 1;
};

// annulus about the first point locus, else a 4x4 box about the centre
inline SamplePlan default_plan(const Topography& topo, int n = 256, uint64_t seed = 1) {
  SamplePlan p;
  p.n = n;
  p.seed = seed;
  Vec2 c = topo.center();
  p.center = c;
  p.box = {c.x - 2, c.x + 2, c.y - 2, c.y + 2};
  for (const auto& l : topo.singular())
    if (l.kind == Locus::point) {
      p.annulus = true;
      p.center = l.p;
      p.box = {l.p.x - p.rmax, l.p.x + p.rmax, l.p.y - p.rmax, l.p.y + p.rmax};
      break;
    }
  if (topo.domain()) {
    const Box& d = *topo.domain();
    double mx = 0.15 * (d.x1 - d.x0), my = 0.15 * (d.y1 - d.y0);
    p.box = {d.x0 + mx, d.x1 - mx, d.y0 + my, d.y1 - my};
    p.annulus = false;
  }
  return p;
}

inline std::vector<Vec2> sample_points(const Topography& topo, const SamplePlan& plan) {
  const Box& b = plan.box;
  if (!(b.x1 > b.x0 && b.y1 > b.y0)) fail(ErrorKind::configuration, "empty sampling box");
  double half_diag = 0.5 * std::hypot(b.x1 - b.x0, b.y1 - b.y0);
  if (topo.exclusion() > half_diag) fail(ErrorKind::configuration, "exclusion radius exceeds box half-diagonal");
  std::mt19937_64 rng(plan.seed);
  std::uniform_real_distribution<double> ux(b.x0, b.x1), uy(b.y0, b.y1);
  std::vector<Vec2> pts;
  pts.reserve(plan.n);
  long tries = 0, limit = 1000L * std::max(plan.n, 1);
  while (static_cast<int>(pts.size()) < plan.n) {
    if (++tries > limit) fail(ErrorKind::configuration, "admissible region too small for sampling plan");
    double x = ux(rng), y = uy(rng);
    if (plan.annulus) {
      double r = std::hypot(x - plan.center.x, y - plan.center.y);
      if (r < plan.rmin || r > plan.rmax) continue;
    }
    if (!topo.admissible(x, y)) continue;
    pts.push_back({x, y});
  }
  return pts;
}

// 4th-order finite-difference gradients on a lattice; bicubic evaluation between nodes
struct GridData {
  int nx = 0, ny = 0;
  double x0 = 0, y0 = 0, dx = 1, dy = 1;
  std::vector<double> b;  // row-major, index i + nx*j
};

namespace detail {
inline double fd1(const std::vector<double>& f, int n, int i, int stride, int base, double h) {
  auto at = [&](int k) { return f[base + k * stride]; };
  if (i >= 2 && i <= n - 3) return (at(i - 2) - 8 * at(i - 1) + 8 * at(i + 1) - at(i + 2)) / (12 * h);
  if (i == 0) return (-25 * at(0) + 48 * at(1) - 36 * at(2) + 16 * at(3) - 3 * at(4)) / (12 * h);
  if (i == 1) return (-3 * at(0) - 10 * at(1) + 18 * at(2) - 6 * at(3) + at(4)) / (12 * h);
  if (i == n - 1) return -(-25 * at(n - 1) + 48 * at(n - 2) - 36 * at(n - 3) + 16 * at(n - 4) - 3 * at(n - 5)) / (12 * h);
  return -(-3 * at(n - 1) - 10 * at(n - 2) + 18 * at(n - 3) - 6 * at(n - 4) + at(n - 5)) / (12 * h);
}
// 4-point Lagrange weights at fractional offset s from node 1 of nodes {0,1,2,3}
inline std::array<double, 4> lagrange4(double s) {
  double a = s + 1, b = s, c = s - 1, d = s - 2;
  return {-b * c * d / 6, a * c * d / 2, -a * b * d / 2, a * b * c / 6};
}
}  // namespace detail

inline Topography from_grid(const GridData& g) {
  if (g.nx < 8 || g.ny < 8 || static_cast<int>(g.b.size()) != g.nx * g.ny)
    fail(ErrorKind::parameter, "grid needs nx, ny >= 8 and nx*ny samples");
  auto data = std::make_shared<GridData>(g);
  auto bx = std::make_shared<std::vector<double>>(g.b.size());
  auto by = std::make_shared<std::vector<double>>(g.b.size());
  double err = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      (*bx)[i + g.nx * j] = detail::fd1(g.b, g.nx, i, 1, g.nx * j, g.dx);
      (*by)[i + g.nx * j] = detail::fd1(g.b, g.ny, j, g.nx, i, g.dy);
    }
  // accuracy tag: 4th- vs 2nd-order gradient discrepancy in the interior
  double scale = 1e-300;
  for (int j = 1; j + 1 < g.ny; ++j)
    for (int i = 1; i + 1 < g.nx; ++i) {
      double cx = (g.b[i + 1 + g.nx * j] - g.b[i - 1 + g.nx * j]) / (2 * g.dx);
      double cy = (g.b[i + g.nx * (j + 1)] - g.b[i + g.nx * (j - 1)]) / (2 * g.dy);
      err = std::max({err, std::abs(cx - (*bx)[i + g.nx * j]), std::abs(cy - (*by)[i + g.nx * j])});
      scale = std::max({scale, std::abs((*bx)[i + g.nx * j]), std::abs((*by)[i + g.nx * j])});
    }
  auto fn = [data, bx, by](double x, double y) {
    const GridData& d = *data;
    double fx = (x - d.x0) / d.dx, fy = (y - d.y0) / d.dy;
    int i = std::clamp(static_cast<int>(std::floor(fx)), 1, d.nx - 3);
    int j = std::clamp(static_cast<int>(std::floor(fy)), 1, d.ny - 3);
    auto wx = detail::lagrange4(fx - i), wy = detail::lagrange4(fy - j);
    BVal r;
    for (int b = 0; b < 4; ++b)
      for (int a = 0; a < 4; ++a) {
        int k = (i - 1 + a) + d.nx * (j - 1 + b);
        double w = wx[a] * wy[b];
        r.b += w * d.b[k];
        r.bx += w * (*bx)[k];
        r.by += w * (*by)[k];
      }
    return r;
  };
  Topography t(fn, {}, Accuracy::gridded, "grid " + std::to_string(g.nx) + "x" + std::to_string(g.ny));
  t.set_domain({g.x0, g.x0 + (g.nx - 1) * g.dx, g.y0, g.y0 + (g.ny - 1) * g.dy});
  t.set_center({g.x0 + 0.5 * (g.nx - 1) * g.dx, g.y0 + 0.5 * (g.ny - 1) * g.dy});
  t.set_grid_error(err / scale);
  return t;
}

}  // namespace swcl
