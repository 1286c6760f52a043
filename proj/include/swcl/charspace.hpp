#pragma once
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "chartuple.hpp"
#include "furcate.hpp"
#include "multiplier.hpp"

namespace swcl {

namespace detail {

inline QuasiPoly dot(const Vec& w, const MultiplierSolution& lam) {
  QuasiPoly r;
  for (int i = 0; i < w.size(); ++i)
    if (w(i) != 0) r = r + w(i) * lam[i];
  return r;
}

inline double gram_condition(const std::vector<CharTuple>& basis) {
  if (basis.empty()) return 1;
  Mat M = TupleCoords::build(basis).M;
  for (int i = 0; i < M.rows(); ++i) M.row(i).normalize();
  Eigen::JacobiSVD<Mat> svd(M);
  const Vec& s = svd.singularValues();
  double lo = s(s.size() - 1);
  if (s.size() < M.rows() || lo == 0) return std::numeric_limits<double>::infinity();
  return (s(0) * s(0)) / (lo * lo);
}

}  // namespace detail

// basis of the characteristic space for a detected system A (k x 8)
inline std::vector<CharTuple> solve_characteristics(const Mat& A) {
  const int k = static_cast<int>(A.rows());
  std::vector<CharTuple> out;
  if (k > 0) {
    MultiplierSystem sys;
    sys.k = k;
    Mat At = A.transpose();
    sys.second = {{At.row(0), At.row(4)}, {At.row(2), At.row(5)}, {At.row(3), At.row(6)}};
    sys.constant = {At.row(1)};
    for (const auto& lam : solve_multiplier_system(sys)) {
      CharTuple ct;
      QuasiPoly c = -detail::dot(At.row(1), lam);
      double c0 = c.constant_part();
      if ((c - QuasiPoly(c0)).max_coef() > 1e-8 * std::max(1.0, c.max_coef()))
        fail(ErrorKind::numeric, "rotation coefficient is not constant");
      ct.c1 = c0;
      ct.F1 = detail::dot(At.row(0), lam).antiderivative();
      ct.F2 = detail::dot(At.row(2), lam);
      ct.F3 = detail::dot(At.row(3), lam);
      ct.F4 = detail::dot(At.row(7), lam).antiderivative();
      out.push_back(ct);
    }
  }
  out.push_back(lam4(1));
  out.push_back(lam1(1));
  auto basis = reduce_basis(out, 1e-9);
  for (auto& b : basis) {
    b.F1 = b.F1.pruned(1e-11);
    b.F2 = b.F2.pruned(1e-11);
    b.F3 = b.F3.pruned(1e-11);
    b.F4 = b.F4.pruned(1e-11);
  }
  double cond = detail::gram_condition(basis);
  if (!(cond < 1e8)) fail(ErrorKind::numeric, "characteristic basis is ill-conditioned (" + std::to_string(cond) + ")");
  return basis;
}

struct CaseLabel {
  std::string id;
  double beta = std::numeric_limits<double>::quiet_NaN();
  double delta = std::numeric_limits<double>::quiet_NaN();
  int eps = 0;
  int expected_dim = 0;
};

inline int expected_dim(const std::string& id) {
  if (id == "generic") return 2;
  char c0 = id[0];
  if (id.size() >= 2 && id.substr(0, 2) == "14") return 9;
  if (id.size() >= 2 && id[0] == '1' && std::isdigit(static_cast<unsigned char>(id[1]))) return 6;  // 10..13
  switch (c0) {
    case '1': case '2': return 3;
    case '3': case '4': case '5': case '6': return 4;
    case '7': return 5;
    case '8': case '9': return 6;
  }
  fail(ErrorKind::internal, "no expected dimension for '" + id + "'");
}

// label from canonical rows; b_can is the gauge-shifted bottom
inline CaseLabel classify_rows(const Mat& A, const Topography& b_can, double tiny = 1e-8) {
  const int k = static_cast<int>(A.rows());
  auto z = [&](double v) { return std::abs(v) <= tiny; };
  auto sub = [&](double a5) { return z(a5) ? "a" : (a5 < 0 ? "b" : "c"); };
  CaseLabel L;
  if (k == 0) {
    L.id = "generic";
  } else if (k == 1) {
    Vec8 a = A.row(0).transpose();
    if (!z(a(0))) {
      if (!z(a(1) / a(0))) {
        L.id = "1";
        L.beta = std::abs(a(1) / a(0));
      } else {
        L.id = std::string("3") + sub(a(4) / a(0));
      }
    } else if (!z(a(1))) {
      L.id = "2";
      L.delta = a(7) / a(1);
    } else {
      double n2 = a(2) * a(2) + a(3) * a(3);
      if (z(std::sqrt(n2))) fail(ErrorKind::classification_gap, "single relation without derivative part");
      double s6 = (a(2) * a(5) + a(3) * a(6)) / n2;
      if (z(s6)) {
        L.id = "4";
        L.delta = -a(7) / std::sqrt(n2);
      } else {
        L.id = s6 < 0 ? "5" : "6";
      }
    }
  } else if (k == 2) {
    int r2 = rank_of(A.leftCols(2), 1e-8, tiny);
    if (r2 == 2) {
      L.id = std::string("7") + sub(A(0, 4));
      BVal v = b_can.eval(1, 0);
      L.eps = (v.b + A(0, 4) / 8) > 0 ? 1 : -1;
    } else if (r2 == 1) {
      L.id = std::string("8") + sub(A(0, 4));
      double n1 = A(1, 2), n2 = A(1, 3), n = std::hypot(n1, n2);
      if (z(n)) fail(ErrorKind::classification_gap, "second relation lacks a gradient part");
      BVal v = b_can.eval(-n2 / n, n1 / n);
      L.eps = v.b > 0 ? 1 : -1;
      if (L.id == "8a") L.delta = -A(1, 7) / n;
    } else {
      Eigen::Matrix2d H;
      H << -A(0, 5), -A(0, 6), -A(1, 5), -A(1, 6);
      Eigen::Matrix2d S = 0.5 * (H + H.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(S);
      Eigen::Vector2d ev = es.eigenvalues();
      double big = std::max(std::abs(ev(0)), std::abs(ev(1)));
      if (z(big)) fail(ErrorKind::classification_gap, "k = 2 with vanishing Hessian");
      auto zero = [&](double e) { return std::abs(e) <= 1e-8 * big; };
      if (zero(ev(0)) || zero(ev(1))) {
        int zi = zero(ev(0)) ? 0 : 1;
        double nz = ev(1 - zi);
        L.id = nz > 0 ? "10" : "12";
        Eigen::Vector2d g(-A(0, 7), -A(1, 7));
        L.delta = g.dot(es.eigenvectors().col(zi)) / std::sqrt(std::abs(nz));
        L.delta = std::abs(L.delta) <= tiny ? 0.0 : L.delta;
      } else if (ev(0) > 0 && ev(1) > 0) {
        L.id = "9";
        L.beta = std::sqrt(ev(0) / ev(1));
      } else if (ev(0) < 0 && ev(1) < 0) {
        L.id = "13";
        L.beta = std::sqrt(ev(1) / ev(0));
      } else {
        L.id = "11";
        L.beta = std::sqrt(-ev(0) / ev(1));
      }
    }
  } else if (k == 4) {
    double c = -A(2, 5);
    if (z(c)) {
      L.id = (z(A(2, 7)) && z(A(3, 7))) ? "14a" : "14b";
    } else {
      L.id = c > 0 ? "14c" : "14d";
    }
  } else {
    fail(ErrorKind::classification_gap, "no case for k = " + std::to_string(k));
  }
  L.expected_dim = expected_dim(L.id);
  return L;
}

struct Analysis {
  TemplateSystem system;
  CompatReport compat;
  Canonical canonical;
  CaseLabel label;
  std::vector<CharTuple> basis;
};

inline Analysis analyze(const Topography& topo, const DetectOptions& opt = {}) {
  Analysis an;
  an.system = detect_template_system(topo, opt);
  an.compat = check_compatibility(an.system, 1e-9 * topo.tolerance_scale());
  // coefficient noise follows the detection threshold (grids) or the spline tag
  double tiny = std::max(1e-8 * std::min(topo.tolerance_scale(), 10.0), 10 * an.system.threshold);
  an.canonical = canonicalize(an.system.A, std::max(1e-9, 0.1 * tiny));
  Topography can = apply_equiv_to_topo(an.canonical.gauge, topo);
  an.label = classify_rows(an.canonical.A, can, tiny);
  // same row space with noise-level entries removed
  an.basis = solve_characteristics(rref4(an.system.A, 0.1 * tiny, tiny));
  if (static_cast<int>(an.basis.size()) != an.label.expected_dim)
    fail(ErrorKind::classification_gap, "case " + an.label.id + " expects dimension " +
                                            std::to_string(an.label.expected_dim) + ", solver found " +
                                            std::to_string(an.basis.size()));
  return an;
}

inline CaseLabel classify_case(const Topography& topo, const DetectOptions& opt = {}) { return analyze(topo, opt).label; }

// gamma of each tuple sampled at states: columns = tuples
inline Mat sampled_span(const std::vector<CharTuple>& ts, const Topography& topo, const std::vector<JetPoint>& pts) {
  Mat M(3 * pts.size(), ts.size());
  for (size_t j = 0; j < ts.size(); ++j) {
    TupleEval te(ts[j]);
    for (size_t i = 0; i < pts.size(); ++i) {
      const auto& p = pts[i];
      BVal b = topo.eval(p.x, p.y);
      auto g = gamma_of(te.at(p.t), p.x, p.y, p.u, p.v, p.h, b.b);
      for (int c = 0; c < 3; ++c) M(3 * i + c, j) = g[c];
    }
  }
  return M;
}

}  // namespace swcl
