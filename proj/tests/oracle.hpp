#pragma once
// Time-collocation oracle for the characteristic space. Independent of the
// template detection and the eigen solver: the classifying equation is imposed
// directly on nodal values of F1..F4 (plus the constant c1) at a set of
// admissible points, with finite-difference t-derivatives.
#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "swcl/chartuple.hpp"
#include "swcl/topography.hpp"

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Fornberg's recursion: weights for derivatives 0..m at z from nodes x
inline Mat fd_weights(double z, const std::vector<double>& x, int m) {
  const int n = static_cast<int>(x.size());
  Mat c = Mat::Zero(n, m + 1);
  double c1 = 1, c4 = x[0] - z;
  c(0, 0) = 1;
  for (int i = 1; i < n; ++i) {
    int mn = std::min(i, m);
    double c2 = 1, c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k) c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c;
}

struct Grid {
  std::vector<double> t;
  Mat D1, D2, D3;
};

// uniform nodes, width-w stencils shifted inward at the ends
inline Grid make_grid(int n = 200, double t0 = -1, double t1 = 1, int w = 9) {
  Grid g;
  for (int i = 0; i < n; ++i) g.t.push_back(t0 + (t1 - t0) * i / (n - 1));
  g.D1 = g.D2 = g.D3 = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    int s = std::clamp(i - w / 2, 0, n - w);
    std::vector<double> xs(g.t.begin() + s, g.t.begin() + s + w);
    Mat c = fd_weights(g.t[i], xs, 3);
    for (int k = 0; k < w; ++k) {
      g.D1(i, s + k) = c(k, 1);
      g.D2(i, s + k) = c(k, 2);
      g.D3(i, s + k) = c(k, 3);
    }
  }
  return g;
}

// column layout: [c1, F1(t_0..), F2(..), F3(..), F4(..)]
inline Mat collocation_matrix(const Grid& g, const swcl::Topography& topo, const std::vector<swcl::Vec2>& pts) {
  const int n = static_cast<int>(g.t.size()), P = static_cast<int>(pts.size());
  Mat M = Mat::Zero(n * P, 1 + 4 * n);
  for (int p = 0; p < P; ++p) {
    const double x = pts[p].x, y = pts[p].y, r2 = x * x + y * y;
    swcl::BVal b = topo.eval(x, y);
    for (int i = 0; i < n; ++i) {
      auto row = M.row(p * n + i);
      row(0) = x * b.by - y * b.bx;
      row.segment(1, n) = (x * b.bx + y * b.by + 2 * b.b) * g.D1.row(i) - 0.5 * r2 * g.D3.row(i);
      row.segment(1 + n, n) = -x * g.D2.row(i);
      row(1 + n + i) += b.bx;
      row.segment(1 + 2 * n, n) = -y * g.D2.row(i);
      row(1 + 2 * n + i) += b.by;
      row.segment(1 + 3 * n, n) = g.D1.row(i);
      row /= row.norm();
    }
  }
  return M;
}

struct NullResult {
  Mat basis;     // columns span the discrete null space
  Vec sigma;     // singular values, descending
  double gap = 0;  // sigma[r-1] / sigma[r] at the chosen split
};

// null space read off the largest spectral gap among the small singular values
inline NullResult null_space(const Mat& M, double small = 1e-5) {
  Eigen::HouseholderQR<Mat> qr(M);
  Mat R = qr.matrixQR().topRows(M.cols()).triangularView<Eigen::Upper>();
  Eigen::BDCSVD<Mat> svd(R, Eigen::ComputeFullV);
  NullResult out;
  out.sigma = svd.singularValues();
  const Vec& s = out.sigma;
  const int n = static_cast<int>(s.size());
  int split = n;
  for (int j = 1; j < n; ++j) {
    if (s(j) > small * s(0)) continue;
    double ratio = s(j - 1) / std::max(s(j), 1e-15 * s(0));
    if (ratio > out.gap) out.gap = ratio, split = j;
  }
  out.basis = svd.matrixV().rightCols(n - split);
  return out;
}

// nodal coordinates of a tuple on the grid
inline Vec sample(const swcl::CharTuple& ct, const Grid& g) {
  const int n = static_cast<int>(g.t.size());
  Vec v(1 + 4 * n);
  v(0) = ct.c1;
  for (int i = 0; i < n; ++i) {
    v(1 + i) = ct.F1(g.t[i]);
    v(1 + n + i) = ct.F2(g.t[i]);
    v(1 + 2 * n + i) = ct.F3(g.t[i]);
    v(1 + 3 * n + i) = ct.F4(g.t[i]);
  }
  return v;
}

// sine of the largest principal angle; 1 when dimensions differ
inline double principal_gap(const Mat& U, const Mat& V) {
  if (U.cols() != V.cols()) return 1;
  if (U.cols() == 0) return 0;
  Mat Qu = Eigen::HouseholderQR<Mat>(U).householderQ() * Mat::Identity(U.rows(), U.cols());
  Mat Qv = Eigen::HouseholderQR<Mat>(V).householderQ() * Mat::Identity(V.rows(), V.cols());
  Mat D = Qv - Qu * (Qu.transpose() * Qv);
  return Eigen::JacobiSVD<Mat>(D).singularValues()(0);
}

struct Comparison {
  int oracle_dim = 0;
  int solver_dim = 0;
  double angle = 1;
  double gap = 0;
};

inline Comparison compare(const swcl::Topography& topo, const std::vector<swcl::CharTuple>& basis, int npts = 12,
                          uint64_t seed = 77) {
  Grid g = make_grid();
  std::vector<swcl::Vec2> pts;
  for (const auto& q : swcl::sample_points(topo, swcl::default_plan(topo, npts, seed))) pts.push_back({q.x, q.y});
  NullResult nr = null_space(collocation_matrix(g, topo, pts));
  Mat S(1 + 4 * static_cast<int>(g.t.size()), static_cast<int>(basis.size()));
  for (size_t j = 0; j < basis.size(); ++j) S.col(j) = sample(basis[j], g);
  Comparison c;
  c.oracle_dim = static_cast<int>(nr.basis.cols());
  c.solver_dim = static_cast<int>(basis.size());
  c.gap = nr.gap;
  c.angle = principal_gap(S, nr.basis);
  return c;
}

}  // namespace oracle
