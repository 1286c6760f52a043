#pragma once
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "equiv.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "topography.hpp"

// detection of the template-form system satisfied by b
namespace swcl {

// (x b_x + y b_y + 2b, y b_x - x b_y, b_x, b_y, r^2/2, x, y, 1)
inline Vec8 template_row(double x, double y, const BVal& v) {
  Vec8 e;
  e << x * v.bx + y * v.by + 2 * v.b, y * v.bx - x * v.by, v.bx, v.by, 0.5 * (x * x + y * y), x, y, 1.0;
  return e;
}

inline Vec8 eval_template_basis(const Topography& topo, double x, double y) {
  return template_row(x, y, topo.eval(x, y));
}

inline constexpr double kGriddedTolCap = 1e-3;
inline constexpr double kGriddedMinGap = 1e2;

struct DetectOptions {
  int n = 256;
  uint64_t seed = 1;
  int resamples = 3;
  double rel_tol = 1e-9;
  double min_gap = 1e6;
  double max_angle = 1e-6;
};

struct TemplateSystem {
  Mat A;  // k x 8, orthonormal rows
  int k = 0;
  Vec sigma;  // singular values of the equilibrated sample matrix, descending
  double gap = 0;
  double max_angle = 0;  // worst row-space disagreement across resamples
  double threshold = 0;
  SamplePlan plan;
};

namespace detail {

struct OneDetect {
  Mat A;
  int k;
  Vec sigma;
  double gap;
};

inline OneDetect detect_once(const Topography& topo, const SamplePlan& plan, double rel_tol) {
  auto pts = sample_points(topo, plan);
  Mat M(pts.size(), 8);
  for (size_t i = 0; i < pts.size(); ++i) M.row(i) = eval_template_basis(topo, pts[i].x, pts[i].y).transpose();
  // the four b-dependent columns share one scale, so a column that vanishes up to
  // rounding or grid error is not blown up; the analytic ones are normalized
  Vec scale(8);
  double nb = M.leftCols(4).colwise().norm().maxCoeff();
  for (int j = 0; j < 8; ++j) {
    double n = j < 4 ? nb : M.col(j).norm();
    scale(j) = n > 0 ? 1.0 / n : 1.0;
    M.col(j) *= scale(j);
  }
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
  Vec s = svd.singularValues();
  double smax = s(0);
  int k = 0;
  for (int i = 7; i >= 0 && s(i) < rel_tol * smax; --i) ++k;
  double floor = 1e-16 * smax;
  double kept = k < 8 ? s(7 - k) : 0;
  double dropped = k > 0 ? s(8 - k) : 0;
  double gap = kept / std::max(dropped, floor);
  Mat N = svd.matrixV().rightCols(k);
  // back to unscaled coefficients, orthonormal rows
  for (int j = 0; j < 8; ++j) N.row(j) *= scale(j);
  Mat A = k ? Mat(orth(N, 1e-14).transpose()) : Mat(0, 8);
  return {A, k, s, gap};
}

}  // namespace detail

inline TemplateSystem detect_template_system(const Topography& topo, const DetectOptions& opt = {}) {
  double rel_tol = opt.rel_tol, min_gap = opt.min_gap, max_angle = opt.max_angle;
  if (topo.accuracy() == Accuracy::gridded) {
    // the widening formula is unbounded; past 1e-3 nothing would separate
    rel_tol = std::min(rel_tol * (1 + topo.grid_error() / std::numeric_limits<double>::epsilon()), kGriddedTolCap);
    min_gap = std::min(min_gap, kGriddedMinGap);
    max_angle = std::max(max_angle, std::sqrt(rel_tol));
  }
  SamplePlan plan = default_plan(topo, opt.n, opt.seed);
  if (plan.n < 64) fail(ErrorKind::configuration, "detection needs at least 64 sample points");
  TemplateSystem sys;
  sys.plan = plan;
  sys.threshold = rel_tol;
  std::vector<detail::OneDetect> runs;
  for (int r = 0; r < std::max(1, opt.resamples); ++r) {
    SamplePlan p = plan;
    p.seed = plan.seed + 7919ULL * r;
    runs.push_back(detail::detect_once(topo, p, rel_tol));
  }
  const auto& first = runs.front();
  for (const auto& r : runs) {
    if (r.k != first.k)
      fail(ErrorKind::detection_instability, "k differs across resamples (" + std::to_string(first.k) + " vs " + std::to_string(r.k) + ")");
    if (r.gap < min_gap)
      fail(ErrorKind::detection_instability, "spectral gap " + std::to_string(r.gap) + " below required " + std::to_string(min_gap));
    if (r.k) sys.max_angle = std::max(sys.max_angle, subspace_gap(first.A.transpose(), r.A.transpose()));
  }
  if (sys.max_angle > max_angle)
    fail(ErrorKind::detection_instability, "template row space unstable across resamples");
  sys.A = first.A;
  sys.k = first.k;
  sys.sigma = first.sigma;
  sys.gap = first.gap;
  for (const auto& r : runs) sys.gap = std::min(sys.gap, r.gap);
  if (sys.k == 3) fail(ErrorKind::impossibility, "detected k = 3, which no bottom topography admits");
  if (sys.k > 4) fail(ErrorKind::inconsistency, "detected k = " + std::to_string(sys.k) + " > 4");
  if (sys.k && rank_of(sys.A.leftCols(4), 1e-8) < sys.k) fail(ErrorKind::inconsistency, "rank A4 < k");
  return sys;
}

// bracket of the associated vector fields, in template coefficients
inline Vec8 bracket_vf(const Vec8& a, const Vec8& b) {
  Vec8 c;
  c(0) = 0;
  c(1) = 0;
  c(2) = b(0) * a(2) + b(1) * a(3) - a(0) * b(2) - a(1) * b(3);
  c(3) = -b(1) * a(2) + b(0) * a(3) + a(1) * b(2) - a(0) * b(3);
  c(4) = 4 * (a(0) * b(4) - b(0) * a(4));
  c(5) = -((a(4) * b(2) - b(4) * a(2)) + 3 * (b(0) * a(5) - a(0) * b(5)) + (b(6) * a(1) - a(6) * b(1)));
  c(6) = -((a(4) * b(3) - b(4) * a(3)) + (a(5) * b(1) - b(5) * a(1)) + 3 * (b(0) * a(6) - a(0) * b(6)));
  c(7) = -((a(5) * b(2) - b(5) * a(2)) + (a(6) * b(3) - b(6) * a(3)) + 2 * (b(0) * a(7) - a(0) * b(7)));
  return c;
}

struct CompatReport {
  double worst = 0;
  int i = -1, j = -1;
  bool ok = true;
};

inline CompatReport compatibility_report(const Mat& A, double tol = 1e-9) {
  CompatReport rep;
  for (int i = 0; i < A.rows(); ++i)
    for (int j = i + 1; j < A.rows(); ++j) {
      Vec8 vi = A.row(i).transpose().normalized(), vj = A.row(j).transpose().normalized();
      double d = distance_to_rowspan(A, bracket_vf(vi, vj));
      if (d > rep.worst) rep = {d, i, j, true};
    }
  rep.ok = rep.worst < tol;
  return rep;
}

inline CompatReport check_compatibility(const TemplateSystem& sys, double tol = 1e-9) {
  CompatReport rep = compatibility_report(sys.A, tol);
  if (!rep.ok)
    fail(ErrorKind::compatibility, "bracket of rows " + std::to_string(rep.i) + ", " + std::to_string(rep.j) +
                                       " leaves the span by " + std::to_string(rep.worst));
  return rep;
}

// row action of b~(X) = b(X - (p, q)) + s on template coefficients
inline Vec8 shift_row(const Vec8& a, double p, double q, double s) {
  Vec8 r = a;
  r(2) = a(2) - a(0) * p - a(1) * q;
  r(3) = a(3) - a(0) * q + a(1) * p;
  r(5) = a(5) - a(4) * p;
  r(6) = a(6) - a(4) * q;
  r(7) = a(7) - 2 * a(0) * s + 0.5 * a(4) * (p * p + q * q) - a(5) * p - a(6) * q;
  return r;
}

// reduced row-echelon form over the first four columns, unit pivots
inline Mat rref4(Mat A, double snap = 1e-11, double piv_tol = 1e-9) {
  const int k = static_cast<int>(A.rows());
  int row = 0;
  for (int col = 0; col < 4 && row < k; ++col) {
    int piv = row;
    for (int r = row; r < k; ++r)
      if (std::abs(A(r, col)) > std::abs(A(piv, col))) piv = r;
    if (std::abs(A(piv, col)) < piv_tol * std::max(1.0, A.cwiseAbs().maxCoeff())) continue;
    A.row(row).swap(A.row(piv));
    A.row(row) /= A(row, col);
    for (int r = 0; r < k; ++r)
      if (r != row) A.row(r) -= A(r, col) * A.row(row);
    ++row;
  }
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      if (std::abs(A(i, j)) < snap) A(i, j) = 0;
  return A;
}

struct Canonical {
  Mat A;  // canonical rows
  EquivElement gauge;  // b_canonical = gauge(b)
  Mat recombination;  // A = recombination * shifted(original rows)
};

// tiny: level below which a coefficient counts as zero (1e-9 for exact data)
inline Canonical canonicalize(const Mat& A0, double tiny = 1e-9) {
  Canonical out;
  const int k = static_cast<int>(A0.rows());
  if (k == 0) {
    out.A = A0;
    out.recombination = Mat(0, 0);
    return out;
  }
  const double snap = 1e-2 * tiny;
  Mat A = rref4(A0, snap, tiny);
  double p = 0, q = 0, s = 0;
  int ab = -1, a5 = -1;
  for (int i = 0; i < k; ++i) {
    if (ab < 0 && std::hypot(A(i, 0), A(i, 1)) > tiny) ab = i;
    if (a5 < 0 && std::abs(A(i, 4)) > tiny) a5 = i;
  }
  if (ab >= 0) {
    double a1 = A(ab, 0), a2 = A(ab, 1), a3 = A(ab, 2), a4 = A(ab, 3), n = a1 * a1 + a2 * a2;
    p = (a1 * a3 - a2 * a4) / n;
    q = (a2 * a3 + a1 * a4) / n;
  } else if (a5 >= 0) {
    p = A(a5, 5) / A(a5, 4);
    q = A(a5, 6) / A(a5, 4);
  } else {
    Mat L = A.middleCols(5, 2);
    if (L.cwiseAbs().maxCoeff() > tiny) {
      Vec pq = L.completeOrthogonalDecomposition().solve(Vec(A.col(7)));
      p = pq(0);
      q = pq(1);
    }
  }
  Mat S(k, 8);
  for (int i = 0; i < k; ++i) S.row(i) = shift_row(A.row(i).transpose(), p, q, 0).transpose();
  for (int i = 0; i < k; ++i)
    if (std::abs(S(i, 0)) > tiny) {
      s = S(i, 7) / (2 * S(i, 0));
      break;
    }
  Mat shifted(k, 8);
  for (int i = 0; i < k; ++i) shifted.row(i) = shift_row(A0.row(i).transpose(), p, q, s).transpose();
  out.A = rref4(shifted, snap, tiny);
  out.gauge = EquivElement::shift(p, q, s);
  out.recombination = out.A * shifted.completeOrthogonalDecomposition().pseudoInverse();
  return out;
}

}  // namespace swcl
