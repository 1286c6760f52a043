#pragma once
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace swcl {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Vec8 = Eigen::Matrix<double, 8, 1>;

// orthonormal basis of range(M), singular values below rel_tol*smax dropped
inline Mat orth(const Mat& M, double rel_tol = 1e-10) {
  if (M.cols() == 0 || M.rows() == 0) return Mat(M.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeThinU);
  const Vec& s = svd.singularValues();
  double smax = s.size() ? s(0) : 0;
  int r = 0;
  while (r < s.size() && s(r) > rel_tol * smax && s(r) > 0) ++r;
  return svd.matrixU().leftCols(r);
}

inline int rank_of(const Mat& M, double rel_tol = 1e-10, double abs_tol = 0) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(M);
  const Vec& s = svd.singularValues();
  int r = 0;
  while (r < s.size() && s(r) > std::max(rel_tol * s(0), abs_tol)) ++r;
  return r;
}

// orthonormal basis of null(M)
inline Mat null_space(const Mat& M, double rel_tol = 1e-10, double abs_tol = 0) {
  const int n = static_cast<int>(M.cols());
  if (M.rows() == 0) return Mat::Identity(n, n);
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  double smax = s.size() ? s(0) : 0;
  int r = 0;
  while (r < s.size() && s(r) > std::max(rel_tol * smax, abs_tol)) ++r;
  return svd.matrixV().rightCols(n - r);
}

// sine of the largest principal angle between the column spans of U and V
inline double subspace_gap(const Mat& U, const Mat& V) {
  if (U.cols() != V.cols()) return 1.0;
  if (U.cols() == 0) return 0.0;
  Mat Qu = orth(U, 1e-12), Qv = orth(V, 1e-12);
  if (Qu.cols() != Qv.cols()) return 1.0;
  Mat D1 = Qv - Qu * (Qu.transpose() * Qv);
  Mat D2 = Qu - Qv * (Qv.transpose() * Qu);
  auto nrm = [](const Mat& D) { return D.size() ? Eigen::JacobiSVD<Mat>(D).singularValues()(0) : 0.0; };
  return std::max(nrm(D1), nrm(D2));
}

// distance of v from span of the rows of A (rows need not be orthonormal)
inline double distance_to_rowspan(const Mat& A, const Vec& v) {
  if (A.rows() == 0) return v.norm();
  Mat Q = orth(A.transpose(), 1e-12);
  return (v - Q * (Q.transpose() * v)).norm();
}

}  // namespace swcl
