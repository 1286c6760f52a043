#pragma once
#include <Eigen/Eigenvalues>
#include <complex>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "quasipoly.hpp"

// Solution space of the constant-coefficient system on lambda(t) in R^k
//   p_j . lambda'' = -c_j . lambda   (second-order relations)
//   g . lambda' = 0                  (constancy relations)
// reduced to X' = G X on the invariant subspace of consistent states X = (lambda, lambda').
namespace swcl {

struct MultiplierSystem {
  int k = 0;
  std::vector<std::pair<Vec, Vec>> second;  // (p, c)
  std::vector<Vec> constant;                // g
};

using MultiplierSolution = std::vector<QuasiPoly>;  // lambda_1..lambda_k

namespace detail {

using CMat = Eigen::MatrixXcd;

inline Mat constraint_rows(const MultiplierSystem& sys) {
  const int k = sys.k;
  Mat C(sys.second.size() + sys.constant.size(), 3 * k);
  C.setZero();
  int r = 0;
  for (const auto& [p, c] : sys.second) {
    C.block(r, 0, 1, k) = c.transpose();
    C.block(r, 2 * k, 1, k) = p.transpose();
    ++r;
  }
  for (const auto& g : sys.constant) C.block(r++, k, 1, k) = g.transpose();
  return C;
}

inline CMat cnull(const CMat& M, double rel_tol) {
  Eigen::JacobiSVD<CMat> svd(M, Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  double smax = std::max(1.0, s.size() ? s(0) : 0.0);
  int r = 0;
  while (r < s.size() && s(r) > rel_tol * smax) ++r;
  return svd.matrixV().rightCols(M.cols() - r);
}

}  // namespace detail

// reduced generator restricted to the consistent subspace: X = Q y, y' = G y
struct ReducedFlow {
  Mat Q;  // 2k x m orthonormal
  Mat G;  // m x m
};

inline ReducedFlow reduce_multiplier_system(const MultiplierSystem& sys) {
  const int k = sys.k, n = 2 * k;
  const Mat C0 = detail::constraint_rows(sys);
  Mat S = Mat::Identity(n, n);
  Mat K;
  for (int iter = 0; iter <= n + 2; ++iter) {
    Mat Nperp = null_space(S.transpose(), 1e-12);  // complement of span(S)
    Mat C(C0.rows() + 2 * Nperp.cols(), 3 * k);
    C.setZero();
    C.topRows(C0.rows()) = C0;
    if (Nperp.cols()) {
      C.block(C0.rows(), 0, Nperp.cols(), n) = Nperp.transpose();
      C.block(C0.rows() + Nperp.cols(), k, Nperp.cols(), n) = Nperp.transpose();
    }
    K = C.rows() ? null_space(C, 1e-10) : Mat(Mat::Identity(3 * k, 3 * k));
    Mat Snew = orth(K.topRows(n), 1e-10);
    bool stable = Snew.cols() == S.cols();
    S = Snew;
    if (stable) break;
    if (iter == n + 2) fail(ErrorKind::numeric, "consistent subspace iteration did not settle");
  }
  const int m = static_cast<int>(S.cols());
  ReducedFlow rf{S, Mat(m, m)};
  if (m == 0) return rf;
  Mat Kx = K.topRows(n);
  if (rank_of(Kx, 1e-9) < K.cols())
    fail(ErrorKind::numeric, "state does not determine the highest derivatives; solution space is not finite-dimensional");
  Mat Kd = K.bottomRows(n);  // (lambda', lambda'')
  Mat Gfull = Kd * Kx.completeOrthogonalDecomposition().pseudoInverse();
  rf.G = S.transpose() * Gfull * S;
  return rf;
}

inline std::vector<MultiplierSolution> solve_multiplier_system(const MultiplierSystem& sys) {
  using cd = std::complex<double>;
  std::vector<MultiplierSolution> out;
  if (sys.k == 0) return out;
  ReducedFlow rf = reduce_multiplier_system(sys);
  const int m = static_cast<int>(rf.G.cols());
  if (m == 0) return out;
  const Mat& G = rf.G;
  Eigen::EigenSolver<Mat> es(G, false);
  if (es.info() != Eigen::Success) fail(ErrorKind::numeric, "eigen decomposition failed");
  std::vector<cd> ev(es.eigenvalues().data(), es.eigenvalues().data() + m);
  double scale = std::max(1.0, G.norm());

  struct Cluster {
    cd mean;
    int size;
  };
  std::vector<Cluster> clusters;
  bool ok = false;
  // loosest first: defective eigenvalues split by O(eps^(1/s)) must merge; the nullity
  // test rejects merges of genuinely distinct ones
  for (double ctol : {1e-3, 1e-4, 1e-5, 1e-7, 1e-9}) {
    // single-linkage grouping
    std::vector<int> lab(m, -1);
    int nl = 0;
    for (int i = 0; i < m; ++i) {
      if (lab[i] >= 0) continue;
      lab[i] = nl;
      std::vector<int> stack{i};
      while (!stack.empty()) {
        int a = stack.back();
        stack.pop_back();
        for (int b = 0; b < m; ++b)
          if (lab[b] < 0 && std::abs(ev[a] - ev[b]) < ctol * scale) lab[b] = nl, stack.push_back(b);
      }
      ++nl;
    }
    clusters.assign(nl, {0, 0});
    for (int i = 0; i < m; ++i) clusters[lab[i]].mean += ev[i], clusters[lab[i]].size++;
    int total = 0;
    bool good = true;
    for (auto& c : clusters) {
      c.mean /= double(c.size);
      if (std::abs(c.mean.imag()) < 1e-10 * scale) c.mean.imag(0);
      if (std::abs(c.mean.real()) < 1e-10 * scale) c.mean.real(0);
      if (c.mean.imag() < 0) continue;
      detail::CMat Mc = G.cast<cd>() - c.mean * detail::CMat::Identity(m, m);
      detail::CMat P = detail::CMat::Identity(m, m);
      for (int s = 0; s < c.size; ++s) P = P * Mc;
      int nullity = static_cast<int>(detail::cnull(P, 1e-8 * std::pow(scale, c.size)).cols());
      if (nullity != c.size) good = false;
      total += (c.mean.imag() > 0 ? 2 : 1) * nullity;
    }
    if (good && total == m) {
      ok = true;
      break;
    }
  }
  if (!ok) fail(ErrorKind::numeric, "could not resolve the generalized eigenstructure");

  const int k = sys.k;
  Mat Qlam = rf.Q.topRows(k);
  for (const auto& c : clusters) {
    if (c.mean.imag() < 0) continue;
    detail::CMat Nc = G.cast<cd>() - c.mean * detail::CMat::Identity(m, m);
    detail::CMat P = detail::CMat::Identity(m, m);
    for (int s = 0; s < c.size; ++s) P = P * Nc;
    bool complex = c.mean.imag() > 0;
    detail::CMat V = complex ? detail::cnull(P, 1e-8 * std::pow(scale, c.size))
                             : detail::CMat(null_space(P.real(), 1e-8, 1e-8 * std::pow(scale, c.size)).cast<cd>());
    for (int col = 0; col < V.cols(); ++col) {
      // chain w_n = N^n v / n!
      std::vector<Eigen::VectorXcd> w;
      Eigen::VectorXcd cur = V.col(col);
      double fact = 1;
      for (int n = 0; n < c.size; ++n) {
        w.push_back(cur / fact);
        cur = Nc * cur;
        fact *= (n + 1);
      }
      for (int part = 0; part < (complex ? 2 : 1); ++part) {
        MultiplierSolution sol(k);
        for (int i = 0; i < k; ++i) {
          std::vector<QpTerm> ts;
          for (int n = 0; n < c.size; ++n) {
            cd coef = (Qlam.row(i).cast<cd>() * w[n])(0);
            if (!complex) {
              ts.push_back({c.mean.real(), 0, n, coef.real(), 0});
            } else if (part == 0) {
              ts.push_back({c.mean.real(), c.mean.imag(), n, coef.real(), -coef.imag()});
            } else {
              ts.push_back({c.mean.real(), c.mean.imag(), n, coef.imag(), coef.real()});
            }
          }
          sol[i] = QuasiPoly(ts);
        }
        out.push_back(std::move(sol));
      }
    }
  }
  return out;
}

}  // namespace swcl
