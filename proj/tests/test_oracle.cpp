#include <gtest/gtest.h>

#include <cmath>

#include "oracle.hpp"
#include "swcl/catalog.hpp"
#include "swcl/charspace.hpp"

using namespace swcl;

TEST(Fornberg, ThreePointStencil) {
  Mat c = oracle::fd_weights(0, {-1, 0, 1}, 2);
  EXPECT_NEAR(c(0, 1), -0.5, 1e-15);
  EXPECT_NEAR(c(1, 1), 0, 1e-15);
  EXPECT_NEAR(c(2, 1), 0.5, 1e-15);
  EXPECT_NEAR(c(0, 2), 1, 1e-15);
  EXPECT_NEAR(c(1, 2), -2, 1e-15);
  EXPECT_NEAR(c(2, 2), 1, 1e-15);
}

// 9-point stencils differentiate degree-8 polynomials exactly, boundary rows included
TEST(Fornberg, PolynomialExactness) {
  auto g = oracle::make_grid(40);
  const int n = static_cast<int>(g.t.size());
  Vec f(n), f1(n), f2(n), f3(n);
  for (int i = 0; i < n; ++i) {
    double t = g.t[i];
    f(i) = std::pow(t, 8) - 3 * t * t * t;
    f1(i) = 8 * std::pow(t, 7) - 9 * t * t;
    f2(i) = 56 * std::pow(t, 6) - 18 * t;
    f3(i) = 336 * std::pow(t, 5) - 18;
  }
  EXPECT_LT((g.D1 * f - f1).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT((g.D2 * f - f2).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((g.D3 * f - f3).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(Oracle, ZeroBottomNullDimension) {
  auto t = from_expression("0");
  std::vector<CharTuple> want = {lam0(),  lam1(1), lam1(QuasiPoly::mono(1)), lam1(QuasiPoly::mono(2)),
                                 lam2(1), lam2(QuasiPoly::mono(1)), lam3(1), lam3(QuasiPoly::mono(1)), lam4(1)};
  auto c = oracle::compare(t, want);
  EXPECT_EQ(c.oracle_dim, 9);
  EXPECT_LT(c.angle, 1e-6);
}

// a wrong span is rejected
TEST(Oracle, DetectsWrongSpan) {
  auto t = make_case("9", {0.5, 0, 1});
  auto basis = analyze(t).basis;
  basis.back() = lam3(QuasiPoly::expo(0.7));
  EXPECT_GT(oracle::compare(t, basis).angle, 1e-2);
}

// solver span = reference span = collocation null space, fixture by fixture
TEST(Catalog, SolverMatchesReferenceAndOracle) {
  for (const auto& f : fixture_catalog()) {
    auto t = f.make();
    auto an = analyze(t);
    EXPECT_EQ(an.label.id, f.case_id) << f.name;
    EXPECT_EQ(an.system.k, f.k) << f.name;
    ASSERT_EQ(static_cast<int>(an.basis.size()), f.dim) << f.name;
    auto joint = an.basis;
    joint.insert(joint.end(), f.basis.begin(), f.basis.end());
    EXPECT_EQ(tuple_rank(joint, 1e-8), f.dim) << f.name;
    auto c = oracle::compare(t, an.basis);
    EXPECT_EQ(c.oracle_dim, f.dim) << f.name;
    EXPECT_LT(c.angle, 1e-6) << f.name;
  }
}
