#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "swcl/charspace.hpp"

using namespace swcl;

namespace {

using QP = QuasiPoly;

bool in_span(const std::vector<CharTuple>& basis, const CharTuple& t) {
  auto with = basis;
  with.push_back(t);
  return tuple_rank(with, 1e-8) == tuple_rank(basis, 1e-8);
}

void expect_vec(const std::array<double, 3>& got, std::array<double, 3> want, double tol = 1e-14) {
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(got[i], want[i], tol) << "component " << i;
}

Topography zero() { return from_expression("0"); }

}  // namespace

TEST(EvalCharacteristic, Examples) {
  expect_vec(eval_characteristic(lam4(1), make_case("generic"), {0.3, 0.2, -0.4, 1.5, -2, 0.7}), {0, 0, 1});
  expect_vec(eval_characteristic(lam0(), zero(), {0, 1, 0, 0, 1, 2}), {0, 2, 1});
  expect_vec(eval_characteristic(lam1(1), zero(), {0, 0, 0, 1, 0, 1}), {-2, 0, -3});
}

TEST(EvalCharacteristic, NonPositiveDepth) {
  try {
    eval_characteristic(lam4(1), zero(), {0, 0, 0, 0, 0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind, ErrorKind::domain);
  }
}

TEST(EvalCurrent, Examples) {
  expect_vec(eval_current(lam4(1), zero(), {0, 0, 0, 2, 3, 1}), {1, 2, 3});
  EXPECT_NEAR(eval_current(lam0(), zero(), {0, 1, 0, 0, 1, 2})[0], 2, 1e-14);
  EXPECT_NEAR(eval_current(lam1(1), zero(), {0, 0, 0, 0, 0, 1})[0], -1, 1e-14);
}

TEST(ResidualClassifying, TrivialTuples) {
  auto t = make_case("generic");
  auto pts = random_jets<JetPoint>(t, 100, 1);
  EXPECT_EQ(residual_classifying(lam4(1), t, pts), 0);
  EXPECT_EQ(residual_classifying(lam1(1), t, pts), 0);
}

TEST(ResidualClassifying, Case3aBasis) {
  auto t = make_case("3a");
  auto an = analyze(t);
  auto pts = random_jets<JetPoint>(t, 1000, 2);
  for (const auto& b : an.basis) EXPECT_LT(residual_classifying(b, t, pts), 1e-9) << b.str();
}

TEST(ResidualCosymmetry, Examples) {
  auto jets_g = random_jets<JetPoint>(make_case("generic"), 1000, 3);
  EXPECT_EQ(residual_cosymmetry(lam4(1), make_case("generic"), jets_g), 0);
  auto p = make_case("14c");
  EXPECT_LT(residual_cosymmetry(lam1(1), p, random_jets<JetPoint>(p, 1000, 4)), 1e-10);
  EXPECT_GT(residual_cosymmetry(lam2(1), make_case("generic"), jets_g), 1e-2);
}

TEST(ResidualDivergence, Examples) {
  auto g = make_case("generic");
  EXPECT_LT(residual_divergence(lam4(1), g, random_jets<ExtJet>(g, 200, 5)), 1e-13);
  auto z = zero();
  auto an = analyze(z);
  auto jets = random_jets<ExtJet>(z, 1000, 6);
  for (const auto& b : an.basis) EXPECT_LT(residual_divergence(b, z, jets), 1e-9) << b.str();
  // F4 -> F4 + t leaves h * F4_t behind; equals 1 at unit depth
  TupleEval te(lam4(QP(1) + QP::mono(1)));
  for (auto j : random_jets<ExtJet>(z, 50, 7)) {
    EXPECT_NEAR(divergence_defect(te, z, j), j.h, 1e-12);
    j.h = 1;
    EXPECT_NEAR(std::abs(divergence_defect(te, z, j)), 1, 1e-12);
  }
}

TEST(Solve, GenericTwo) {
  auto an = analyze(make_case("generic"));
  ASSERT_EQ(an.basis.size(), 2u);
  EXPECT_TRUE(in_span(an.basis, lam4(1)));
  EXPECT_TRUE(in_span(an.basis, lam1(1)));
}

TEST(Solve, ZeroBottomNine) {
  auto an = analyze(zero());
  ASSERT_EQ(an.basis.size(), 9u);
  std::vector<CharTuple> want = {lam0(),      lam1(1),      lam1(QP::mono(1)), lam1(QP::mono(2)), lam2(1),
                                 lam2(QP::mono(1)), lam3(1), lam3(QP::mono(1)), lam4(1)};
  for (const auto& w : want) EXPECT_TRUE(in_span(an.basis, w)) << w.str();
  EXPECT_EQ(tuple_rank(want), 9);
}

TEST(Solve, Case9HalfBeta) {
  auto an = analyze(make_case("9", {0.5, 0, 1}));
  ASSERT_EQ(an.basis.size(), 6u);
  for (const auto& w : {lam2(QP::expo(1)), lam2(QP::expo(-1)), lam3(QP::expo(0.5)), lam3(QP::expo(-0.5)), lam1(QP(1)),
                        lam4(1)})
    EXPECT_TRUE(in_span(an.basis, w)) << w.str();
}

TEST(Solve, LinearBottomMomentum) {
  // d/dt int hu = int h b_x = mass for b = x
  auto an = analyze(from_expression("x"));
  EXPECT_TRUE(in_span(an.basis, lam2(1) + lam4(QP::mono(1, -1))));
  EXPECT_FALSE(in_span(an.basis, lam2(1)));
}

TEST(Solve, OscillatoryProfiles) {
  // b = -r^2/2 gives trigonometric F2, F3 and F1 in {1, cos 2t, sin 2t}
  auto an = analyze(make_case("14d"));
  ASSERT_EQ(an.basis.size(), 9u);
  for (const auto& w : {lam2(QP::cosine(1)), lam2(QP::sine(1)), lam3(QP::cosine(1)), lam3(QP::sine(1)),
                        lam1(QP::cosine(2)), lam1(QP::sine(2)), lam0()})
    EXPECT_TRUE(in_span(an.basis, w)) << w.str();
}

TEST(Classify, Examples) {
  auto a = analyze(from_expression("sin(phi)/r^2", {origin_locus()[0], negative_x_ray()}));
  EXPECT_EQ(a.label.id, "3a");
  EXPECT_EQ(a.basis.size(), 4u);
  auto b = analyze(from_expression("x"));
  EXPECT_EQ(b.label.id, "14b");
  EXPECT_EQ(b.basis.size(), 9u);
  auto c = analyze(from_expression("1/y^2", {x_axis_line()}));
  EXPECT_EQ(c.label.id, "8a");
  EXPECT_NEAR(c.label.delta, 0, 1e-9);
  EXPECT_EQ(c.label.eps, 1);
  EXPECT_EQ(c.basis.size(), 6u);
}

TEST(Classify, Parameters) {
  EXPECT_NEAR(classify_case(make_case("1", {0.6, 0, 1})).beta, 0.6, 1e-9);
  EXPECT_NEAR(classify_case(make_case("9", {0.3, 0, 1})).beta, 0.3, 1e-9);
  EXPECT_NEAR(classify_case(make_case("11", {1.7, 0, 1})).beta, 1.7, 1e-9);
  EXPECT_NEAR(classify_case(make_case("13", {0.8, 0, 1})).beta, 0.8, 1e-9);
  EXPECT_NEAR(std::abs(classify_case(make_case("2", {1, 0.7, 1})).delta), 0.7, 1e-9);
  EXPECT_NEAR(std::abs(classify_case(make_case("4", {1, 0.3, 1})).delta), 0.3, 1e-9);
  EXPECT_EQ(classify_case(make_case("7b", {1, 0, -1})).eps, -1);
  EXPECT_EQ(classify_case(make_case("8c", {1, 0, -1})).eps, -1);
}

TEST(Classify, UnmatchedSignature) {
  Mat A = Mat::Zero(1, 8);
  A(0, 4) = 1;
  try {
    classify_rows(A, zero());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind, ErrorKind::classification_gap);
  }
}

TEST(Structure, AlwaysContainsTrivialPair) {
  for (const char* id : {"1", "5", "7c", "11", "14b"}) {
    auto an = analyze(make_case(id, {0.5, 0.2, 1}));
    EXPECT_TRUE(in_span(an.basis, lam4(1))) << id;
    EXPECT_TRUE(in_span(an.basis, lam1(1))) << id;
    EXPECT_LT(detail::gram_condition(an.basis), 1e8) << id;
  }
}

// every basis element of every fixture passes all three residual checks
TEST(Property, ResidualsAndDimensions) {
  const std::set<int> dims = {2, 3, 4, 5, 6, 9};
  for (const char* id : {"generic", "1", "2", "3a", "3b", "3c", "4", "5", "6", "7a", "7b", "7c", "8a", "8b", "8c",
                         "9", "10", "11", "12", "13", "14a", "14b", "14c", "14d"}) {
    auto t = make_case(id, {0.5, 0.4, 1});
    auto an = analyze(t);
    EXPECT_TRUE(dims.count(static_cast<int>(an.basis.size()))) << id;
    auto jets = random_jets<JetPoint>(t, 300, 8);
    auto ext = random_jets<ExtJet>(t, 300, 9);
    for (const auto& b : an.basis) {
      double scale = 1 + TupleCoords::build({b}).M.cwiseAbs().maxCoeff();
      EXPECT_LT(residual_classifying(b, t, jets), 1e-9 * scale) << id << " " << b.str();
      EXPECT_LT(residual_cosymmetry(b, t, jets), 1e-9 * scale) << id << " " << b.str();
      EXPECT_LT(residual_divergence(b, t, ext), 1e-9 * scale) << id << " " << b.str();
    }
  }
}

TEST(Property, DimensionCovariance) {
  std::mt19937_64 rng(33);
  for (const char* id : {"1", "3c", "6", "7a", "8b", "10", "13", "14b"}) {
    auto t = make_case(id, {0.5, 0.4, 1});
    auto d = analyze(t).basis.size();
    for (int r = 0; r < 3; ++r)
      EXPECT_EQ(analyze(apply_equiv_to_topo(EquivElement::random(rng), t)).basis.size(), d) << id;
  }
}
