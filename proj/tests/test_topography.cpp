#include <gtest/gtest.h>

#include <cmath>

#include "swcl/charspace.hpp"
#include "swcl/topography.hpp"

using namespace swcl;

TEST(MakeCase, Case14cValue) {
  auto t = make_case("14c");
  EXPECT_DOUBLE_EQ(t.eval(1, 1).b, 1.0);
}

TEST(MakeCase, Case7aValue) {
  auto t = make_case("7a", {1, 0, 1});
  EXPECT_DOUBLE_EQ(t.eval(1, 0).b, 1.0);
}

TEST(MakeCase, Case9BetaOutOfRange) {
  for (double beta : {0.0, 1.0, 1.5, -0.5}) {
    try {
      make_case("9", {beta, 0, 1});
      FAIL() << "beta " << beta << " accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind, ErrorKind::parameter);
    }
  }
}

TEST(MakeCase, UnknownId) {
  try {
    make_case("15");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind, ErrorKind::parameter);
  }
}

TEST(EvalB, HalfR2) {
  BVal v = make_case("14c").eval(3, 4);
  EXPECT_DOUBLE_EQ(v.b, 12.5);
  EXPECT_DOUBLE_EQ(v.bx, 3);
  EXPECT_DOUBLE_EQ(v.by, 4);
}

TEST(EvalB, InverseSquareY) {
  auto t = make_case("8a", {1, 0, 1});
  BVal v = t.eval(0, 1);
  EXPECT_NEAR(v.b, 1, 1e-15);
  EXPECT_NEAR(v.bx, 0, 1e-15);
  EXPECT_NEAR(v.by, -2, 1e-15);
  try {
    t.eval(5, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind, ErrorKind::domain);
  }
}

TEST(EvalB, ExpressionGradientMatchesDifferences) {
  auto t = from_expression("sin(x)*exp(y/3) + atan2(y, x+5) + x^3*y");
  for (double x : {-1.3, 0.2, 1.7})
    for (double y : {-0.8, 0.5}) {
      BVal v = t.eval(x, y);
      double h = 1e-5;
      EXPECT_NEAR(v.bx, (t.eval(x + h, y).b - t.eval(x - h, y).b) / (2 * h), 1e-8);
      EXPECT_NEAR(v.by, (t.eval(x, y + h).b - t.eval(x, y - h).b) / (2 * h), 1e-8);
    }
}

TEST(SamplePoints, Deterministic) {
  auto t = make_case("14a");
  SamplePlan p;
  p.box = {-1, 1, -1, 1};
  p.n = 8;
  p.seed = 7;
  auto a = sample_points(t, p), b = sample_points(t, p);
  ASSERT_EQ(a.size(), 8u);
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].x, b[i].x);
    EXPECT_EQ(a[i].y, b[i].y);
    EXPECT_LE(std::abs(a[i].x), 1);
    EXPECT_LE(std::abs(a[i].y), 1);
  }
}

TEST(SamplePoints, RespectExclusion) {
  auto t = make_case("7a", {1, 0, 1});
  SamplePlan p;
  p.box = {-1, 1, -1, 1};
  p.n = 500;
  for (auto q : sample_points(t, p)) EXPECT_GE(std::hypot(q.x, q.y), t.exclusion());
}

TEST(SamplePoints, ExclusionLargerThanBox) {
  auto t = make_case("7a", {1, 0, 1});
  t.set_exclusion(2.0);
  SamplePlan p;
  p.box = {-1, 1, -1, 1};
  try {
    sample_points(t, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind, ErrorKind::configuration);
  }
}

namespace {
GridData grid_of(double (*f)(double, double), int n, double lo, double hi) {
  GridData g;
  g.nx = g.ny = n;
  g.x0 = g.y0 = lo;
  g.dx = g.dy = (hi - lo) / (n - 1);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g.b.push_back(f(lo + i * g.dx, lo + j * g.dy));
  return g;
}
double smooth(double x, double y) { return std::sin(1.3 * x) * std::cos(0.7 * y) + 0.2 * x * y; }
}  // namespace

// interior node gradients converge at fourth order
TEST(Grid, GradientOrder) {
  std::vector<double> errs;
  for (int n : {21, 41, 81}) {
    auto t = from_grid(grid_of(smooth, n, -2, 2));
    double h = 4.0 / (n - 1), e = 0;
    for (int j = 2; j < n - 2; j += 2)
      for (int i = 2; i < n - 2; i += 2) {
        double x = -2 + i * h, y = -2 + j * h;
        BVal v = t.eval_unchecked(x, y);
        double bx = 1.3 * std::cos(1.3 * x) * std::cos(0.7 * y) + 0.2 * y;
        double by = -0.7 * std::sin(1.3 * x) * std::sin(0.7 * y) + 0.2 * x;
        e = std::max({e, std::abs(v.bx - bx), std::abs(v.by - by)});
      }
    errs.push_back(e);
  }
  for (size_t i = 1; i < errs.size(); ++i) {
    double order = std::log2(errs[i - 1] / errs[i]);
    EXPECT_GT(order, 3.6) << "refinement " << i;
  }
  EXPECT_EQ(from_grid(grid_of(smooth, 41, -2, 2)).accuracy(), Accuracy::gridded);
}

TEST(Grid, TooSmall) {
  try {
    from_grid(grid_of(smooth, 5, -1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind, ErrorKind::parameter);
  }
}

TEST(Spline, WidensTolerance) {
  std::vector<double> s, f;
  for (int i = 0; i <= 100; ++i) s.push_back(-4 + 0.08 * i), f.push_back(std::sin(s.back()));
  auto t = make_case("4", {1, 0, 1}, Profile::from_spline(s, f));
  EXPECT_EQ(t.accuracy(), Accuracy::spline);
  EXPECT_DOUBLE_EQ(t.tolerance_scale(), 10);
  EXPECT_NEAR(t.eval(0.3, 1.1).b, std::sin(1.1), 1e-5);
}

// property: make_case then classify recovers the label
TEST(Property, CatalogRoundTrip) {
  struct Fx {
    std::string id;
    CaseParams p;
  };
  std::vector<Fx> fx = {{"generic", {}},        {"1", {1, 0, 1}},     {"2", {1, 1, 1}},     {"2", {1, 0, 1}},
                        {"3a", {}},             {"3b", {}},           {"3c", {}},           {"4", {1, 0, 1}},
                        {"4", {1, 1, 1}},       {"5", {}},            {"6", {}},            {"7a", {1, 0, 1}},
                        {"7a", {1, 0, -1}},     {"7b", {1, 0, 1}},    {"7c", {1, 0, -1}},   {"8a", {1, 0, 1}},
                        {"8a", {1, 1, -1}},     {"8b", {1, 0, 1}},    {"8c", {1, 0, 1}},    {"9", {0.5, 0, 1}},
                        {"10", {1, 0, 1}},      {"10", {1, 1, 1}},    {"11", {1, 0, 1}},    {"12", {1, 1, 1}},
                        {"13", {0.3, 0, 1}},    {"14a", {}},          {"14b", {}},          {"14c", {}},
                        {"14d", {}}};
  for (const auto& f : fx) {
    auto lab = classify_case(make_case(f.id, f.p));
    EXPECT_EQ(lab.id, f.id) << f.id;
    if (f.id[0] == '7' || f.id[0] == '8') EXPECT_EQ(lab.eps, static_cast<int>(f.p.eps)) << f.id;
  }
}
