#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "signorini/quadrature.hpp"

using namespace signorini;
using quad::Triangle;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Integral of x^a y^b over the unit right triangle.
double monomial_exact(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

const Triangle kUnit{{0, 0}, {1, 0}, {0, 1}};

}  // namespace

TEST(TriangleRules, WeightsSumToOne) {
  for (const auto* rule : {&quad::degree4(), &quad::degree7()}) {
    double w = 0.0;
    for (const auto& q : *rule) {
      w += q.w;
      EXPECT_NEAR(q.l0 + q.l1 + q.l2, 1.0, 1e-15);
    }
    EXPECT_NEAR(w, 1.0, 1e-14);
  }
  EXPECT_EQ(quad::degree4().size(), 6u);
  EXPECT_EQ(quad::degree7().size(), 13u);
}

TEST(TriangleRules, ExactForPolynomialsUpToDegree) {
  for (auto [rule, degree] : {std::pair{&quad::degree4(), 4}, std::pair{&quad::degree7(), 7}}) {
    for (int a = 0; a <= degree; ++a) {
      for (int b = 0; a + b <= degree; ++b) {
        const double v = quad::integrate<double>(kUnit, *rule, [&](Point2 p) {
          return std::pow(p.x, a) * std::pow(p.y, b);
        });
        EXPECT_NEAR(v, monomial_exact(a, b), 1e-14) << "x^" << a << " y^" << b;
      }
    }
  }
}

TEST(TriangleRules, UniformQuadrisectionPreservesExactness) {
  const Triangle t{{0.2, 0.1}, {1.3, 0.4}, {0.5, 0.9}};
  auto f = [](Point2 p) { return p.x * p.x * p.y - 3.0 * p.y * p.y + 1.0; };
  const double ref = quad::integrate<double>(t, quad::degree7(), f);
  for (int depth = 0; depth <= 3; ++depth) {
    EXPECT_NEAR(quad::integrate_uniform<double>(t, quad::degree4(), depth, f), ref, 1e-14);
  }
}

TEST(TriangleRules, ChildrenTileParent) {
  const Triangle t{{0.2, 0.1}, {1.3, 0.4}, {0.5, 0.9}};
  double area = 0.0;
  for (const auto& c : t.children()) area += c.area();
  EXPECT_NEAR(area, t.area(), 1e-15);
}

TEST(SplitVertical, PiecesTileAndStayOnOneSide) {
  const Triangle t{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}};
  const std::vector<double> cuts{0.25, 0.5, 1.0, -1.0, 0.75};
  const auto pieces = quad::split_vertical(t, cuts);
  double area = 0.0;
  for (const auto& p : pieces) {
    area += p.area();
    const double lo = std::min({p.a.x, p.b.x, p.c.x});
    const double hi = std::max({p.a.x, p.b.x, p.c.x});
    for (double c : {0.25, 0.5, 0.75}) EXPECT_FALSE(c > lo + 1e-15 && c < hi - 1e-15);
  }
  EXPECT_NEAR(area, t.area(), 1e-15);
  // A piecewise function with a jump at x = 0.5 is integrated exactly.
  auto step = [](Point2 p) { return p.x < 0.5 ? 1.0 : 3.0; };
  double v = 0.0;
  for (const auto& p : pieces) v += quad::integrate<double>(p, quad::degree4(), step);
  // Left part: triangle with legs 0.5 -> area 0.125.
  EXPECT_NEAR(v, 0.125 * 1.0 + 0.375 * 3.0, 1e-14);
}

TEST(SplitVertical, CutThroughVertex) {
  const Triangle t{{0.0, 0.0}, {1.0, 0.0}, {0.5, 1.0}};
  const std::vector<double> cuts{0.5};
  const auto pieces = quad::split_vertical(t, cuts);
  EXPECT_EQ(pieces.size(), 2u);
  EXPECT_NEAR(pieces[0].area() + pieces[1].area(), t.area(), 1e-15);
}

TEST(Distance, InsideAndOutside) {
  EXPECT_EQ(quad::distance(kUnit, {0.2, 0.2}), 0.0);
  EXPECT_NEAR(quad::distance(kUnit, {2.0, 0.0}), 1.0, 1e-15);
  EXPECT_NEAR(quad::distance(kUnit, {1.0, 1.0}), std::sqrt(0.5), 1e-15);
}

TEST(AdaptiveGaussKronrod, SmoothIntegrand) {
  const auto r = quad::integrate_adaptive([](double x) { return std::exp(x); }, 0.0, 2.0, 1e-13);
  EXPECT_NEAR(r.value, std::exp(2.0) - 1.0, 1e-12);
  EXPECT_GE(r.intervals, 1);
}

TEST(AdaptiveGaussKronrod, PowerSingularity) {
  // int_0^1 |x - 0.3|^{1/2} dx
  auto f = [](double x) { return std::sqrt(std::abs(x - 0.3)); };
  const double exact = (2.0 / 3.0) * (std::pow(0.3, 1.5) + std::pow(0.7, 1.5));
  EXPECT_NEAR(quad::integrate_adaptive(f, 0.0, 1.0, 1e-12).value, exact, 1e-10);
  const std::vector<double> br{0.3};
  const auto split = quad::integrate_adaptive(f, 0.0, 1.0, br, 1e-13);
  EXPECT_NEAR(split.value, exact, 1e-13);
}

TEST(AdaptiveGaussKronrod, EmptyInterval) {
  EXPECT_EQ(quad::integrate_adaptive([](double) { return 1.0; }, 1.0, 1.0, 1e-12).value, 0.0);
}
