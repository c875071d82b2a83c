#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "hsb/conformal.hpp"
#include "hsb/error.hpp"

namespace {

using namespace hsb;
using geometry::Point;
constexpr double kPi = std::numbers::pi;

TEST(Conformal, QnCoefficients) {
  // Q_1 = u + 1/2, Q_2 = u^2 + u/2 + 3/8, Q_3 = u^3 + u^2/2 + 3u/8 + 5/16.
  using R = conformal::Rational;
  EXPECT_EQ(conformal::qn(0).coeffs, (std::vector<R>{{1, 1}}));
  EXPECT_EQ(conformal::qn(1).coeffs, (std::vector<R>{{1, 2}, {1, 1}}));
  EXPECT_EQ(conformal::qn(2).coeffs, (std::vector<R>{{3, 8}, {1, 2}, {1, 1}}));
  EXPECT_EQ(conformal::qn(3).coeffs, (std::vector<R>{{5, 16}, {3, 8}, {1, 2}, {1, 1}}));
  EXPECT_NEAR(conformal::qn(2)(0.5), 0.25 + 0.25 + 0.375, 1e-15);
}

TEST(Conformal, CubicRootsOfBracketedExample) {
  // 30-digit reference roots of 162 x^3 - 99 x^2 + 2.25.
  const auto roots = conformal::real_cubic_roots(162.0, -99.0, 0.0, 2.25);
  ASSERT_EQ(roots.size(), 3u);
  EXPECT_NEAR(roots[0], -0.13631671755257921074, 1e-15);
  EXPECT_NEAR(roots[1], 0.17935553001477006514, 1e-15);
  EXPECT_NEAR(roots[2], 0.56807229864892025671, 1e-15);
  // Rough bracket values quoted for this example.
  EXPECT_NEAR(roots[0], -0.134, 3e-3);
  EXPECT_NEAR(roots[1], 0.180, 3e-3);
  EXPECT_NEAR(roots[2], 0.566, 3e-3);
}

TEST(Conformal, CubicWithSingleRealRoot) {
  const auto roots = conformal::real_cubic_roots(1.0, 0.0, 1.0, -2.0);  // (x - 1)(x^2 + x + 2)
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_NEAR(roots[0], 1.0, 1e-14);
}

TEST(Conformal, DiskMapAndArea) {
  conformal::LaurentMap disk;
  disk.A = 2.0;
  EXPECT_NEAR(conformal::map_area(disk), 4.0 * kPi, 1e-14);
  const auto c = conformal::trace_boundary(disk, 256);
  EXPECT_NEAR(std::abs(c[17]), 2.0, 1e-14);
  EXPECT_TRUE(geometry::is_counterclockwise(c));
}

TEST(Conformal, QuarticFamilyAreaMatchesTrace) {
  const auto m = conformal::exact_family(conformal::Family::quartic, 0.3, 1.0);
  const auto c = conformal::trace_boundary(m, 8192);
  EXPECT_NEAR(conformal::map_area(m), geometry::area(c), 1e-6);
  EXPECT_TRUE(conformal::univalence_check(m).univalent);
  // h(z) = z - 2 beta z^3 on the boundary.
  EXPECT_LT(conformal::richardson_residual(m, {0.0, 1.0, 0.0, -2.0}), 1e-12);
}

TEST(Conformal, QuarticFamilyLosesUnivalence) {
  EXPECT_THROW(conformal::exact_family(conformal::Family::quartic, 0.45, 1.0), Error);
}

TEST(Conformal, SaddleFamilyHasCriticalBoundaryPoint) {
  const double A = 0.05, beta = 1.0;
  const auto m = conformal::exact_family(conformal::Family::saddle, A, beta);
  EXPECT_NEAR(std::abs(m.derivative({-1.0, 0.0})), 0.0, 1e-14);
  const double K = conformal::saddle_family_constant(A, beta);
  EXPECT_LT(conformal::richardson_residual(m, {K, 1.0, -2.0 * beta}), 1e-12);
}

TEST(Conformal, LimitCurvesSatisfyTheirEquations) {
  const double beta = 0.8;
  const auto q1 = conformal::qn(1);
  for (Point p : conformal::limit_curve(2, beta, 0.0, 200).vertices) {
    const double x = p.real(), y = p.imag();
    EXPECT_NEAR(y * y, beta * beta * (1.0 - x * x) * std::pow(q1(x * x), 2), 1e-12);
  }
  for (Point p : conformal::saddle_node_curve(beta, 200).vertices) {
    const double x = p.real(), y = p.imag();
    EXPECT_NEAR(y * y, beta * beta * std::pow(x + 0.5, 3) * (1.5 - x), 1e-12);
  }
}

TEST(Conformal, KufarevMapArea) {
  // Area of the absorbed state: pi (R^2 + 2 r^2) - q t.
  const double a = 3.0, R = 1.0, r = 0.5, q = 1.0;
  for (double t : {0.3, 0.8, 1.5}) {
    const auto m = conformal::kufarev_solve(a, R, r, q, t);
    EXPECT_NEAR(geometry::area(conformal::trace_boundary(m, 8192)), kPi * (R * R + 2 * r * r) - q * t, 1e-5);
    EXPECT_TRUE(conformal::univalence_check(m).univalent);
    EXPECT_LE(m.cubic_roots[0], m.alpha * m.alpha);
    EXPECT_LE(m.alpha * m.alpha, m.cubic_roots[2]);
  }
}

TEST(Conformal, ValidationErrors) {
  EXPECT_THROW(conformal::limit_curve(2, 0.1, 1.0), Error);
  EXPECT_THROW(conformal::saddle_node_curve(-1.0), Error);
  EXPECT_THROW(conformal::exact_family(conformal::Family::quartic, 0.3, -1.0), Error);
}

}  // namespace
