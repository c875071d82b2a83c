#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "hsb/error.hpp"
#include "hsb/geometry.hpp"

namespace {

using namespace hsb::geometry;
constexpr double kPi = std::numbers::pi;

TEST(Geometry, RegularPolygonAreaMatchesClosedForm) {
  const std::size_t n = 64;
  const auto c = make_circle({0.3, -1.0}, 2.0, n);
  const double expected = 0.5 * n * 4.0 * std::sin(2.0 * kPi / n);
  EXPECT_NEAR(area(c), expected, 1e-12);
  EXPECT_NEAR(perimeter(c.vertices), 2.0 * n * 2.0 * std::sin(kPi / n), 1e-12);
}

TEST(Geometry, AreaExactCircleHasDiskArea) {
  const auto c = make_circle({0, 0}, 1.5, 100, true);
  EXPECT_NEAR(area(c), kPi * 2.25, 1e-12);
}

TEST(Geometry, CentroidOfShiftedEllipse) {
  const auto e = make_ellipse({1.0, 2.0}, 3.0, 1.0, 200, 0.4);
  const Point g = centroid(e.vertices);
  EXPECT_NEAR(g.real(), 1.0, 1e-12);
  EXPECT_NEAR(g.imag(), 2.0, 1e-12);
}

TEST(Geometry, DiameterOfEllipseIsMajorAxis) {
  const auto e = make_ellipse({0, 0}, 2.0, 1.0, 400, 0.3);
  EXPECT_NEAR(diameter(e.vertices), 4.0, 1e-12);
}

TEST(Geometry, ContainsAndDistance) {
  const auto sq = BoundaryCurve{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  EXPECT_TRUE(contains(sq.vertices, {0.5, 0.5}));
  EXPECT_FALSE(contains(sq.vertices, {1.5, 0.5}));
  EXPECT_NEAR(distance_to_polyline(sq.vertices, {1.5, 0.5}), 0.5, 1e-15);
  EXPECT_NEAR(distance_to_segment({0, 1}, {-1, 0}, {1, 0}), 1.0, 1e-15);
}

TEST(Geometry, ValidationRejectsClockwiseAndSelfIntersecting) {
  auto c = make_circle({0, 0}, 1.0, 32);
  EXPECT_NO_THROW(require_valid(c));
  EXPECT_THROW(require_valid(reversed(c)), hsb::Error);
  BoundaryCurve bowtie{{{0, 0}, {2, 2}, {2, 0}, {1, -0.5}, {0, 2}, {-0.5, 1}, {-1, 0.5}, {-0.5, 0.2}}};
  EXPECT_FALSE(is_simple(bowtie.vertices));
  EXPECT_FALSE(validate(bowtie).ok());
  BoundaryCurve tiny{{{0, 0}, {1, 0}, {0, 1}}};
  EXPECT_FALSE(validate(tiny).enough_vertices);
}

TEST(Geometry, HausdorffOfConcentricCircles) {
  const auto a = make_circle({0, 0}, 1.0, 512);
  const auto b = make_circle({0, 0}, 1.1, 512);
  EXPECT_NEAR(hausdorff_distance(a, b), 0.1, 1e-4);
  EXPECT_NEAR(hausdorff_distance(a, a), 0.0, 1e-15);
}

TEST(Geometry, ResamplePreservesAreaAndEqualizesSpacing) {
  const auto e = make_ellipse({0, 0}, 2.0, 0.7, 97);
  const auto r = resample(e, 0.05);
  EXPECT_NEAR(area(r), area(e), 1e-10);
  double lo = 1e9, hi = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double d = std::abs(r[(i + 1) % r.size()] - r[i]);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  EXPECT_LT(hi / lo, 1.1);
  EXPECT_EQ(resample_count(e, 128).size(), 128u);
}

TEST(Geometry, SecondMomentsOfEllipse) {
  // Mean of x^2 over an ellipse is a^2 / 4.
  const auto e = make_ellipse({0, 0}, 2.0, 1.0, 4096);
  const Eigen::Matrix2d m = second_moments(e.vertices);
  EXPECT_NEAR(m(0, 0), 1.0, 1e-5);
  EXPECT_NEAR(m(1, 1), 0.25, 1e-5);
  EXPECT_NEAR(m(0, 1), 0.0, 1e-12);
  const EllipseFit fit = fit_ellipse(e.vertices);
  EXPECT_NEAR(fit.major, 2.0, 1e-5);
  EXPECT_NEAR(fit.minor, 1.0, 1e-5);
  EXPECT_NEAR(std::remainder(fit.major_angle, kPi), 0.0, 1e-9);
}

TEST(Geometry, SplitOnPinchCutsNarrowNeck) {
  const auto d = make_profile_domain([](double x) { return (1e-5 + x * x) * (1.0 - x * x); }, 1.0, 400);
  const auto parts = split_on_pinch(d, 0.02);
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_NEAR(area(parts[0]) + area(parts[1]), area(d), 0.01 * area(d));
  for (const auto& p : parts) EXPECT_TRUE(validate(p).ok());
  const auto whole = make_circle({0, 0}, 1.0, 200);
  EXPECT_EQ(split_on_pinch(whole, 0.02).size(), 1u);
}

TEST(Geometry, RenormalizeToUnitHalfWidth) {
  const auto e = make_ellipse({0, 0}, 0.01, 0.001, 256);
  double c = 0.0;
  const auto r = renormalize(e, 2.0, &c, Extent::x_width);
  const Box b = bounding_box(r.vertices);
  EXPECT_NEAR(b.hi.real() - b.lo.real(), 2.0, 1e-12);
  EXPECT_NEAR(c, 100.0, 1e-9);
  EXPECT_NEAR(b.hi.imag(), 0.001 * c * c, 1e-9);
}

TEST(Geometry, SemicubicCuspExponent) {
  // y^2 = x^3 (1 - x): cusp of exponent 3/2 at the origin.
  const auto c = make_parametric(
      [](double t) {
        const double x = 0.5 * (1.0 - std::cos(t));
        const double y = x * std::sqrt(x * (1.0 - x));
        return Point(x, std::sin(t) < 0.0 ? -y : y);
      },
      2000);
  const auto est = cusp_exponent(oriented_ccw(c), {0.0, 0.0});
  EXPECT_TRUE(est.is_cusp);
  EXPECT_NEAR(est.exponent, 1.5, 0.1);
}

TEST(Geometry, CircleScaledCurvatureIsOne) {
  EXPECT_NEAR(max_scaled_curvature(make_circle({0, 0}, 3.0, 400, true)), 1.0, 1e-3);
}

TEST(Geometry, SystemHelpers) {
  auto sys = make_system({make_circle({-2, 0}, 1.0, 64, true), make_circle({2, 0}, 0.5, 64, true)});
  EXPECT_NEAR(sys.total_area(), kPi * 1.25, 1e-12);
  EXPECT_EQ(sys.next_label(), 2);
  EXPECT_EQ(bubble_containing(sys, {2.1, 0}), 1);
  EXPECT_EQ(bubble_containing(sys, {0, 0}), -1);
  EXPECT_NE(sys.find(1), nullptr);
  EXPECT_EQ(sys.find(7), nullptr);
}

}  // namespace
