#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hsb/error.hpp"
#include "hsb/potential.hpp"

namespace {

using namespace hsb;
using geometry::Point;
constexpr double kPi = std::numbers::pi;

// Pi of the disk |z - c| < r: (|p-c|^2 - r^2)/4 + r^2/2 log r inside,
// r^2/2 log|p - c| outside.
double disk_value(Point c, double r, Point p) {
  const double d = std::abs(p - c);
  return d < r ? (d * d - r * r) / 4.0 + 0.5 * r * r * std::log(r) : 0.5 * r * r * std::log(d);
}

TEST(Potential, DiskClosedForm) {
  for (Point p : {Point(0.2, 0.1), Point(3.0, -1.0), Point(-0.9, 0.0)}) {
    const auto probe = potential::disk_potential({0.5, 0.5}, 1.2, p);
    EXPECT_NEAR(probe.value, disk_value({0.5, 0.5}, 1.2, p), 1e-14);
  }
}

TEST(Potential, PolygonConvergesToDisk) {
  const auto sys = geometry::make_system({geometry::make_circle({0, 0}, 1.0, 4096, true)});
  for (Point p : {Point(0.3, 0.2), Point(2.0, 1.0)}) {
    const auto quad = potential::eval_potential(sys, p);
    const auto exact = potential::disk_potential({0, 0}, 1.0, p);
    EXPECT_NEAR(quad.value, exact.value, 1e-6);
    EXPECT_NEAR((quad.gradient - exact.gradient).norm(), 0.0, 1e-6);
    EXPECT_NEAR((quad.hessian - exact.hessian).norm(), 0.0, 1e-5);
  }
}

TEST(Potential, LaplacianIsIndicator) {
  const auto sys = geometry::make_system({geometry::make_ellipse({0, 0}, 1.5, 0.8, 300)});
  EXPECT_NEAR(potential::eval_potential(sys, {0.1, 0.2}).hessian.trace(), 1.0, 1e-12);
  EXPECT_NEAR(potential::eval_potential(sys, {2.5, 0.2}).hessian.trace(), 0.0, 1e-12);
}

TEST(Potential, EllipseHessianAtCenter) {
  const auto exact = potential::ellipse_potential(2.0, 1.0, {0.0, 0.0});
  EXPECT_NEAR(exact.hessian(0, 0), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(exact.hessian(1, 1), 2.0 / 3.0, 1e-14);
  const auto sys = geometry::make_system({geometry::make_ellipse({0, 0}, 2.0, 1.0, 4096)});
  const auto quad = potential::eval_potential(sys, {0.0, 0.0});
  EXPECT_NEAR(quad.hessian(0, 0), 1.0 / 3.0, 1e-4);
  EXPECT_NEAR(quad.hessian(1, 1), 2.0 / 3.0, 1e-4);
  EXPECT_NEAR(quad.hessian(0, 1), 0.0, 1e-12);
}

TEST(Potential, GradientBoundOnRandomPolygons) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int s = 0; s < 50; ++s) {
    std::vector<Point> v;
    const int n = 12 + s % 20;
    for (int i = 0; i < n; ++i) v.push_back(std::polar(1.0 + 0.3 * u(rng), 2.0 * kPi * i / n));
    const auto sys = geometry::make_system({geometry::BoundaryCurve{v}});
    const double bound = std::sqrt(sys.total_area() / kPi);
    std::vector<std::span<const Point>> curves{sys.bubbles[0].boundary.vertices};
    for (int k = 0; k < 20; ++k) {
      const Point p = k < 10 ? v[static_cast<std::size_t>(k) % v.size()] : Point(2.0 * u(rng), 2.0 * u(rng));
      EXPECT_LE(potential::eval_curves(curves, p, 0.0).gradient.norm(), bound + 1e-9);
    }
  }
}

TEST(Potential, ProbeTooCloseToBoundaryIsRefused) {
  const auto sys = geometry::make_system({geometry::make_circle({0, 0}, 1.0, 64)});
  EXPECT_THROW(potential::eval_potential(sys, sys.bubbles[0].boundary[3]), Error);
}

TEST(Potential, CauchyTransformOfDiskIsConstant) {
  const auto sys = geometry::make_system({geometry::make_circle({0.5, -0.25}, 1.0, 2048, true)});
  const auto h = potential::cauchy_transform(sys, {0.6, -0.1});
  EXPECT_NEAR(h.real(), 0.5, 1e-5);
  EXPECT_NEAR(h.imag(), 0.25, 1e-5);
}

TEST(Potential, EqualDiskCriticalPoints) {
  // Inside the right disk: x/2 - 1 + 1/(2(x + 2)) = 0, so x = sqrt(3).
  const auto sys = geometry::make_system(
      {geometry::make_circle({-2, 0}, 1.0, 1024, true), geometry::make_circle({2, 0}, 1.0, 1024, true)});
  const auto search = potential::find_critical_points(sys, {{-4, -2}, {4, 2}});
  int minima = 0, saddles = 0;
  for (const auto& p : search.points) {
    if (p.kind == potential::CriticalKind::minimum) {
      ++minima;
      EXPECT_NEAR(std::abs(p.location.real()), std::sqrt(3.0), 1e-6);
      EXPECT_NEAR(p.location.imag(), 0.0, 1e-9);
      EXPECT_TRUE(p.is_global_min);
    } else if (p.kind == potential::CriticalKind::saddle) {
      ++saddles;
      EXPECT_NEAR(std::abs(p.location), 0.0, 1e-6);
    }
  }
  EXPECT_EQ(minima, 2);
  EXPECT_EQ(saddles, 1);
}

TEST(Potential, BreakupIntegralOfEllipseProfile) {
  for (auto [a, b] : {std::pair{2.0, 1.0}, std::pair{5.0, 1.0}, std::pair{1.0, 1.0}}) {
    const auto r = potential::breakup_integral([a, b](double x) { return b * b * (1.0 - x * x / (a * a)); }, a);
    EXPECT_NEAR(r.value, kPi * (a - b) / (2.0 * (a + b)), 1e-5);
    EXPECT_EQ(r.verdict, potential::BreakupVerdict::no_conclusion);
  }
}

TEST(Potential, BreakupIntegralOfDumbbell) {
  auto f = [](double c) { return [c](double x) { return (c + x * x) * (1.0 - x * x); }; };
  EXPECT_EQ(potential::breakup_integral(f(0.01), 1.0).verdict, potential::BreakupVerdict::breaks);
  EXPECT_EQ(potential::breakup_integral(f(0.05), 1.0).verdict, potential::BreakupVerdict::no_conclusion);
}

TEST(Potential, AxisExtremaOfDumbbellAndEllipse) {
  const auto thin = geometry::make_system({geometry::make_profile_domain(
      [](double x) { return (0.01 + x * x) * (1.0 - x * x); }, 1.0, 600)});
  EXPECT_EQ(potential::axis_extrema_count(thin), 3);
  const auto e = geometry::make_system({geometry::make_ellipse({0, 0}, 2.0, 1.0, 600)});
  EXPECT_EQ(potential::axis_extrema_count(e), 1);
}

}  // namespace
