#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "hsb/analysis.hpp"
#include "hsb/error.hpp"

namespace {

using namespace hsb;
using geometry::Point;
constexpr double kPi = std::numbers::pi;

evolution::Numerics with_h(double h) {
  evolution::Numerics n;
  n.h_factor = h;
  return n;
}

geometry::BubbleSystem equal_disks(std::size_t n = 300) {
  return geometry::make_system(
      {geometry::make_circle({-2, 0}, 1.0, n, true), geometry::make_circle({2, 0}, 1.0, n, true)});
}

TEST(Analysis, GreensRatioOfDisk) {
  // Exterior of |z - c| < rho, zeta = rho / (z - c): b = rho / |P - c|.
  for (auto [rho, x0] : {std::pair{1.0, 2.5}, std::pair{0.7, 1.3}, std::pair{2.0, 6.0}}) {
    const auto disk = geometry::make_circle({0.3, 0.0}, rho, 512);
    EXPECT_NEAR(analysis::greens_ratio(disk, {0.3 + x0, 0.0}), rho / x0, 1e-6);
    const auto gd = analysis::greens_data(disk, {0.3, x0});
    EXPECT_NEAR(gd.derivative, rho / (x0 * x0), 1e-5);
  }
  const auto disk = geometry::make_circle({0, 0}, 1.0, 256);
  EXPECT_THROW(analysis::greens_ratio(disk, {0.5, 0.0}), Error);
}

TEST(Analysis, KufarevPartialMatchesSimulation) {
  const auto pc = analysis::kufarev_partial(3.0, 1.0, 0.5, 1.0);
  EXPECT_LT(pc.residual, 1e-10);
  EXPECT_LT(pc.gradient_norm, 1e-8);
  EXPECT_NEAR(pc.z0.imag(), 0.0, 1e-9);
  const auto sys = geometry::make_system(
      {geometry::make_circle({0, 0}, 1.0, 300, true), geometry::make_circle({3, 0}, 0.5, 150, true)});
  // The value gap at the partial point is a discretization error ~ h^2; the
  // 1e-3 S global-minimum test needs h below about 0.03 here.
  const auto coarse = analysis::contraction_points(
      evolution::run_free(sys, 1.0, sys.total_area(), {}, with_h(0.02)));
  const auto traj = evolution::run_free(sys, 1.0, sys.total_area(), {}, with_h(0.01));
  const auto cps = analysis::contraction_points(traj);
  ASSERT_EQ(cps.size(), 2u);
  ASSERT_EQ(coarse.size(), 2u);
  EXPECT_NEAR(coarse[0].value_gap / cps[0].value_gap, 4.0, 0.6);
  EXPECT_EQ(cps[0].kind, analysis::ContractionKind::partial);
  EXPECT_EQ(cps[0].label, 1);
  EXPECT_TRUE(cps[0].verified);
  EXPECT_LT(std::abs(cps[0].location - pc.z0), 3.0 * traj.h);
  EXPECT_LT(std::abs(cps[0].extrapolated_time - pc.tau), std::pow(3.0 * traj.h, 2));
  EXPECT_EQ(cps[1].kind, analysis::ContractionKind::complete);
  EXPECT_TRUE(cps[1].verified);
}

TEST(Analysis, ContractionPointsOfEqualDisks) {
  const auto sys = equal_disks();
  const auto traj = evolution::run_free(sys, 1.0, sys.total_area(), {}, with_h(0.02));
  const auto cps = analysis::contraction_points(traj);
  ASSERT_EQ(cps.size(), 2u);
  for (const auto& c : cps) {
    EXPECT_NEAR(std::abs(c.refined.real()), std::sqrt(3.0), 1e-6);
    EXPECT_TRUE(c.verified);
  }
}

TEST(Analysis, ContractionPointsNeedFinishedRun) {
  const auto sys = equal_disks(64);
  const auto traj = evolution::run_free(sys, 1.0, 0.5, {}, with_h(0.05));
  EXPECT_THROW(analysis::contraction_points(traj), Error);
}

TEST(Analysis, EqualDisksSynchronizeFreely) {
  const auto rep = analysis::find_synchronizing(equal_disks(), with_h(0.02));
  ASSERT_TRUE(rep.strategy.has_value());
  EXPECT_TRUE(rep.free_synchronizes);
  EXPECT_TRUE(rep.gradient_check);
  EXPECT_TRUE(rep.minima_check);
  ASSERT_EQ(rep.endpoints.size(), 2u);
  for (const auto& e : rep.endpoints) {
    EXPECT_NEAR(std::abs(e.refined.real()), std::sqrt(3.0), 1e-6);
    EXPECT_EQ(e.classification.kind, potential::CriticalKind::minimum);
  }
}

TEST(Analysis, PathIndependenceTrivialOrdering) {
  EXPECT_LT(analysis::path_independence_check(equal_disks(64), 0.5, 0.0, with_h(0.05)), 1e-9);
}

TEST(Analysis, PathIndependenceOfDisks) {
  const auto sys = equal_disks(200);
  const double S = sys.total_area();
  const double d = analysis::path_independence_check(sys, 0.1 * S, 0.1 * S, with_h(0.03));
  EXPECT_LT(d, 2.0 * 0.03 * std::sqrt(S));
}

TEST(Analysis, StrategyFromFreeRunReproducesVolumes) {
  const auto sys = geometry::make_system(
      {geometry::make_circle({0, 0}, 1.0, 200, true), geometry::make_circle({3, 0}, 0.5, 100, true)});
  const auto traj = evolution::run_free(sys, 1.0, 1.0, {}, with_h(0.03));
  const auto s = analysis::strategy_from_free_run(traj);
  const auto [v1, v2] = s.volumes();
  EXPECT_NEAR(v1 + v2, 1.0, 1e-9);
  const auto& last = traj.snapshots.back();
  EXPECT_NEAR(v2, 0.25 * kPi - geometry::area(last.bubbles[1].boundary), 1e-3);
}

TEST(Analysis, DumbbellMembers) {
  const auto fam = analysis::dumbbell_family(300);
  const auto thin = analysis::classify_member(fam, 0.01, with_h(0.02));
  EXPECT_TRUE(thin.criterion_breaks);
  EXPECT_TRUE(thin.breaks);
  const auto fat = analysis::classify_member(fam, 0.3, with_h(0.02));
  EXPECT_FALSE(fat.criterion_breaks);
  EXPECT_FALSE(fat.breaks);
  EXPECT_THROW(analysis::dumbbell(-0.1), Error);
}

TEST(Analysis, LimitFitOfQuarticFamily) {
  std::vector<geometry::BoundaryCurve> curves;
  std::vector<double> areas = {0.1, 0.01, 0.001};
  for (double A : areas)
    curves.push_back(conformal::trace_boundary(conformal::exact_family(conformal::Family::quartic, A, 1.0), 2048));
  const auto fit = analysis::fit_limit_curve(curves, areas, 2, 1.0, 0.0);
  EXPECT_TRUE(fit.pass);
  EXPECT_LT(fit.residuals.back(), fit.residuals.front());
}

TEST(Analysis, EllipseFitUsesHessianAxes) {
  const auto sys = geometry::make_system({geometry::make_ellipse({0, 0}, 2.0, 1.0, 300)});
  const auto traj = evolution::run_free(sys, 1.0, 0.9 * sys.total_area(), {}, with_h(0.02));
  Eigen::Matrix2d hess;
  hess << 1.0 / 3.0, 0.0, 0.0, 2.0 / 3.0;
  const auto fit = analysis::fit_ellipse_asymptotics(traj, {0, 0}, hess);
  EXPECT_TRUE(fit.pass);
  EXPECT_NEAR(fit.parameter("predicted_ratio"), 2.0, 1e-12);
  EXPECT_TRUE(std::isnan(fit.parameter("missing")));
}

TEST(Analysis, MirrorRegionIsSymmetric) {
  const auto region = analysis::accessibility_region(equal_disks(128), 16, with_h(0.04));
  ASSERT_EQ(region.cells.size(), 256u);
  for (int j = 0; j < 16; ++j)
    for (int i = 0; i < 16; ++i) EXPECT_EQ(region.at(i, j), region.at(j, i)) << i << "," << j;
  EXPECT_TRUE(region.origin_accessible);
  EXPECT_FALSE(region.free_path.empty());
}

}  // namespace
