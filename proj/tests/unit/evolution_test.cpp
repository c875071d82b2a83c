#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "hsb/error.hpp"
#include "hsb/evolution.hpp"
#include "hsb/potential.hpp"

namespace {

using namespace hsb;
using geometry::Point;
constexpr double kPi = std::numbers::pi;

evolution::Numerics coarse() {
  evolution::Numerics n;
  n.h_factor = 0.03;
  return n;
}

TEST(Evolution, DiskFieldIsRadial) {
  // Free suction q from |z - c| < r: Phi = -(q / 2 pi) log(|z - c| / r),
  // normal speed q / (2 pi r). The polygon error is second order in 1/n.
  const double r = 1.3, q = 2.0, speed = q / (2.0 * kPi * r);
  double previous = 0.0;
  for (std::size_t n : {256u, 512u}) {
    const auto sys = geometry::make_system({geometry::make_circle({0.4, 0.1}, r, n, true)});
    const auto field = evolution::solve_field(sys, evolution::FluxSpec::free_flux(q));
    double worst = 0.0;
    for (double v : field.velocity[0]) worst = std::max(worst, std::abs(-v - speed) / speed);
    EXPECT_LT(worst, 1e-4);
    if (previous > 0.0) EXPECT_NEAR(previous / worst, 4.0, 0.2);
    previous = worst;
    EXPECT_NEAR(field.fluxes[0], q, 1e-10);
    const Point p(3.0, 1.0);
    EXPECT_NEAR(field.phi(p) - field.constants[0], -q / (2.0 * kPi) * std::log(std::abs(p - Point(0.4, 0.1)) / r),
                1e-4);
  }
}

TEST(Evolution, DiskContractsConcentrically) {
  const auto sys = geometry::make_system({geometry::make_circle({0.5, -0.25}, 1.0, 256, true)});
  const auto traj = evolution::run_free(sys, 1.0, kPi, {{3.0, 0.0}}, coarse());
  EXPECT_EQ(traj.termination, evolution::Termination::all_vanished);
  ASSERT_EQ(traj.events.size(), 1u);
  const auto& e = traj.events[0];
  EXPECT_EQ(e.kind, evolution::Event::Kind::disappearance);
  EXPECT_NEAR(std::abs(e.location - Point(0.5, -0.25)), 0.0, 3.0 * traj.h);
  EXPECT_NEAR(e.extrapolated_time, kPi, 1e-3);
  for (const auto& s : traj.snapshots) {
    if (s.bubbles.empty()) continue;
    EXPECT_NEAR(s.total_area(), kPi - s.time, 1e-4 * kPi);
    const auto& c = s.bubbles[0].boundary;
    const double rad = std::sqrt(s.total_area() / kPi);
    EXPECT_NEAR(geometry::hausdorff_distance(c, geometry::make_circle({0.5, -0.25}, rad, 512)), 0.0, 0.05 * rad + 1e-3);
  }
  EXPECT_FALSE(traj.probe_log.empty());
}

TEST(Evolution, InteriorGradientIsInvariant) {
  const auto sys = geometry::make_system({geometry::make_ellipse({0, 0}, 1.5, 1.0, 300)});
  const Point p(0.1, 0.05);
  const auto g0 = potential::eval_potential(sys, p).gradient;
  const auto traj = evolution::run_free(sys, 1.0, 0.5 * sys.total_area(), {}, coarse());
  const auto g1 = potential::eval_potential(traj.snapshots.back(), p).gradient;
  EXPECT_LT((g1 - g0).norm(), 1e-3 * std::sqrt(sys.total_area()));
}

TEST(Evolution, RegulatedRunLeavesIdleBubbleInPlace) {
  const auto sys = geometry::make_system(
      {geometry::make_circle({-2, 0}, 1.0, 200, true), geometry::make_circle({2, 0}, 1.0, 200, true)});
  const auto s = evolution::Strategy::constant(1.0, 0.0, 1.0);
  const auto traj = evolution::run_regulated(sys, s, {}, coarse());
  EXPECT_EQ(traj.termination, evolution::Termination::strategy_exhausted);
  const auto& last = traj.snapshots.back();
  EXPECT_NEAR(geometry::area(last.bubbles[0].boundary), kPi - 1.0, 1e-4 * 2 * kPi);
  EXPECT_NEAR(geometry::area(last.bubbles[1].boundary), kPi, 1e-4 * 2 * kPi);
  for (const auto& f : traj.fluxes) EXPECT_NEAR(f[1], 0.0, 1e-9);
}

TEST(Evolution, StrategyFromVolumes) {
  const auto s = evolution::Strategy::from_volumes({{0.5, 0.0}, {0.0, 0.25}, {0.1, 0.1}}, 2.0);
  EXPECT_NEAR(s.end_time(), (0.5 + 0.25 + 0.2) / 2.0, 1e-15);
  const auto [v1, v2] = s.volumes();
  EXPECT_NEAR(v1, 0.6, 1e-15);
  EXPECT_NEAR(v2, 0.35, 1e-15);
  EXPECT_EQ(s.rates_at(0.1), std::make_pair(2.0, 0.0));
  EXPECT_EQ(s.rates_at(0.3), std::make_pair(0.0, 2.0));
}

TEST(Evolution, ValidationErrors) {
  const auto one = geometry::make_system({geometry::make_circle({0, 0}, 1.0, 64, true)});
  EXPECT_THROW(evolution::run_free(one, -1.0, 1.0), Error);
  EXPECT_THROW(evolution::run_free(one, 1.0, 10.0), Error);  // beyond t*
  EXPECT_THROW(evolution::run_regulated(one, evolution::Strategy::constant(1, 0, 1)), Error);
  const auto two = geometry::make_system(
      {geometry::make_circle({-2, 0}, 1.0, 64, true), geometry::make_circle({2, 0}, 1.0, 64, true)});
  EXPECT_THROW(evolution::Strategy::constant(-1.0, 0.0, 1.0).validate(two), Error);
  EXPECT_THROW(evolution::Strategy::constant(1.0, 0.0, 5.0).validate(two), Error);  // more than the area
  evolution::Numerics bad;
  bad.h_factor = -1.0;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Evolution, ResampleUsesEvenNodeCount) {
  const auto sys = geometry::make_system({geometry::make_ellipse({0, 0}, 2.0, 1.0, 101)});
  const auto r = evolution::resample_system(sys, 0.05);
  EXPECT_EQ(r.bubbles[0].boundary.size() % 2, 0u);
  EXPECT_NEAR(r.total_area(), sys.total_area(), 1e-10);
}

TEST(Evolution, DumbbellBreaksIntoTwo) {
  const auto sys = geometry::make_system({geometry::make_profile_domain(
      [](double x) { return (0.01 + x * x) * (1.0 - x * x); }, 1.0, 300)});
  const auto traj = evolution::run_free(sys, 1.0, sys.total_area(), {}, coarse());
  ASSERT_FALSE(traj.events.empty());
  const auto& e = traj.events.front();
  EXPECT_EQ(e.kind, evolution::Event::Kind::breakup);
  EXPECT_NEAR(e.location.real(), 0.0, 0.05);
  EXPECT_EQ(e.labels.size(), 3u);
}

}  // namespace
