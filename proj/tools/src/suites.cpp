#include "hsb/cli/suites.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "hsb/conformal.hpp"
#include "hsb/evolution.hpp"
#include "hsb/potential.hpp"

namespace hsb::cli {

namespace {

using geometry::Point;
constexpr double kPi = std::numbers::pi;

}  // namespace

geometry::BubbleSystem random_star_system(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int count = 1 + static_cast<int>(u(rng) * 3.0) % 3;
  std::vector<geometry::BoundaryCurve> curves;
  std::vector<std::pair<Point, double>> placed;  // center, outer radius
  int attempts = 0;
  while (static_cast<int>(curves.size()) < count && attempts++ < 100) {
    const double r0 = 0.3 + 0.9 * u(rng);
    const Point c(4.0 * (u(rng) - 0.5) * count, 4.0 * (u(rng) - 0.5) * count);
    // Radii stay in [0.55 r0, 1.45 r0], so the polygon is star-shaped.
    double amp[4], phase[4];
    for (int k = 0; k < 4; ++k) {
      amp[k] = 0.1 * u(rng);
      phase[k] = 2.0 * kPi * u(rng);
    }
    bool clash = false;
    for (const auto& [pc, pr] : placed)
      if (std::abs(pc - c) < 1.45 * r0 + pr + 0.05) clash = true;
    if (clash) continue;
    const std::size_t n = 24 + static_cast<std::size_t>(u(rng) * 72.0);
    std::vector<Point> v;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
      double r = 1.0;
      for (int k = 0; k < 4; ++k) r += amp[k] * std::cos((k + 2) * t + phase[k]);
      v.push_back(c + std::polar(r0 * r, t));
    }
    geometry::BoundaryCurve curve;
    curve.vertices = std::move(v);
    curves.push_back(std::move(curve));
    placed.emplace_back(c, 1.45 * r0);
  }
  return geometry::make_system(std::move(curves));
}

SuiteResult gradient_bound_suite(int systems, int probes_per_system, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SuiteResult res;
  res.name = "gradient bound |grad Pi| <= sqrt(S/pi)";
  int violations = 0;
  double worst = 0.0;  // largest |grad| / bound
  for (int s = 0; s < systems; ++s) {
    const auto sys = random_star_system(rng);
    const double bound = std::sqrt(sys.total_area() / kPi);
    const geometry::Box box = geometry::bounding_box(sys);
    const Point pad = 0.5 * (box.hi - box.lo);
    for (int k = 0; k < probes_per_system; ++k) {
      Point p;
      if (k % 3 == 0) {
        // On or next to a vertex, where the field is largest.
        const auto& b = sys.bubbles[static_cast<std::size_t>(u(rng) * sys.bubbles.size()) % sys.bubbles.size()];
        const auto& v = b.boundary.vertices[static_cast<std::size_t>(u(rng) * b.boundary.size()) % b.boundary.size()];
        p = v + std::polar(1e-6 + 1e-2 * u(rng), 2.0 * kPi * u(rng));
      } else {
        p = box.lo - pad + Point(u(rng) * 2.0 * (box.hi - box.lo + pad).real(), u(rng) * 2.0 * (box.hi - box.lo + pad).imag());
      }
      // Segment-exact sum without the near-boundary guard: probes may sit
      // on the boundary where the field is largest.
      std::vector<std::span<const Point>> curves;
      for (const auto& b : sys.bubbles) curves.emplace_back(b.boundary.vertices);
      const auto probe = potential::eval_curves(curves, p, 0.0);
      const double g = probe.gradient.norm();
      if (g > bound + 1e-9) ++violations;
      worst = std::max(worst, g / bound);
    }
  }
  res.pass = violations == 0;
  res.measured = worst;
  res.bound = 1.0;
  std::ostringstream os;
  os << systems << " systems x " << probes_per_system << " probes, " << violations
     << " violations, max |grad|/bound = " << worst;
  res.detail = os.str();
  return res;
}

SuiteResult ellipse_oracle_suite() {
  SuiteResult res;
  res.name = "ellipse Hessian oracle";
  const auto sys = geometry::make_system({geometry::make_ellipse({0.0, 0.0}, 2.0, 1.0, 4096)});
  const auto quad = potential::eval_potential(sys, {0.0, 0.0});
  const auto exact = potential::ellipse_potential(2.0, 1.0, {0.0, 0.0});
  Eigen::Matrix2d target;
  target << 1.0 / 3.0, 0.0, 0.0, 2.0 / 3.0;
  const double err = std::max((quad.hessian - target).cwiseAbs().maxCoeff(), (exact.hessian - target).cwiseAbs().maxCoeff());
  res.pass = err < 1e-4;
  res.measured = err;
  res.bound = 1e-4;
  res.detail = "max |H - diag(1/3, 2/3)| over quadrature and closed form";
  return res;
}

SuiteResult qn_positivity_suite() {
  SuiteResult res;
  res.name = "Q_n positive on [0, 1]";
  double lowest = std::numeric_limits<double>::infinity();
  for (int n = 0; n <= 8; ++n) {
    const auto q = conformal::qn(n);
    for (int i = 0; i <= 1000; ++i) lowest = std::min(lowest, q(i / 1000.0));
  }
  res.pass = lowest > 0.0;
  res.measured = lowest;
  res.detail = "min over n = 0..8";
  return res;
}

SuiteResult area_law_suite(const geometry::BubbleSystem& system, double fraction, double h_factor) {
  SuiteResult res;
  res.name = "area law";
  evolution::Numerics num;
  num.h_factor = h_factor;
  const double S = system.total_area();
  const auto traj = evolution::run_free(system, 1.0, fraction * S, {}, num);
  double worst = 0.0;
  for (const auto& s : traj.snapshots) {
    // Area discarded by disappearances up to this snapshot.
    double removed = 0.0;
    for (const auto& e : traj.events)
      if (e.kind == evolution::Event::Kind::disappearance && e.time <= s.time) removed += e.metric;
    worst = std::max(worst, std::abs(s.total_area() + removed - (S - s.time)) / S);
  }
  res.pass = worst < 1e-4;
  res.measured = worst;
  res.bound = 1e-4;
  std::ostringstream os;
  os << "free run to " << fraction << " S; " << traj.snapshots.size() << " snapshots";
  res.detail = os.str();
  return res;
}

}  // namespace hsb::cli
