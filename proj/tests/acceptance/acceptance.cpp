// One line per acceptance criterion: "criterion N: PASS|FAIL <name> -- <detail>".
// Exits 0 once every criterion has been evaluated; --strict also fails on
// any FAIL line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "hsb/analysis.hpp"
#include "hsb/cli/suites.hpp"
#include "hsb/conformal.hpp"
#include "hsb/error.hpp"
#include "hsb/potential.hpp"

namespace {

using namespace hsb;
using geometry::Point;
constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

evolution::Numerics with_h(double h) {
  evolution::Numerics n;
  n.h_factor = h;
  return n;
}

geometry::BubbleSystem equal_disks(std::size_t n) {
  return geometry::make_system(
      {geometry::make_circle({-2, 0}, 1.0, n, true), geometry::make_circle({2, 0}, 1.0, n, true)});
}

// ---------------------------------------------------------------------------

Outcome ellipse_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto sys = geometry::make_system({geometry::make_ellipse({0, 0}, 2.0, 1.0, 4096)});
  const auto h = potential::eval_potential(sys, {0.0, 0.0}).hessian;
  Eigen::Matrix2d target;
  target << 1.0 / 3.0, 0.0, 0.0, 2.0 / 3.0;
  const double err = (h - target).cwiseAbs().maxCoeff();
  const double dt = seconds_since(t0);
  return {err < 1e-4 && dt < 1.0, fmt("max |H - diag(1/3, 2/3)| = %.3g (tol 1e-4), %.3f s (limit 1 s)", err, dt)};
}

Outcome gradient_bound() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = cli::gradient_bound_suite(1000, 10, 20240601);
  const double dt = seconds_since(t0);
  return {r.pass && dt < 30.0, r.detail + fmt(", %.2f s (limit 30 s)", dt)};
}

Outcome area_law_and_invariance() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto map = conformal::exact_family(conformal::Family::quartic, 0.35, 1.0);
  const auto sys = geometry::make_system({conformal::trace_boundary(map, 512)});
  const double S = sys.total_area();
  const auto traj = evolution::run_free(sys, 1.0, 0.5 * S, {}, with_h(0.01));
  // Interior probes away from the symmetry center and the final boundary.
  const std::vector<Point> probes = {{0.03, 0.01}, {-0.02, 0.015}};
  double area_err = 0.0, drift = 0.0;
  std::vector<Eigen::Vector2d> g0;
  for (Point p : probes) g0.push_back(potential::eval_potential(sys, p).gradient);
  for (const auto& s : traj.snapshots) {
    area_err = std::max(area_err, std::abs(s.total_area() - (S - s.time)) / S);
    for (std::size_t k = 0; k < probes.size(); ++k)
      drift = std::max(drift, (potential::eval_potential(s, probes[k]).gradient - g0[k]).norm());
  }
  const double dt = seconds_since(t0);
  const bool pass = area_err < 1e-4 && drift < 1e-3 * std::sqrt(S) && dt < 120.0 &&
                    traj.total_time >= 0.5 * S * (1 - 1e-9);
  return {pass, fmt("max area error %.3g (tol 1e-4), gradient drift %.3g (tol %.3g), %.1f s", area_err, drift,
                    1e-3 * std::sqrt(S), dt)};
}

Outcome ellipse_self_similarity() {
  const auto sys = geometry::make_system({geometry::make_ellipse({0, 0}, 2.0, 1.0, 400)});
  const double S = sys.total_area();
  // The aspect error is a discretization error ~ h^2 (1.2e-3 at 0.01, 2.9e-4 at 0.005).
  const auto traj = evolution::run_free(sys, 1.0, 0.9 * S, {}, with_h(0.005));
  double worst = 0.0;
  for (const auto& s : traj.snapshots) {
    const auto fit = geometry::fit_ellipse(s.bubbles.at(0).boundary.vertices);
    worst = std::max(worst, std::abs(fit.major / fit.minor - 2.0));
  }
  // Extracted volume q t; area drift belongs to the area-law criterion.
  const double reached = traj.total_time / S;
  return {worst < 1e-3 && reached >= 0.9 - 1e-9,
          fmt("max |aspect - 2| = %.3g (tol 1e-3) through %.1f%% extraction", worst, 100.0 * reached)};
}

Outcome breakup_criteria() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto fam = analysis::dumbbell_family(400);
  std::ostringstream os;
  bool pass = true;
  for (double c : {0.01, 0.05}) {
    const auto I = potential::breakup_integral([c](double x) { return (c + x * x) * (1.0 - x * x); }, 1.0);
    const auto s = analysis::classify_member(fam, c, with_h(0.01));
    const bool crit = I.verdict == potential::BreakupVerdict::breaks;
    pass = pass && (!crit || s.breaks);
    os << "c=" << c << ": I=" << fmt("%.4f", I.value) << (crit ? " breaks" : " no conclusion") << ", simulation "
       << (s.breaks ? "breaks" : "no breakup") << "; ";
  }
  double worst = 0.0;
  for (auto [a, b] : {std::pair{2.0, 1.0}, std::pair{3.0, 0.5}, std::pair{1.2, 1.0}, std::pair{10.0, 1.0}}) {
    const auto I = potential::breakup_integral([a, b](double x) { return b * b * (1.0 - x * x / (a * a)); }, a);
    worst = std::max(worst, std::abs(I.value - kPi * (a - b) / (2.0 * (a + b))));
    pass = pass && I.verdict == potential::BreakupVerdict::no_conclusion;
  }
  pass = pass && worst < 1e-5;
  const double dt = seconds_since(t0);
  pass = pass && dt < 300.0;
  os << fmt("ellipse profiles never trigger, max |I - pi(a-b)/(2(a+b))| = %.3g; %.1f s", worst, dt);
  return {pass, os.str()};
}

Outcome quartic_asymptotics() {
  std::vector<geometry::BoundaryCurve> curves;
  std::vector<double> areas;
  for (double A = 0.1; A >= 0.001 * (1 - 1e-9); A /= std::sqrt(10.0)) {
    curves.push_back(conformal::trace_boundary(conformal::exact_family(conformal::Family::quartic, A, 1.0), 2048));
    areas.push_back(A);
  }
  const auto fit = analysis::fit_limit_curve(curves, areas, 2, 1.0, 0.0);
  std::ostringstream os;
  os << "sup-distance";
  for (double r : fit.residuals) os << ' ' << fmt("%.3g", r);
  os << " (final tol 0.05, monotone " << (fit.parameter("decreasing") > 0.5 ? "yes" : "no") << ")";
  return {fit.pass, os.str()};
}

Outcome log_slowdown() {
  std::ostringstream os;
  bool oracle = true;
  for (auto [rho, x0] : {std::pair{1.0, 2.5}, std::pair{0.74, 2.85}}) {
    const double b = analysis::greens_ratio(geometry::make_circle({0, 0}, rho, 512), {x0, 0.0});
    oracle = oracle && std::abs(b - rho / x0) < 1e-6;
  }
  os << "disk oracle b = rho/x0 " << (oracle ? "ok" : "FAILED") << "; ";
  const auto sys = geometry::make_system(
      {geometry::make_circle({0, 0}, 1.0, 400, true), geometry::make_circle({3, 0}, 0.5, 200, true)});
  const auto traj = evolution::run_free(sys, 1.0, sys.total_area(), {}, with_h(0.01));
  const auto fit = analysis::fit_logslow(traj, 1, 1);
  double worst = 0.0;
  for (double r : fit.residuals) worst = std::max(worst, r);
  os << fit.note << fmt("; Q log(tau)/(2q log b) mean %.3f, max |ratio-1| %.3f (tol 0.15)",
                        fit.parameter("ratio_Q_mean"), worst)
     << fmt("; next-order law Q = q log b / log(r_A zeta'/(1-b^2)) ratio mean %.4f",
            fit.parameter("ratio_Q_next_order_mean"));
  return {oracle && fit.pass, os.str()};
}

Outcome commutativity() {
  const auto sys = equal_disks(300);
  const double S = sys.total_area();
  const auto num = with_h(0.01);
  const double h = num.h_factor * std::sqrt(S);
  const double d = analysis::path_independence_check(sys, 0.1 * S, 0.1 * S, num);
  return {d < 2.0 * h, fmt("Hausdorff distance %.3g (tol 2h = %.3g)", d, 2.0 * h)};
}

Outcome kufarev() {
  // Trigonometric reference for 162 x^3 - 99 x^2 + 2.25 in long double.
  const long double a = -99.0L / 162.0L, c = 2.25L / 162.0L;
  const long double p = -a * a / 3.0L, q = 2.0L * a * a * a / 27.0L + c;
  std::vector<long double> ref;
  const long double m = 2.0L * std::sqrt(-p / 3.0L);
  const long double th = std::acos(3.0L * q / (p * m)) / 3.0L;
  for (int k = 0; k < 3; ++k) ref.push_back(m * std::cos(th - 2.0L * std::numbers::pi_v<long double> * k / 3.0L) - a / 3.0L);
  std::sort(ref.begin(), ref.end());
  const auto roots = conformal::real_cubic_roots(162.0, -99.0, 0.0, 2.25);
  double root_err = roots.size() == 3 ? 0.0 : 1.0;
  for (std::size_t i = 0; i < roots.size() && i < 3; ++i)
    root_err = std::max(root_err, static_cast<double>(std::abs(roots[i] - ref[i])));
  // The quoted values {-0.134, 0.180, 0.566} are rounded loosely (the exact
  // roots are -0.13632, 0.17936, 0.56807); they only identify the brackets.
  const bool bracket = roots.size() == 3 && std::abs(roots[0] + 0.134) < 3e-3 && std::abs(roots[1] - 0.180) < 3e-3 &&
                       std::abs(roots[2] - 0.566) < 3e-3;

  const auto pc = analysis::kufarev_partial(3.0, 1.0, 0.5, 1.0);
  const auto sys = geometry::make_system(
      {geometry::make_circle({0, 0}, 1.0, 400, true), geometry::make_circle({3, 0}, 0.5, 200, true)});
  const auto traj = evolution::run_free(sys, 1.0, sys.total_area(), {}, with_h(0.01));
  const auto cps = analysis::contraction_points(traj);
  double dz = 1e9, dtau = 1e9;
  for (const auto& cp : cps)
    if (cp.kind == analysis::ContractionKind::partial) {
      dz = std::abs(cp.location - pc.z0);
      dtau = std::abs(cp.extrapolated_time - pc.tau);
    }
  const double h = traj.h;
  const bool pass = root_err < 1e-9 && bracket && dz < 3.0 * h && dtau < std::pow(3.0 * h, 2);
  std::ostringstream os;
  os << fmt("roots %.6f %.6f %.6f", roots.size() > 0 ? roots[0] : NAN, roots.size() > 1 ? roots[1] : NAN,
            roots.size() > 2 ? roots[2] : NAN)
     << fmt(" (err %.2g, tol 1e-9); z0 = %.5f, tau = %.5f", root_err, pc.z0.real(), pc.tau)
     << fmt("; |dz0| = %.3g (tol 3h = %.3g), |dtau| = %.3g (tol (3h)^2 = %.3g)", dz, 3.0 * h, dtau, std::pow(3.0 * h, 2));
  return {pass, os.str()};
}

Outcome saddle_asymptotics() {
  std::vector<geometry::BoundaryCurve> curves;
  std::vector<double> areas;
  for (double A = 0.1; A >= 0.001 * (1 - 1e-9); A /= std::sqrt(10.0)) {
    curves.push_back(conformal::trace_boundary(conformal::exact_family(conformal::Family::saddle, A, 1.0), 4096));
    areas.push_back(A);
  }
  const auto fit = analysis::fit_limit_curve(curves, areas, 1, 1.0, 0.0, analysis::LimitModel::saddle_node);
  const double cx = fit.parameter("cusp_x"), ex = fit.parameter("cusp_exponent"),
               dir = fit.parameter("cusp_direction_x");
  // The companion bubble contracts on the negative real axis.
  const bool pass = fit.pass && std::abs(cx + 0.5) < 0.02 && std::abs(ex - 1.5) <= 0.1 && dir < -0.9;
  std::ostringstream os;
  os << fmt("final sup-distance %.3g (tol 0.05), ", fit.residuals.back())
     << (fit.parameter("decreasing") > 0.5 ? "monotone" : "NOT monotone")
     << fmt("; cusp at x = %.4f, exponent %.3f (1.5 +- 0.1), direction x-component %.3f", cx, ex, dir);
  return {pass, os.str()};
}

Outcome rupture_boundary() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto fam = analysis::dumbbell_family(300);
  const double lo = 0.005, hi = 0.105;
  const auto fine = with_h(0.005);
  const auto rep = analysis::rupture_boundary_sweep(fam, lo, hi, 11, with_h(0.02), 1e-3, &fine);
  const bool bracketed = rep.sigma && rep.bracket_hi - rep.bracket_lo <= 1e-3 * (hi - lo) * (1 + 1e-9);
  const bool cusp = rep.cusp.found && std::abs(rep.cusp.exponent - 2.5) <= 0.2 && rep.cusp.relax_steps >= 0 &&
                    rep.cusp.relax_steps <= 10;
  std::ostringstream os;
  os << (rep.sigma ? fmt("sigma = %.6f in [%.6f, %.6f]", *rep.sigma, rep.bracket_lo, rep.bracket_hi) : "no sigma")
     << fmt(" (width tol %.2g)", 1e-3 * (hi - lo)) << (rep.monotone ? ", monotone" : ", NOT monotone")
     << (rep.sufficiency_holds ? ", sufficiency holds" : ", sufficiency violated")
     << fmt("; at-sigma peak scaled curvature %.3g at t = %.4f, fitted exponent %.3f (need cusp 2.5 +- 0.2)",
            rep.cusp.metric, rep.cusp.time, rep.cusp.exponent)
     << ", relax steps " << rep.cusp.relax_steps << fmt("; %.0f s", seconds_since(t0));
  return {bracketed && cusp, os.str()};
}

Outcome synchronization() {
  const auto sys = equal_disks(300);
  const auto rep = analysis::find_synchronizing(sys, with_h(0.01));
  double worst = 0.0;
  bool pd = rep.endpoints.size() == 2;
  for (const auto& e : rep.endpoints) {
    // Closed form: x/2 - 1 + 1/(2(x + 2)) = 0 in the right disk, x = sqrt(3).
    const Point expected(e.refined.real() > 0 ? std::sqrt(3.0) : -std::sqrt(3.0), 0.0);
    worst = std::max(worst, std::abs(e.refined - expected));
    pd = pd && e.classification.eigenvalues(0) > 0.0;
  }
  const bool pass = rep.strategy && rep.free_synchronizes && rep.gradient_check && pd && rep.minima_check &&
                    worst < 1e-6;
  std::ostringstream os;
  os << (rep.free_synchronizes ? "free strategy synchronizes" : "free strategy does not synchronize")
     << fmt(", time gap %.3g", rep.time_gap);
  for (const auto& e : rep.endpoints)
    os << fmt("; endpoint (%.6f, %.2g) |grad| %.3g, eigenvalues", e.location.real(), e.location.imag(), e.gradient_norm)
       << fmt(" %.4f %.4f", e.classification.eigenvalues(0), e.classification.eigenvalues(1));
  os << fmt("; max |refined - (+-sqrt 3, 0)| = %.3g (tol 1e-6), gradient tol %.3g", worst, 1e-3 * std::sqrt(sys.total_area()));
  return {static_cast<bool>(pass), os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--strict") == 0) {
      strict = true;
    } else {
      only.push_back(std::atoi(argv[i]));
    }
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"ellipse potential oracle", ellipse_oracle},
      {"gradient bound", gradient_bound},
      {"area law and interior invariance", area_law_and_invariance},
      {"ellipse self-similarity", ellipse_self_similarity},
      {"breakup criteria", breakup_criteria},
      {"degenerate asymptotics (quartic family)", quartic_asymptotics},
      {"logarithmic slowdown", log_slowdown},
      {"commutativity", commutativity},
      {"two-disk exact solution", kufarev},
      {"saddle-node asymptotics", saddle_asymptotics},
      {"rupture boundary", rupture_boundary},
      {"synchronization", synchronization},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), n) == only.end()) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("criterion %d: %s %s -- %s\n", n, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return strict && failed > 0 ? 1 : 0;
}
