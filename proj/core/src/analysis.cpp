#include "hsb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "hsb/error.hpp"

namespace hsb::analysis {

namespace {

constexpr double kPi = std::numbers::pi;

double norm2(const Eigen::Vector2d& g) { return g.norm(); }

// Snapshot at time >= t that no longer holds `label` (empty when none).
BubbleSystem state_after(const Trajectory& traj, double t, int label) {
  for (const auto& s : traj.snapshots)
    if (s.time >= t - 1e-12 * std::max(1.0, t) && s.find(label) == nullptr) return s;
  BubbleSystem empty;
  empty.time = t;
  return empty;
}

// A point well inside the bubble: the centroid when it is interior and far
// enough from the boundary, otherwise the deepest vertex-normal offset.
Point interior_point(const geometry::BoundaryCurve& c) {
  const Point g = geometry::centroid(c.vertices);
  const double spacing = geometry::perimeter(c.vertices) / static_cast<double>(c.size());
  if (geometry::contains(c.vertices, g) && geometry::distance_to_polyline(c.vertices, g) > 2.0 * spacing) return g;
  Point best = g;
  double depth = -1.0;
  const auto& v = c.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point t = v[(i + 1) % v.size()] - v[(i + v.size() - 1) % v.size()];
    const Point inward = Point(-t.imag(), t.real()) / std::abs(t);
    for (double s : {0.5, 0.25, 0.1}) {
      const Point p = v[i] + s * std::sqrt(geometry::area(c)) * inward;
      if (!geometry::contains(v, p)) continue;
      const double d = geometry::distance_to_polyline(v, p);
      if (d > depth) {
        depth = d;
        best = p;
      }
    }
  }
  return best;
}

}  // namespace

std::string to_string(ContractionKind kind) { return kind == ContractionKind::complete ? "complete" : "partial"; }

potential::GradientField accumulated_potential(const BubbleSystem& initial, const BubbleSystem& current) {
  return [initial, current](Point p) { return potential::eval_difference(initial, current, p); };
}

std::vector<ContractionPoint> contraction_points(const Trajectory& traj) {
  if (traj.termination == evolution::Termination::cusp) throw solver_error("trajectory terminated by a cusp");
  const bool finished = traj.termination == evolution::Termination::all_vanished ||
                        traj.termination == evolution::Termination::completed ||
                        traj.total_time >= traj.t_star * (1.0 - 1e-6);
  if (!finished) throw validation_error("contraction_points needs a run that reached t* or lost every bubble");

  const double L = std::sqrt(traj.initial_area);
  const double S = traj.initial_area;
  std::vector<ContractionPoint> out;
  for (const auto& e : traj.events) {
    if (e.kind != evolution::Event::Kind::disappearance) continue;
    ContractionPoint cp;
    cp.location = e.location;
    cp.time = e.time;
    cp.extrapolated_time = e.extrapolated_time;
    cp.label = e.labels.empty() ? -1 : e.labels.front();
    const BubbleSystem after = state_after(traj, e.time, cp.label);
    cp.kind = after.bubbles.empty() ? ContractionKind::complete : ContractionKind::partial;
    const auto field = accumulated_potential(traj.initial, after);
    try {
      cp.gradient_norm = norm2(field(e.location).gradient);
    } catch (const Error&) {
      cp.gradient_norm = std::numeric_limits<double>::infinity();
    }
    potential::CriticalSearchOptions opts;
    opts.gradient_tolerance = 1e-10;
    const auto refined = potential::refine_critical_point(field, e.location, L, opts);
    if (!refined) {
      cp.refined = e.location;
      out.push_back(cp);
      continue;
    }
    cp.refined = refined->location;
    cp.inside_initial = geometry::bubble_containing(traj.initial, cp.refined) >= 0;
    const double near = std::abs(cp.refined - e.location);
    bool global = false;
    if (!after.bubbles.empty()) {
      // The accumulated potential is constant inside the survivors and that
      // constant is its global minimum.
      double interior = std::numeric_limits<double>::infinity();
      for (const auto& b : after.bubbles) {
        try {
          interior = std::min(interior, field(interior_point(b.boundary)).value);
        } catch (const Error&) {
        }
      }
      cp.value_gap = refined->value - interior;
      global = std::abs(cp.value_gap) < 1e-3 * S && refined->kind == potential::CriticalKind::minimum;
    } else {
      const geometry::Box box = geometry::bounding_box(traj.initial);
      const Point pad = 0.1 * (box.hi - box.lo);
      const auto search = potential::find_critical_points(traj.initial, {box.lo - pad, box.hi + pad});
      double lowest = std::numeric_limits<double>::infinity();
      for (const auto& p : search.points)
        if (p.kind == potential::CriticalKind::minimum) lowest = std::min(lowest, p.value);
      cp.value_gap = refined->value - lowest;
      global = refined->kind == potential::CriticalKind::minimum && cp.value_gap < 1e-3 * S;
    }
    cp.verified = global && near < 3.0 * traj.h;
    out.push_back(cp);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Two-disk partial contraction

double kufarev_map_time(double r, double q, double t) { return t + kPi * r * r / q; }

PartialContraction kufarev_partial(double a, double R, double r, double q) {
  if (!(R > r) || !(r > 0.0)) throw validation_error("kufarev_partial needs R > r > 0");
  if (!(a > R + r)) throw validation_error("kufarev_partial needs a > R + r");
  if (!(q > 0.0)) throw validation_error("kufarev_partial needs q > 0");

  const double t_star = kPi * (R * R + r * r) / q;
  const double L = std::sqrt(kPi * (R * R + r * r));
  auto initial = [a, R, r](Point p) {
    potential::PotentialProbe s = potential::disk_potential({0.0, 0.0}, R, p);
    const potential::PotentialProbe t = potential::disk_potential({a, 0.0}, r, p);
    s.value += t.value;
    s.gradient += t.gradient;
    s.hessian += t.hessian;
    return s;
  };

  struct Eval {
    bool ok = false;
    double gap = 0.0;
    Point z0;
    double grad = 0.0;
    conformal::KufarevMap map;
  };
  Point seed(a, 0.0);
  auto evaluate = [&](double tau) {
    Eval ev;
    try {
      ev.map = conformal::kufarev_solve(a, R, r, q, kufarev_map_time(r, q, tau));
    } catch (const Error&) {
      return ev;
    }
    const geometry::BoundaryCurve trace = conformal::trace_boundary(ev.map, 2048);
    auto field = [&](Point p) {
      potential::PotentialProbe s = initial(p);
      const potential::PotentialProbe b = potential::eval_polygon(trace.vertices, p);
      s.value -= b.value;
      s.gradient -= b.gradient;
      s.hessian -= b.hessian;
      return s;
    };
    const auto cp = potential::refine_critical_point(field, seed, L);
    if (!cp || geometry::contains(trace.vertices, cp->location)) return ev;
    ev.ok = true;
    ev.z0 = cp->location;
    ev.grad = cp->gradient_norm;
    ev.gap = cp->value - field(interior_point(trace)).value;
    return ev;
  };

  // Bracket the first sign change of the value gap on (0, t*).
  const int scan = 64;
  double lo = 0.0, hi = 0.0;
  Eval prev;
  double prev_tau = 0.0;
  bool bracketed = false;
  for (int k = 1; k < scan; ++k) {
    const double tau = t_star * k / scan;
    const Eval ev = evaluate(tau);
    if (!ev.ok) {
      prev.ok = false;
      continue;
    }
    if (prev.ok && (prev.gap < 0.0) != (ev.gap < 0.0)) {
      lo = prev_tau;
      hi = tau;
      bracketed = true;
      break;
    }
    prev = ev;
    prev_tau = tau;
    seed = ev.z0;
  }
  if (!bracketed) throw solver_error("kufarev_partial: no root of the contraction condition in the validity window");

  boost::uintmax_t iterations = 100;
  auto gap = [&](double tau) {
    const Eval ev = evaluate(tau);
    if (!ev.ok) throw solver_error("kufarev_partial: evaluation failed inside the bracket");
    seed = ev.z0;
    return ev.gap;
  };
  const auto root = boost::math::tools::toms748_solve(
      gap, lo, hi, boost::math::tools::eps_tolerance<double>(48), iterations);
  const double tau = 0.5 * (root.first + root.second);
  const Eval fin = evaluate(tau);
  if (!fin.ok) throw solver_error("kufarev_partial: final evaluation failed");
  PartialContraction out;
  out.z0 = fin.z0;
  out.tau = tau;
  out.map = fin.map;
  out.residual = std::abs(fin.gap);
  out.gradient_norm = fin.grad;
  return out;
}

// ---------------------------------------------------------------------------
// Green's function normalization

GreensData greens_data(const BoundaryCurve& domain, Point p2, const Numerics& numerics) {
  geometry::require_valid(domain);
  if (geometry::contains(domain.vertices, p2) || geometry::distance_to_polyline(domain.vertices, p2) < 1e-9)
    throw validation_error("greens_ratio: P2 must lie strictly outside the domain");
  BoundaryCurve curve = domain;
  // The spectral geometry wants an even, reasonably dense sampling.
  if (curve.size() < 256 || curve.size() % 2 != 0) {
    std::size_t n = std::max<std::size_t>(512, curve.size() + curve.size() % 2);
    curve = geometry::resample_count(curve, n);
  }
  Numerics num = numerics;
  num.polygon_flux = false;
  const auto field = evolution::solve_field(geometry::make_system({curve}), evolution::FluxSpec::free_flux(1.0), num);
  const double spacing = geometry::perimeter(curve.vertices) / static_cast<double>(curve.size());
  const double clearance = geometry::distance_to_polyline(curve.vertices, p2);
  if (clearance < 2.0 * spacing)
    throw validation_error("greens_ratio: P2 is too close to the boundary for the quadrature");
  // log|zeta| = 2 pi Phi for unit extraction; |zeta'| = |zeta| |grad log|zeta||.
  GreensData out;
  out.b = std::exp(2.0 * kPi * field.phi(p2));
  const double d = 1e-3 * clearance;
  const double gx = field.phi(p2 + Point(d, 0.0)) - field.phi(p2 - Point(d, 0.0));
  const double gy = field.phi(p2 + Point(0.0, d)) - field.phi(p2 - Point(0.0, d));
  out.derivative = out.b * 2.0 * kPi * std::hypot(gx, gy) / (2.0 * d);
  return out;
}

double greens_ratio(const BoundaryCurve& domain, Point p2, const Numerics& numerics) {
  return greens_data(domain, p2, numerics).b;
}

// ---------------------------------------------------------------------------
// Commutativity

double path_independence_check(const BubbleSystem& initial, double dq1, double dq2, const Numerics& numerics) {
  if (initial.bubbles.size() != 2) throw validation_error("path_independence_check needs two bubbles");
  if (dq1 < 0.0 || dq2 < 0.0) throw validation_error("path_independence_check needs nonnegative volumes");
  if (dq1 == 0.0 || dq2 == 0.0) return 0.0;  // the two orderings are the same schedule
  const Strategy first = Strategy::from_volumes({{dq1, 0.0}, {0.0, dq2}});
  const Strategy second = Strategy::from_volumes({{0.0, dq2}, {dq1, 0.0}});
  auto run = [&](const Strategy& s) {
    const Trajectory t = evolution::run_regulated(initial, s, {}, numerics);
    if (t.termination == evolution::Termination::cusp) throw Error(ErrorKind::cusp, "cusp during path_independence_check");
    if (t.termination != evolution::Termination::strategy_exhausted)
      throw solver_error("path_independence_check: ordering ended early (" + evolution::to_string(t.termination) + ")");
    return t.snapshots.back();
  };
  return geometry::hausdorff_distance(run(first), run(second));
}

}  // namespace hsb::analysis
