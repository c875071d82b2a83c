#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "hsb/analysis.hpp"
#include "hsb/error.hpp"

namespace hsb::analysis {

namespace {

constexpr double kPi = std::numbers::pi;

double area_of(const BubbleSystem& s, int label) {
  const auto* b = s.find(label);
  return b ? geometry::area(b->boundary) : 0.0;
}

double disappearance_time(const Trajectory& t, int label, Point* where = nullptr) {
  for (const auto& e : t.events)
    if (e.kind == evolution::Event::Kind::disappearance && !e.labels.empty() && e.labels.front() == label) {
      if (where) *where = e.location;
      return e.time;
    }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

std::string to_string(CellStatus s) {
  switch (s) {
    case CellStatus::accessible: return "accessible";
    case CellStatus::inaccessible: return "inaccessible";
    case CellStatus::boundary: return "boundary";
    case CellStatus::unknown: return "unknown";
  }
  return "unknown";
}

Point RegionMap::center(int i, int j) const {
  return {(i + 0.5) * S1 / grid_n, (j + 0.5) * S2 / grid_n};
}

// ---------------------------------------------------------------------------
// Accessibility region

RegionMap accessibility_region(const BubbleSystem& initial, int grid_n, const Numerics& numerics,
                               const std::function<void(int, int)>& progress) {
  if (initial.bubbles.size() != 2) throw validation_error("accessibility_region needs exactly two bubbles");
  if (grid_n < 16) throw validation_error("accessibility_region needs grid_n >= 16");
  RegionMap map;
  map.grid_n = grid_n;
  map.S1 = geometry::area(initial.bubbles[0].boundary);
  map.S2 = geometry::area(initial.bubbles[1].boundary);
  const int l1 = initial.bubbles[0].label, l2 = initial.bubbles[1].label;

  // Distance from (S1, S2) to the rectangle edge along extraction direction theta.
  auto edge = [&](double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    double len = std::numeric_limits<double>::infinity();
    if (c > 1e-15) len = std::min(len, map.S1 / c);
    if (s > 1e-15) len = std::min(len, map.S2 / s);
    return len;
  };

  const int n_rays = 2 * grid_n + 1;
  map.rays.resize(static_cast<std::size_t>(n_rays));
  for (int k = 0; k < n_rays; ++k) {
    RayProbe& ray = map.rays[static_cast<std::size_t>(k)];
    ray.angle = 0.5 * kPi * k / (n_rays - 1);
    ray.length = edge(ray.angle);
    const double c = std::cos(ray.angle), s = std::sin(ray.angle);
    const double q1 = c / (c + s), q2 = s / (c + s);
    // Unit total rate: extracted vector after time t is t (q1, q2).
    const double speed = std::hypot(q1, q2);
    const Strategy strategy = Strategy::constant(q1, q2, ray.length / speed);
    try {
      const Trajectory t = evolution::run_regulated(initial, strategy, {}, numerics);
      ray.termination = evolution::to_string(t.termination);
      if (t.termination == evolution::Termination::cusp) {
        ray.reach = t.total_time * speed;
      } else {
        ray.complete = true;
        ray.reach = ray.length;
      }
    } catch (const Error& e) {
      ray.failed = true;
      ray.termination = e.what();
    }
    if (progress) progress(k + 1, n_rays);
  }

  map.cells.assign(static_cast<std::size_t>(grid_n * grid_n), CellStatus::unknown);
  map.witness.assign(map.cells.size(), std::nullopt);
  const double cell_diag = std::hypot(map.S1 / grid_n, map.S2 / grid_n);
  for (int j = 0; j < grid_n; ++j) {
    for (int i = 0; i < grid_n; ++i) {
      const Point c = map.center(i, j);
      const double d1 = map.S1 - c.real(), d2 = map.S2 - c.imag();
      const double theta = std::atan2(d2, d1);
      const double dist = std::hypot(d1, d2);
      const double pos = theta / (0.5 * kPi) * (n_rays - 1);
      const int k = std::clamp(static_cast<int>(std::floor(pos)), 0, n_rays - 2);
      const RayProbe& a = map.rays[static_cast<std::size_t>(k)];
      const RayProbe& b = map.rays[static_cast<std::size_t>(k + 1)];
      CellStatus status;
      if (a.failed || b.failed) {
        status = CellStatus::unknown;
      } else if (a.complete && b.complete) {
        status = CellStatus::accessible;
      } else {
        const double len = edge(theta);
        const double fa = a.reach / a.length, fb = b.reach / b.length;
        const double fc = dist / len, margin = 0.5 * cell_diag / len;
        if (fc + margin <= std::min(fa, fb))
          status = CellStatus::accessible;
        else if (fc - margin >= std::max(fa, fb))
          status = CellStatus::inaccessible;
        else
          status = CellStatus::boundary;
      }
      const std::size_t idx = static_cast<std::size_t>(j * grid_n + i);
      map.cells[idx] = status;
      if (status == CellStatus::accessible) map.witness[idx] = Strategy::constant(d1 / (d1 + d2), d2 / (d1 + d2), d1 + d2);
    }
  }
  map.origin_accessible = map.at(0, 0) == CellStatus::accessible;

  try {
    const Trajectory free = evolution::run_free(initial, 1.0, initial.total_area(), {}, numerics);
    for (const auto& s : free.snapshots) map.free_path.emplace_back(area_of(s, l1), area_of(s, l2));
    map.free_path.emplace_back(0.0, 0.0);
    // Drop the closing point when the run ended with one bubble left.
    if (std::isfinite(disappearance_time(free, l1)) != std::isfinite(disappearance_time(free, l2)))
      map.free_path.pop_back();
  } catch (const Error&) {
    // The free path is informative only; the grid stands on its own.
  }
  return map;
}

// ---------------------------------------------------------------------------
// Synchronizing strategies

Strategy strategy_from_free_run(const Trajectory& traj) {
  if (traj.initial.bubbles.size() != 2) throw validation_error("strategy_from_free_run needs a two-bubble run");
  const int l1 = traj.initial.bubbles[0].label, l2 = traj.initial.bubbles[1].label;
  Strategy s;
  s.breakpoints.push_back(0.0);
  for (std::size_t i = 0; i + 1 < traj.snapshots.size() && i < traj.fluxes.size(); ++i) {
    const auto& snap = traj.snapshots[i];
    double q1 = 0.0, q2 = 0.0;
    for (std::size_t b = 0; b < snap.bubbles.size() && b < traj.fluxes[i].size(); ++b) {
      if (snap.bubbles[b].label == l1) q1 = traj.fluxes[i][b];
      if (snap.bubbles[b].label == l2) q2 = traj.fluxes[i][b];
    }
    const double t_next = traj.snapshots[i + 1].time;
    if (!(t_next > s.breakpoints.back())) continue;
    s.rates.emplace_back(std::max(q1, 0.0), std::max(q2, 0.0));
    s.breakpoints.push_back(t_next);
  }
  return s;
}

namespace {

struct Attempt {
  bool ok = false;
  double t1 = 0.0, t2 = 0.0;
  Point p1, p2;
  Strategy strategy;
  std::string failure;
};

// Proportional regulated path to the anti-diagonal point u, then free
// continuation.
Attempt attempt_crossing(const BubbleSystem& initial, double u, const Numerics& numerics) {
  Attempt at;
  const double S1 = geometry::area(initial.bubbles[0].boundary);
  const double S2 = geometry::area(initial.bubbles[1].boundary);
  const int l1 = initial.bubbles[0].label, l2 = initial.bubbles[1].label;
  const double d1 = S1 - S1 * u, d2 = S2 - S2 * (0.5 - u);
  const double total = d1 + d2;
  const Strategy lead = Strategy::constant(d1 / total, d2 / total, total);
  try {
    const Trajectory reg = evolution::run_regulated(initial, lead, {}, numerics);
    if (reg.termination == evolution::Termination::cusp) {
      at.failure = "cusp on the regulated leg";
      return at;
    }
    if (reg.termination != evolution::Termination::strategy_exhausted) {
      at.failure = "regulated leg ended with " + evolution::to_string(reg.termination);
      return at;
    }
    BubbleSystem mid = reg.snapshots.back();
    const double offset = mid.time;
    mid.time = 0.0;
    const Trajectory free = evolution::run_free(mid, 1.0, mid.total_area(), {}, numerics);
    at.t1 = offset + disappearance_time(free, l1, &at.p1);
    at.t2 = offset + disappearance_time(free, l2, &at.p2);
    at.strategy = lead;
    const Strategy tail = strategy_from_free_run(free);
    for (std::size_t i = 0; i < tail.rates.size(); ++i) {
      at.strategy.rates.push_back(tail.rates[i]);
      at.strategy.breakpoints.push_back(offset + tail.breakpoints[i + 1]);
    }
    at.ok = std::isfinite(at.t1) && std::isfinite(at.t2);
    if (!at.ok) at.failure = "a bubble broke up or survived; no simultaneous endpoint";
  } catch (const Error& e) {
    at.failure = e.what();
  }
  return at;
}

SyncEndpoint make_endpoint(const BubbleSystem& initial, int label, Point where) {
  SyncEndpoint ep;
  ep.label = label;
  ep.location = where;
  ep.refined = where;
  const double L = std::sqrt(initial.total_area());
  const potential::GradientField field = [&initial](Point p) { return potential::eval_potential(initial, p); };
  try {
    ep.gradient_norm = field(where).gradient.norm();
  } catch (const Error&) {
    ep.gradient_norm = std::numeric_limits<double>::infinity();
  }
  if (auto cp = potential::refine_critical_point(field, where, L)) {
    ep.refined = cp->location;
    ep.classification = *cp;
  } else {
    ep.classification.kind = potential::CriticalKind::degenerate;
  }
  ep.inside_initial = geometry::bubble_containing(initial, ep.refined) >= 0;
  return ep;
}

}  // namespace

SyncReport find_synchronizing(const BubbleSystem& initial, const Numerics& numerics, int max_bisections) {
  if (initial.bubbles.size() != 2) throw validation_error("find_synchronizing needs exactly two bubbles");
  const double S = initial.total_area();
  const double h = numerics.h_factor * std::sqrt(S);
  // Time to drain one vanish threshold at unit rate.
  const double gap_tol = std::pow(numerics.vanish_factor * h, 2);
  const int l1 = initial.bubbles[0].label, l2 = initial.bubbles[1].label;

  SyncReport rep;
  Point p1, p2;
  double t1 = 0.0, t2 = 0.0;
  {
    const Trajectory free = evolution::run_free(initial, 1.0, S, {}, numerics);
    t1 = disappearance_time(free, l1, &p1);
    t2 = disappearance_time(free, l2, &p2);
    if (std::isfinite(t1) && std::isfinite(t2) && std::abs(t1 - t2) <= gap_tol) {
      rep.free_synchronizes = true;
      rep.strategy = strategy_from_free_run(free);
    }
  }
  if (!rep.free_synchronizes) {
    // Which bubble vanishes first as a function of the crossing parameter.
    auto side = [](const Attempt& a) { return a.t1 < a.t2; };
    double lo = 0.0, hi = 0.5;
    Attempt a_lo = attempt_crossing(initial, 0.02, numerics);
    Attempt a_hi = attempt_crossing(initial, 0.48, numerics);
    lo = 0.02;
    hi = 0.48;
    if (!a_lo.ok || !a_hi.ok || side(a_lo) == side(a_hi)) {
      rep.note = "no bracket on the anti-diagonal: " +
                 (!a_lo.ok ? a_lo.failure : (!a_hi.ok ? a_hi.failure : std::string("endpoint side does not change")));
      return rep;
    }
    const bool lo_better = std::abs(a_lo.t1 - a_lo.t2) < std::abs(a_hi.t1 - a_hi.t2);
    Attempt best = lo_better ? a_lo : a_hi;
    double best_u = lo_better ? lo : hi;
    for (int it = 0; it < max_bisections; ++it) {
      const double mid = 0.5 * (lo + hi);
      const Attempt a = attempt_crossing(initial, mid, numerics);
      if (!a.ok) {
        rep.note = "bisection interrupted: " + a.failure;
        break;
      }
      if (std::abs(a.t1 - a.t2) < std::abs(best.t1 - best.t2)) {
        best = a;
        best_u = mid;
      }
      if (std::abs(a.t1 - a.t2) <= gap_tol) break;
      if (side(a) == side(a_lo))
        lo = mid;
      else
        hi = mid;
    }
    t1 = best.t1;
    t2 = best.t2;
    p1 = best.p1;
    p2 = best.p2;
    rep.crossing = best_u;
    if (std::abs(t1 - t2) <= gap_tol) {
      rep.strategy = best.strategy;
    } else {
      if (rep.note.empty()) rep.note = "bisection did not reach a simultaneous endpoint at grid resolution";
      rep.time_gap = std::abs(t1 - t2);
      return rep;
    }
  }
  rep.time_gap = std::abs(t1 - t2);
  rep.endpoints = {make_endpoint(initial, l1, p1), make_endpoint(initial, l2, p2)};
  const double g_tol = 1e-3 * std::sqrt(S);
  rep.gradient_check = true;
  rep.minima_check = true;
  for (const auto& ep : rep.endpoints) {
    if (!(ep.gradient_norm < g_tol)) rep.gradient_check = false;
    const auto& c = ep.classification;
    if (c.kind != potential::CriticalKind::minimum || c.degree != 1) rep.minima_check = false;
    if (!ep.inside_initial) rep.note = "an endpoint lies outside B(0); reported without further analysis";
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Rupture boundary

BubbleSystem dumbbell(double c, std::size_t count) {
  if (!(c > 0.0)) throw validation_error("dumbbell needs c > 0");
  return geometry::make_system(
      {geometry::make_profile_domain([c](double x) { return (c + x * x) * (1.0 - x * x); }, 1.0, count)});
}

Family dumbbell_family(std::size_t count) {
  Family f;
  f.make = [count](double c) { return dumbbell(c, count); };
  f.criterion = [](double c) {
    const auto I = potential::breakup_integral([c](double x) { return (c + x * x) * (1.0 - x * x); }, 1.0);
    return I.verdict == potential::BreakupVerdict::breaks;
  };
  return f;
}

SweepSample classify_member(const Family& family, double s, const Numerics& numerics) {
  SweepSample out;
  out.s = s;
  out.criterion_breaks = family.criterion ? family.criterion(s) : false;
  const BubbleSystem sys = family.make(s);
  const Trajectory t = evolution::run_free(sys, 1.0, sys.total_area(), {}, numerics);
  std::set<int> seen_later;
  for (const auto& e : t.events) {
    if (e.kind != evolution::Event::Kind::breakup) continue;
    int survivors = 0;
    for (std::size_t k = 1; k < e.labels.size(); ++k) {
      const int child = e.labels[k];
      for (const auto& snap : t.snapshots)
        if (snap.time >= e.time && snap.find(child) != nullptr) {
          ++survivors;
          break;
        }
    }
    if (survivors >= 2) {
      out.breaks = true;
      out.breakup_time = e.time;
      break;
    }
  }
  return out;
}

FamilySweepReport rupture_boundary_sweep(const Family& family, double s_lo, double s_hi, int samples,
                                         const Numerics& numerics, double tolerance, const Numerics* refined) {
  if (!(s_hi > s_lo)) throw validation_error("rupture_boundary_sweep needs s_lo < s_hi");
  if (samples < 2) throw validation_error("rupture_boundary_sweep needs at least two samples");
  FamilySweepReport rep;
  for (int k = 0; k < samples; ++k) {
    const double s = s_lo + (s_hi - s_lo) * k / (samples - 1);
    rep.samples.push_back(classify_member(family, s, numerics));
  }
  int changes = 0, at = -1;
  for (std::size_t k = 1; k < rep.samples.size(); ++k)
    if (rep.samples[k].breaks != rep.samples[k - 1].breaks) {
      ++changes;
      at = static_cast<int>(k - 1);
    }
  for (const auto& sm : rep.samples)
    if (sm.criterion_breaks && !sm.breaks) rep.sufficiency_holds = false;
  if (changes != 1) {
    rep.monotone = changes == 0;
    rep.note = changes == 0 ? "no transition inside the sampled range" : "non-monotone verdicts; no sigma claimed";
    if (changes > 1) rep.monotone = false;
    return rep;
  }
  double lo = rep.samples[static_cast<std::size_t>(at)].s, hi = rep.samples[static_cast<std::size_t>(at) + 1].s;
  const bool lo_breaks = rep.samples[static_cast<std::size_t>(at)].breaks;
  const double width = tolerance * (s_hi - s_lo);
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    const SweepSample sm = classify_member(family, mid, numerics);
    rep.samples.push_back(sm);
    if (sm.criterion_breaks && !sm.breaks) rep.sufficiency_holds = false;
    if (sm.breaks == lo_breaks)
      lo = mid;
    else
      hi = mid;
  }
  std::sort(rep.samples.begin(), rep.samples.end(), [](const SweepSample& a, const SweepSample& b) { return a.s < b.s; });
  rep.bracket_lo = lo;
  rep.bracket_hi = hi;
  rep.sigma = 0.5 * (lo + hi);

  // Cusp evidence at sigma.
  const Numerics& num = refined ? *refined : numerics;
  const BubbleSystem sys = family.make(*rep.sigma);
  try {
    const Trajectory t = evolution::run_free(sys, 1.0, sys.total_area(), {}, num);
    std::size_t peak_snap = 0;
    double peak = -1.0;
    int peak_label = -1;
    for (std::size_t i = 0; i < t.snapshots.size(); ++i)
      for (const auto& b : t.snapshots[i].bubbles) {
        const double m = geometry::max_scaled_curvature(b.boundary);
        if (m > peak) {
          peak = m;
          peak_snap = i;
          peak_label = b.label;
        }
      }
    for (const auto& e : t.events)
      if (e.kind == evolution::Event::Kind::cusp) rep.cusp.found = true;
    if (peak_label >= 0) {
      const auto* b = t.snapshots[peak_snap].find(peak_label);
      const auto& v = b->boundary.vertices;
      // Tip: vertex of largest turning angle.
      std::size_t tip = 0;
      double turn = -1.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        const Point e0 = v[i] - v[(i + v.size() - 1) % v.size()];
        const Point e1 = v[(i + 1) % v.size()] - v[i];
        const double a = std::abs(std::arg(e1 / e0));
        if (a > turn) {
          turn = a;
          tip = i;
        }
      }
      rep.cusp.time = t.snapshots[peak_snap].time;
      rep.cusp.metric = peak;
      rep.cusp.location = v[tip];
      try {
        rep.cusp.exponent = geometry::cusp_exponent(b->boundary, v[tip]).exponent;
      } catch (const Error&) {
        rep.cusp.exponent = std::numeric_limits<double>::quiet_NaN();
      }
      for (std::size_t i = peak_snap + 1; i < t.snapshots.size(); ++i) {
        double m = 0.0;
        for (const auto& bb : t.snapshots[i].bubbles) m = std::max(m, geometry::max_scaled_curvature(bb.boundary));
        if (m < num.cusp_curvature) {
          rep.cusp.relax_steps = static_cast<int>(i - peak_snap);
          break;
        }
      }
    }
  } catch (const Error& e) {
    rep.note = std::string("run at sigma failed: ") + e.what();
  }
  return rep;
}

}  // namespace hsb::analysis
