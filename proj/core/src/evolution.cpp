#include "hsb/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "hsb/error.hpp"

namespace hsb::evolution {

std::string to_string(Event::Kind kind) {
  switch (kind) {
    case Event::Kind::breakup: return "breakup";
    case Event::Kind::disappearance: return "disappearance";
    case Event::Kind::cusp: return "cusp";
  }
  return "unknown";
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::end_time: return "end_time";
    case Termination::all_vanished: return "all_vanished";
    case Termination::completed: return "completed";
    case Termination::bubble_vanished: return "bubble_vanished";
    case Termination::cusp: return "cusp";
    case Termination::strategy_exhausted: return "strategy_exhausted";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Strategy

Strategy Strategy::constant(double q1, double q2, double duration) {
  Strategy s;
  s.breakpoints = {0.0, duration};
  s.rates = {{q1, q2}};
  return s;
}

Strategy Strategy::from_volumes(const std::vector<std::pair<double, double>>& volumes, double rate) {
  if (!(rate > 0.0)) throw validation_error("strategy rate must be positive");
  Strategy s;
  s.breakpoints.push_back(0.0);
  for (const auto& [v1, v2] : volumes) {
    if (v1 < 0.0 || v2 < 0.0) throw validation_error("strategy volumes must be nonnegative");
    const double total = v1 + v2;
    if (total == 0.0) continue;
    s.rates.emplace_back(rate * v1 / total, rate * v2 / total);
    s.breakpoints.push_back(s.breakpoints.back() + total / rate);
  }
  return s;
}

std::pair<double, double> Strategy::rates_at(double t) const {
  if (rates.empty()) return {0.0, 0.0};
  const double eps = 1e-12 * std::max(1.0, end_time());
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t + eps);
  std::ptrdiff_t idx = (it - breakpoints.begin()) - 1;
  idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(rates.size()) - 1);
  return rates[static_cast<std::size_t>(idx)];
}

std::pair<double, double> Strategy::volumes() const {
  double v1 = 0.0, v2 = 0.0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const double d = breakpoints[i + 1] - breakpoints[i];
    v1 += rates[i].first * d;
    v2 += rates[i].second * d;
  }
  return {v1, v2};
}

double Strategy::end_time() const { return breakpoints.empty() ? 0.0 : breakpoints.back(); }

void Strategy::validate(const BubbleSystem& initial) const {
  if (initial.bubbles.size() != 2) throw validation_error("a strategy needs exactly two bubbles");
  if (rates.empty() || breakpoints.size() != rates.size() + 1)
    throw validation_error("strategy needs breakpoints.size() == rates.size() + 1 and at least one interval");
  if (breakpoints.front() != 0.0) throw validation_error("strategy breakpoints must start at 0");
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
    if (!(breakpoints[i + 1] > breakpoints[i])) throw validation_error("strategy breakpoints must increase");
  for (const auto& [a, b] : rates)
    if (!(a >= 0.0) || !(b >= 0.0)) throw validation_error("strategy rates must be nonnegative");
  const auto [v1, v2] = volumes();
  const double s1 = geometry::area(initial.bubbles[0].boundary);
  const double s2 = geometry::area(initial.bubbles[1].boundary);
  if (v1 > s1 * (1.0 + 1e-12) || v2 > s2 * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "strategy extracts (" << v1 << ", " << v2 << ") but the bubbles hold (" << s1 << ", " << s2 << ")";
    throw validation_error(os.str());
  }
}

// ---------------------------------------------------------------------------
// Stepping

BubbleSystem resample_system(const BubbleSystem& system, double h, const Numerics& numerics) {
  BubbleSystem out = system;
  for (auto& b : out.bubbles) {
    const double len = geometry::perimeter(b.boundary.vertices);
    auto n = static_cast<std::size_t>(std::llround(len / h));
    n = std::max(n, numerics.min_nodes);
    if (n % 2 != 0) ++n;
    b.boundary = geometry::resample_count(b.boundary, n);
  }
  return out;
}

namespace {

BubbleSystem displace(const BubbleSystem& base, const FieldSolution& field, double dt) {
  BubbleSystem out = base;
  for (std::size_t b = 0; b < out.bubbles.size(); ++b) {
    auto& v = out.bubbles[b].boundary.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += dt * field.velocity[b][i] * field.normals[b][i];
  }
  return out;
}

void require_step_valid(const BubbleSystem& s) {
  for (const auto& b : s.bubbles) {
    const auto& v = b.boundary.vertices;
    if (geometry::signed_area(v) <= 0.0) throw geometry_error("step inverted a bubble");
    if (!geometry::is_simple(v)) throw geometry_error("step produced a self-intersecting boundary");
  }
  for (std::size_t a = 0; a < s.bubbles.size(); ++a)
    for (std::size_t b = a + 1; b < s.bubbles.size(); ++b)
      if (geometry::curve_separation(s.bubbles[a].boundary.vertices, s.bubbles[b].boundary.vertices) <= 0.0)
        throw geometry_error("step made two bubbles touch");
}

// Explicit midpoint; `first` is the field at `system`.
BubbleSystem midpoint(const BubbleSystem& system, const FieldSolution& first, const FluxSpec& flux, double dt,
                      const Numerics& numerics) {
  const BubbleSystem half = displace(system, first, 0.5 * dt);
  require_step_valid(half);
  const FieldSolution mid = solve_field(half, flux, numerics);
  BubbleSystem out = system;
  for (std::size_t b = 0; b < out.bubbles.size(); ++b) {
    auto& v = out.bubbles[b].boundary.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += dt * mid.velocity[b][i] * mid.normals[b][i];
  }
  require_step_valid(out);
  out.time = system.time + dt;
  return out;
}

double min_spacing(const BubbleSystem& s) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : s.bubbles) {
    const auto& v = b.boundary.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) best = std::min(best, std::abs(v[(i + 1) % v.size()] - v[i]));
  }
  return best;
}

}  // namespace

BubbleSystem step(const BubbleSystem& system, const FluxSpec& flux, double dt, double h, const Numerics& numerics) {
  if (!(dt > 0.0)) throw validation_error("step needs dt > 0");
  const FieldSolution first = solve_field(system, flux, numerics);
  BubbleSystem out = midpoint(system, first, flux, dt, numerics);
  return resample_system(out, h, numerics);
}

// ---------------------------------------------------------------------------
// Runner

namespace {

struct CuspProbe {
  double metric = 0.0;
  Point location;
};

CuspProbe scaled_curvature_peak(const geometry::BoundaryCurve& c) {
  const auto& v = c.vertices;
  const std::size_t n = v.size();
  const double scale = std::sqrt(geometry::area(c) / std::numbers::pi);
  CuspProbe out;
  for (std::size_t i = 0; i < n; ++i) {
    const Point e0 = v[i] - v[(i + n - 1) % n];
    const Point e1 = v[(i + 1) % n] - v[i];
    const double k = std::abs(std::arg(e1 / e0)) / (0.5 * (std::abs(e0) + std::abs(e1)));
    if (k * scale > out.metric) {
      out.metric = k * scale;
      out.location = v[i];
    }
  }
  return out;
}

Point closest_midpoint(const geometry::BoundaryCurve& a, const geometry::BoundaryCurve& b) {
  double best = std::numeric_limits<double>::infinity();
  Point mid;
  for (const Point p : a.vertices)
    for (const Point q : b.vertices)
      if (std::norm(p - q) < best) {
        best = std::norm(p - q);
        mid = 0.5 * (p + q);
      }
  return mid;
}

Trajectory integrate(const BubbleSystem& initial, bool regulated, double q, double t_end, const Strategy* strategy,
                     const std::vector<Point>& probes, const Numerics& numerics) {
  numerics.validate();
  if (initial.bubbles.empty()) throw validation_error("initial system has no bubbles");
  for (const auto& b : initial.bubbles) geometry::require_valid(b.boundary);
  for (std::size_t a = 0; a < initial.bubbles.size(); ++a)
    for (std::size_t b = a + 1; b < initial.bubbles.size(); ++b)
      if (geometry::curve_separation(initial.bubbles[a].boundary.vertices, initial.bubbles[b].boundary.vertices) <= 0.0)
        throw validation_error("initial bubbles are not disjoint");

  Trajectory traj;
  traj.initial = initial;
  traj.probes = probes;
  traj.initial_area = initial.total_area();
  traj.h = numerics.h_factor * std::sqrt(traj.initial_area);
  const double h = traj.h;
  const double vanish_area = std::pow(numerics.vanish_factor * h, 2);
  const double clearance = numerics.clearance_factor * h;
  const double horizon = regulated ? strategy->end_time() : t_end;
  const double time_eps = 1e-12 * std::max(1.0, horizon);
  traj.t_star = regulated ? strategy->end_time() : traj.initial_area / q;

  BubbleSystem state = resample_system(initial, h, numerics);
  state.time = 0.0;
  double t = 0.0;
  double rcond0 = -1.0;
  std::map<int, bool> cusp_armed;

  auto flux_at = [&](double time) {
    if (!regulated) return FluxSpec::free_flux(q);
    const auto [q1, q2] = strategy->rates_at(time);
    return FluxSpec::regulated(q1, q2);
  };

  for (int steps = 0;; ++steps) {
    if (state.bubbles.empty()) {
      traj.termination = Termination::all_vanished;
      break;
    }
    if (steps > numerics.max_steps) throw solver_error("step budget exhausted");
    const FluxSpec flux = flux_at(t);
    const FieldSolution field = solve_field(state, flux, numerics);
    if (rcond0 < 0.0) rcond0 = field.rcond;

    traj.snapshots.push_back(state);
    traj.fluxes.push_back(field.fluxes);
    traj.constants.push_back(field.constants);
    traj.rcond.push_back(field.rcond);
    for (std::size_t k = 0; k < probes.size(); ++k)
      traj.probe_log.push_back({t, static_cast<int>(k), field.phi(probes[k])});

    // Cusp detection on the current state.
    const bool rcond_signal = field.rcond < rcond0 / numerics.cusp_rcond_drop;
    for (const auto& b : state.bubbles) {
      const CuspProbe peak = scaled_curvature_peak(b.boundary);
      const bool fired = peak.metric > numerics.cusp_curvature || rcond_signal;
      bool& armed = cusp_armed.try_emplace(b.label, true).first->second;
      if (fired && armed) {
        Event e;
        e.kind = Event::Kind::cusp;
        e.time = t;
        e.extrapolated_time = t;
        e.location = peak.location;
        e.labels = {b.label};
        e.metric = peak.metric;
        traj.events.push_back(e);
        if (regulated) {
          traj.termination = Termination::cusp;
          traj.termination_label = b.label;
          traj.termination_location = peak.location;
          traj.total_time = t;
          return traj;
        }
        armed = false;
      } else if (!fired) {
        armed = true;
      }
    }

    if (t >= horizon - time_eps) {
      traj.termination = regulated ? Termination::strategy_exhausted : Termination::end_time;
      break;
    }

    double vmax = 0.0;
    for (const auto& v : field.velocity)
      for (double x : v) vmax = std::max(vmax, std::abs(x));
    double dt = vmax > 0.0 ? numerics.dt_factor * min_spacing(state) / vmax : horizon - t;
    dt = std::min(dt, horizon - t);
    if (regulated) {
      auto it = std::upper_bound(strategy->breakpoints.begin(), strategy->breakpoints.end(), t + time_eps);
      if (it != strategy->breakpoints.end()) dt = std::min(dt, *it - t);
    }

    BubbleSystem next;
    for (int attempt = 0;; ++attempt) {
      if (dt < 1e-14 * std::max(1.0, horizon)) throw solver_error("step size underflow");
      try {
        next = midpoint(state, field, flux, dt, numerics);
        break;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::geometry || attempt > 30) throw;
        dt *= 0.5;
      }
    }
    t += dt;
    traj.extracted += flux.q_total * dt;
    next = resample_system(next, h, numerics);
    next.time = t;

    // Disappearance.
    std::vector<int> vanished;
    std::vector<geometry::Bubble> kept;
    for (std::size_t b = 0; b < next.bubbles.size(); ++b) {
      const auto& bubble = next.bubbles[b];
      const double a = geometry::area(bubble.boundary);
      if (a < vanish_area) {
        Event e;
        e.kind = Event::Kind::disappearance;
        e.time = t;
        const double qb = b < field.fluxes.size() ? field.fluxes[b] : 0.0;
        e.extrapolated_time = qb > 0.0 ? t + a / qb : t;
        e.location = geometry::centroid(bubble.boundary.vertices);
        e.labels = {bubble.label};
        e.metric = a;
        traj.events.push_back(e);
        traj.removed_area += a;
        vanished.push_back(bubble.label);
      } else {
        kept.push_back(bubble);
      }
    }
    next.bubbles = std::move(kept);

    if (regulated && !vanished.empty()) {
      bool complete = next.bubbles.empty();
      if (!complete && geometry::area(next.bubbles.front().boundary) < 2.0 * vanish_area) {
        const auto& other = next.bubbles.front();
        Event e;
        e.kind = Event::Kind::disappearance;
        e.time = t;
        e.extrapolated_time = t;
        e.location = geometry::centroid(other.boundary.vertices);
        e.labels = {other.label};
        e.metric = geometry::area(other.boundary);
        traj.events.push_back(e);
        traj.removed_area += e.metric;
        next.bubbles.clear();
        complete = true;
      }
      traj.snapshots.push_back(next);
      traj.fluxes.push_back(std::vector<double>(next.bubbles.size(), 0.0));
      traj.constants.push_back(std::vector<double>(next.bubbles.size(), 0.0));
      traj.rcond.push_back(traj.rcond.back());
      traj.termination = complete ? Termination::completed : Termination::bubble_vanished;
      traj.termination_label = vanished.front();
      traj.total_time = t;
      return traj;
    }

    // Breakup; several well-separated simultaneous pinches are cut one at a
    // time, closest first.
    std::vector<geometry::Bubble> pieces_out;
    int label = std::max(next.next_label(), state.next_label());
    for (const auto& e : traj.events)
      for (int l : e.labels) label = std::max(label, l + 1);
    std::vector<geometry::Bubble> work(next.bubbles.rbegin(), next.bubbles.rend());
    while (!work.empty()) {
      geometry::Bubble bubble = std::move(work.back());
      work.pop_back();
      // Bubbles only a few clearances across are below surgery resolution.
      const bool resolvable = geometry::perimeter(bubble.boundary.vertices) >= 20.0 * clearance;
      std::vector<geometry::BoundaryCurve> pieces;
      if (resolvable) pieces = geometry::split_on_pinch(bubble.boundary, clearance, geometry::PinchMode::closest_first);
      if (pieces.size() < 2) {
        pieces_out.push_back(std::move(bubble));
        continue;
      }
      if (regulated) throw geometry_error("pinch in regulated mode: regulated runs may not create bubbles");
      Event e;
      e.kind = Event::Kind::breakup;
      e.time = t;
      e.extrapolated_time = t;
      e.location = closest_midpoint(pieces[0], pieces[1]);
      e.labels = {bubble.label};
      std::vector<Event> vanish;
      std::vector<geometry::Bubble> fresh;
      for (auto& piece : pieces) {
        geometry::Bubble nb;
        nb.label = label++;
        nb.boundary = geometry::oriented_ccw(std::move(piece));
        e.labels.push_back(nb.label);
        const double a = geometry::area(nb.boundary);
        if (a < vanish_area) {
          Event d;
          d.kind = Event::Kind::disappearance;
          d.time = t;
          d.extrapolated_time = t;
          d.location = geometry::centroid(nb.boundary.vertices);
          d.labels = {nb.label};
          d.metric = a;
          traj.removed_area += a;
          vanish.push_back(d);
        } else {
          fresh.push_back(std::move(nb));
        }
      }
      traj.events.push_back(e);
      traj.events.insert(traj.events.end(), vanish.begin(), vanish.end());
      for (auto it = fresh.rbegin(); it != fresh.rend(); ++it) work.push_back(std::move(*it));
    }
    next.bubbles = std::move(pieces_out);
    next = resample_system(next, h, numerics);
    next.time = t;

    if (static_cast<int>(traj.events.size()) > numerics.max_events)
      throw solver_error("event cap exceeded; the weak solution has too many transformations");
    state = std::move(next);
  }
  traj.total_time = t;
  return traj;
}

}  // namespace

Trajectory run_free(const BubbleSystem& initial, double q, double t_end, const std::vector<Point>& probes,
                    const Numerics& numerics) {
  if (!(q > 0.0) || !std::isfinite(q)) throw validation_error("free run needs q > 0");
  if (!(t_end > 0.0)) throw validation_error("free run needs t_end > 0");
  const double t_star = initial.total_area() / q;
  if (t_end > t_star * (1.0 + 1e-9) && std::isfinite(t_end))
    throw validation_error("t_end exceeds the complete-extraction time S/q");
  return integrate(initial, false, q, std::min(t_end, t_star * 1.5), nullptr, probes, numerics);
}

Trajectory run_regulated(const BubbleSystem& initial, const Strategy& strategy, const std::vector<Point>& probes,
                         const Numerics& numerics) {
  strategy.validate(initial);
  return integrate(initial, true, 0.0, 0.0, &strategy, probes, numerics);
}

}  // namespace hsb::evolution
