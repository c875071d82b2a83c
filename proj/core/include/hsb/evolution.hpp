#pragma once

// Exterior Laplace field, boundary advancement and weak-solution event
// handling for free and regulated suction.

#include <string>
#include <utility>
#include <vector>

#include "hsb/geometry.hpp"

namespace hsb::evolution {

using geometry::BubbleSystem;
using geometry::Point;

struct FluxSpec {
  enum class Mode { free, regulated } mode = Mode::free;
  double q_total = 1.0;   // free mode
  double q1 = 0.0;        // regulated mode, bubble index 0
  double q2 = 0.0;        // regulated mode, bubble index 1

  static FluxSpec free_flux(double q);
  static FluxSpec regulated(double q1, double q2);
  void validate(std::size_t bubble_count) const;
};

// Piecewise-constant extraction schedule: rates[i] applies on
// [breakpoints[i], breakpoints[i + 1]).
struct Strategy {
  std::vector<double> breakpoints;
  std::vector<std::pair<double, double>> rates;

  static Strategy constant(double q1, double q2, double duration);
  // Sequential extraction of the given volumes at unit total rate.
  static Strategy from_volumes(const std::vector<std::pair<double, double>>& volumes, double rate = 1.0);
  std::pair<double, double> rates_at(double t) const;
  std::pair<double, double> volumes() const;
  double end_time() const;
  void validate(const BubbleSystem& initial) const;
};

// Numerical parameters; all lengths scale with h = h_factor * sqrt(S0).
struct Numerics {
  double h_factor = 0.01;
  double dt_factor = 0.2;
  double vanish_factor = 3.0;      // remove a bubble when area < (vanish_factor h)^2
  double clearance_factor = 2.0;   // pinch clearance in units of h
  double cusp_curvature = 50.0;    // max |kappa| sqrt(A / pi)
  double cusp_rcond_drop = 1e3;
  int max_events = 64;
  int max_steps = 200000;
  std::size_t min_nodes = 32;
  double filter_level = 1e-13;     // Fourier filter relative to the largest mode
  double min_rcond = 1e-14;
  // Flux constraint weights: polygon-area consistent (true) or spectral
  // trapezoid (false, exact for smooth static fields).
  bool polygon_flux = true;

  void validate() const;
};

struct FieldSolution {
  // Per bubble (same order as the system): nodes, outward unit normals,
  // trapezoid weights and the outward normal velocity dPhi/dn.
  std::vector<std::vector<Point>> nodes;
  std::vector<std::vector<Point>> normals;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> velocity;
  std::vector<std::vector<double>> curvature;
  std::vector<double> constants;   // Phi_i on each boundary
  std::vector<double> fluxes;      // extraction rate q_i of each bubble (>= 0 when shrinking)
  double far_constant = 0.0;       // Phi = S[sigma] + far_constant
  double rcond = 1.0;

  // Phi at a point in the fluid (trapezoid single layer) or the boundary
  // constant when the point lies inside a bubble.
  double phi(Point p) const;
};

FieldSolution solve_field(const BubbleSystem& system, const FluxSpec& flux, const Numerics& numerics = {});

// One explicit midpoint step followed by per-bubble resampling at spacing h.
BubbleSystem step(const BubbleSystem& system, const FluxSpec& flux, double dt, double h, const Numerics& numerics = {});
// Resamples every bubble to max(min_nodes, L / h) nodes (even count).
BubbleSystem resample_system(const BubbleSystem& system, double h, const Numerics& numerics = {});

struct Event {
  enum class Kind { breakup, disappearance, cusp } kind = Kind::disappearance;
  double time = 0.0;
  // Disappearance: time at which the removed area would be exhausted at the
  // last computed flux.
  double extrapolated_time = 0.0;
  Point location;
  std::vector<int> labels;
  double metric = 0.0;  // cusp: scaled curvature; disappearance: removed area
};
std::string to_string(Event::Kind kind);

struct ProbeSample {
  double t = 0.0;
  int probe = 0;
  double phi = 0.0;
};

enum class Termination { end_time, all_vanished, completed, bubble_vanished, cusp, strategy_exhausted };
std::string to_string(Termination t);

struct Trajectory {
  BubbleSystem initial;                 // input system, before resampling
  std::vector<BubbleSystem> snapshots;  // resampled states, time-ordered
  std::vector<std::vector<double>> fluxes;     // per snapshot, per bubble (field before the step)
  std::vector<std::vector<double>> constants;  // per snapshot, per bubble
  std::vector<double> rcond;
  std::vector<Event> events;
  std::vector<Point> probes;
  std::vector<ProbeSample> probe_log;
  double h = 0.0;
  double initial_area = 0.0;
  double removed_area = 0.0;   // area discarded by disappearance events
  double extracted = 0.0;      // integral of the total extraction rate
  double total_time = 0.0;
  double t_star = 0.0;
  Termination termination = Termination::end_time;
  int termination_label = -1;
  Point termination_location;
};

Trajectory run_free(const BubbleSystem& initial, double q, double t_end, const std::vector<Point>& probes = {},
                    const Numerics& numerics = {});
Trajectory run_regulated(const BubbleSystem& initial, const Strategy& strategy, const std::vector<Point>& probes = {},
                         const Numerics& numerics = {});

}  // namespace hsb::evolution
