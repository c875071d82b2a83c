#pragma once

// Post-processing and searches built on the potential, conformal and
// evolution modules: contraction points, partial contraction of two disks,
// accessibility regions, synchronizing strategies, asymptotic fits and
// family sweeps.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hsb/conformal.hpp"
#include "hsb/evolution.hpp"
#include "hsb/geometry.hpp"
#include "hsb/potential.hpp"

namespace hsb::analysis {

using evolution::Numerics;
using evolution::Strategy;
using evolution::Trajectory;
using geometry::BoundaryCurve;
using geometry::BubbleSystem;
using geometry::Point;

// ---------------------------------------------------------------------------
// Contraction points

enum class ContractionKind { complete, partial };
std::string to_string(ContractionKind kind);

struct ContractionPoint {
  Point location;          // disappearance centroid
  Point refined;           // Newton-refined minimum of the accumulated potential
  double time = 0.0;
  double extrapolated_time = 0.0;
  ContractionKind kind = ContractionKind::complete;
  int label = -1;
  double gradient_norm = 0.0;  // |grad| of Pi_{B(0)} - Pi_{B(t)} at `location`
  double value_gap = 0.0;      // value at `refined` minus the interior constant
  bool inside_initial = true;  // refined point lies in B(0)
  bool verified = false;       // refined within 3h and a global minimum
};

// Disappearance events of a run that reached t* or lost all bubbles, each
// cross-checked against Pi_{B(0)} - Pi_{B(t)}.
std::vector<ContractionPoint> contraction_points(const Trajectory& trajectory);

// Accumulated potential Pi_{B(0)} - Pi_{B(t)} as a field for the critical
// point machinery.
potential::GradientField accumulated_potential(const BubbleSystem& initial, const BubbleSystem& current);

// ---------------------------------------------------------------------------
// Two-disk partial contraction

struct PartialContraction {
  Point z0;
  double tau = 0.0;             // physical time at which the small disk vanishes
  conformal::KufarevMap map;    // exterior map of the surviving bubble at tau
  double residual = 0.0;        // |value(z0) - interior value| at the root
  double gradient_norm = 0.0;   // |grad| at z0
};

// Disks |z| < R and |z - a| < r contracting freely at rate q.
PartialContraction kufarev_partial(double a, double R, double r, double q);
// Time argument of kufarev_solve for physical time t (the map's area is
// pi (R^2 + 2 r^2) - q t_map, mass balance gives pi (R^2 + r^2) - q t).
double kufarev_map_time(double r, double q, double t);

// ---------------------------------------------------------------------------
// Conformal normalization of a surviving bubble

// b = exp(2 pi Phi(P2) / q) for the single-bubble free field.
double greens_ratio(const BoundaryCurve& domain, Point p2, const Numerics& numerics = {});

struct GreensData {
  double b = 0.0;           // |zeta(P2)|
  double derivative = 0.0;  // |zeta'(P2)|
};
// b together with the derivative of the exterior map at P2.
GreensData greens_data(const BoundaryCurve& domain, Point p2, const Numerics& numerics = {});

// ---------------------------------------------------------------------------
// Fits

struct FitReport {
  std::string model;
  std::vector<std::pair<std::string, double>> parameters;
  std::vector<double> abscissa;   // time, tau or family parameter per entry
  std::vector<double> residuals;  // per-snapshot misfit
  double tolerance = 0.0;
  bool pass = false;
  std::string note;

  double parameter(const std::string& name) const;  // NaN when absent
};

// Q(tau) log(tau) / (2 n q log b) and A(tau) log(tau) / (2 n q tau log b) over
// the last resolvable decade of tau before the disappearance of `label`.
// Residuals are |ratio_Q - 1|; parameters include the companion ratios with
// log A in place of log tau and Q against the next-order law
// Q = q log b / (log(r_A |zeta'(P2)| / (1 - b^2))), r_A = sqrt(A / pi).
FitReport fit_logslow(const Trajectory& trajectory, int label, int n, double tolerance = 0.15);

// Theorem-level ellipse law: rescaled to diameter 2, the last `count`
// snapshots of the bubble contracting at `point` are compared with the axes
// predicted by `hessian`.
FitReport fit_ellipse_asymptotics(const Trajectory& trajectory, Point point, const Eigen::Matrix2d& hessian,
                                  std::size_t count = 10);

enum class LimitModel { symmetric, saddle_node };

// Sup-distance (256 points) between renormalized curves and the limit curve.
// Curves must be expressed in a frame centred on the contraction point with
// the degeneracy axis along x.
FitReport fit_limit_curve(const std::vector<BoundaryCurve>& curves, const std::vector<double>& abscissa, int n,
                          double beta, double alpha, LimitModel model = LimitModel::symmetric, double tolerance = 0.05);
// Trajectory variant: snapshots of `label` shifted by -point and rotated by
// -angle.
FitReport fit_limit_curve(const Trajectory& trajectory, int label, Point point, double angle, int n, double beta,
                          double alpha, LimitModel model = LimitModel::symmetric, std::size_t count = 10);

// ---------------------------------------------------------------------------
// Phase rectangle

enum class CellStatus { accessible, inaccessible, boundary, unknown };
std::string to_string(CellStatus s);

struct RayProbe {
  double angle = 0.0;     // extraction direction (cos, sin) in (dQ1, dQ2)
  double reach = 0.0;     // extracted volume along the ray before failure
  double length = 0.0;    // distance to the rectangle edge along the ray
  bool complete = false;  // reached the edge
  bool failed = false;    // solver error
  std::string termination;
};

struct RegionMap {
  int grid_n = 0;
  double S1 = 0.0, S2 = 0.0;
  std::vector<CellStatus> cells;                 // row-major, cells[j * grid_n + i]
  std::vector<std::optional<Strategy>> witness;  // per accessible cell
  std::vector<Point> free_path;                  // (X, Y) along the free run
  std::vector<RayProbe> rays;
  bool origin_accessible = false;

  CellStatus at(int i, int j) const { return cells[static_cast<std::size_t>(j * grid_n + i)]; }
  Point center(int i, int j) const;  // (X, Y) of a cell
};

// Probes about 2*grid_n proportional extraction rays with regulated runs at
// `numerics` (coarse spacing recommended) and classifies cells from the rays'
// reach. `progress` is called once per finished ray.
RegionMap accessibility_region(const BubbleSystem& initial, int grid_n, const Numerics& numerics = {},
                               const std::function<void(int, int)>& progress = {});

// Strategy with the rates of a free run, piecewise constant between snapshots.
Strategy strategy_from_free_run(const Trajectory& trajectory);

struct SyncEndpoint {
  int label = -1;
  Point location;
  Point refined;
  double gradient_norm = 0.0;  // |grad Pi_{B(0)}| at `location`
  potential::CriticalPoint classification;
  bool inside_initial = true;
};

struct SyncReport {
  std::optional<Strategy> strategy;
  bool free_synchronizes = false;
  double crossing = -1.0;       // anti-diagonal parameter u of the found path
  double time_gap = 0.0;        // |t1 - t2| between the two disappearances
  std::vector<SyncEndpoint> endpoints;
  bool gradient_check = false;  // both endpoints |grad| < 1e-3 sqrt(S)
  bool minima_check = false;    // both refined endpoints positive definite
  std::string note;
};

SyncReport find_synchronizing(const BubbleSystem& initial, const Numerics& numerics = {}, int max_bisections = 12);

// ---------------------------------------------------------------------------
// Rupture boundary

struct SweepSample {
  double s = 0.0;
  bool breaks = false;
  bool criterion_breaks = false;  // sufficient quadrature criterion
  double breakup_time = 0.0;
};

struct CuspEvidence {
  bool found = false;
  double time = 0.0;
  double exponent = 0.0;
  double metric = 0.0;
  Point location;
  int relax_steps = -1;  // steps until the metric falls below threshold again
};

struct FamilySweepReport {
  std::vector<SweepSample> samples;
  std::optional<double> sigma;
  double bracket_lo = 0.0, bracket_hi = 0.0;
  bool monotone = true;
  bool sufficiency_holds = true;
  CuspEvidence cusp;
  std::string note;
};

// One-parameter family of initial domains; `criterion` (optional) is a
// sufficient breakup test evaluated without simulation.
struct Family {
  std::function<BubbleSystem(double)> make;
  std::function<bool(double)> criterion;
};

// Domain y^2 < (c + x^2)(1 - x^2).
BubbleSystem dumbbell(double c, std::size_t count = 400);
// Dumbbell family with the quadrature breakup criterion attached.
Family dumbbell_family(std::size_t count = 400);
// Free run of one member; `breaks` requires a breakup whose pieces outlive
// the vanish threshold (tails cut off at resolution do not count).
SweepSample classify_member(const Family& family, double s, const Numerics& numerics);

FamilySweepReport rupture_boundary_sweep(const Family& family, double s_lo, double s_hi, int samples,
                                         const Numerics& numerics = {}, double tolerance = 1e-3,
                                         const Numerics* refined = nullptr);

// ---------------------------------------------------------------------------
// Commutativity

// Extract (dQ1, dQ2) in both orders and return the Hausdorff distance between
// the results.
double path_independence_check(const BubbleSystem& initial, double dq1, double dq2, const Numerics& numerics = {});

}  // namespace hsb::analysis
