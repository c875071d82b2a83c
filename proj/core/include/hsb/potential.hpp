#pragma once

// Gravity (logarithmic) potential of polygonal bubble systems:
//   Pi_B(p) = (1/2pi) * integral over B of log|z - p| dA(z).
// Value, gradient and Hessian are reduced to closed-form edge integrals.

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hsb/geometry.hpp"

namespace hsb::potential {

using geometry::Point;

struct PotentialProbe {
  Point point;
  double value = 0.0;
  Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
  Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
};

// Minimum distance to any boundary, in marker spacings, below which
// evaluation is refused.
inline constexpr double kNearBoundaryFactor = 0.1;

// Additive over bubbles. Throws hsb::Error(geometry) when the point is within
// kNearBoundaryFactor * marker_spacing of a boundary.
PotentialProbe eval_potential(const geometry::BubbleSystem& system, Point p);
// Single closed polyline (counterclockwise), no proximity check.
PotentialProbe eval_polygon(std::span<const Point> vertices, Point p);
// Sum over curves with the proximity check against `min_distance`.
PotentialProbe eval_curves(const std::vector<std::span<const Point>>& curves, Point p, double min_distance);
// Pi_{outer} - Pi_{inner}, e.g. the potential of B(0) \ B(t).
PotentialProbe eval_difference(const geometry::BubbleSystem& outer, const geometry::BubbleSystem& inner, Point p);

// Closed forms.
PotentialProbe disk_potential(Point center, double radius, Point p);
// Ellipse with semi-axes a (along x) and b (along y) centered at the origin;
// value is reported as 0 (the additive constant is left unspecified).
PotentialProbe ellipse_potential(double a, double b, Point p);

// h = conj(z) - 4 d/dz Pi with d/dz Pi = (Pi_x - i Pi_y) / 2.
std::complex<double> cauchy_transform(const geometry::BubbleSystem& system, Point z);
std::complex<double> cauchy_from_gradient(Point z, const Eigen::Vector2d& gradient);

enum class CriticalKind { minimum, saddle, maximum, degenerate };
std::string to_string(CriticalKind kind);

struct CriticalPoint {
  Point location;
  CriticalKind kind = CriticalKind::minimum;
  int degree = 1;             // n of the local model y^2/2 + (beta/2n) x^(2n)
  bool saddle_node = false;   // cubic kernel term (y^2/2 + beta x^3/3)
  Eigen::Vector2d eigenvalues = Eigen::Vector2d::Zero();  // ascending
  Eigen::Matrix2d axes = Eigen::Matrix2d::Identity();     // columns match eigenvalues
  bool is_global_min = false;
  double beta = 0.0;
  double value = 0.0;
  double gradient_norm = 0.0;
};

struct SeedFailure {
  Point seed;
  std::string reason;
};

struct CriticalSearchOptions {
  int grid = 32;
  double gradient_tolerance = 1e-10;
  double degeneracy_threshold = 1e-3;
  int max_iterations = 100;
  // Extra seeds (e.g. expected locations).
  std::vector<Point> extra_seeds;
};

struct CriticalSearch {
  std::vector<CriticalPoint> points;
  std::vector<SeedFailure> failures;
};

using GradientField = std::function<PotentialProbe(Point)>;

// Multistart damped Newton on grad Pi over the box plus bubble centroids.
CriticalSearch find_critical_points(const geometry::BubbleSystem& system, const geometry::Box& box,
                                    const CriticalSearchOptions& options = {});
// Same machinery for an arbitrary probe function (e.g. a potential difference).
// `length_scale` sets the deduplication radius and the degenerate-fit window.
CriticalSearch find_critical_points(const GradientField& field, const std::vector<Point>& seeds,
                                    double length_scale, const CriticalSearchOptions& options = {});
// Single Newton solve from a seed; nullopt on non-convergence.
std::optional<CriticalPoint> refine_critical_point(const GradientField& field, Point seed, double length_scale,
                                                   const CriticalSearchOptions& options = {},
                                                   std::string* failure = nullptr);
// Classification at a known critical point (eigen-decomposition and, when
// degenerate, the kernel-direction polynomial fit).
CriticalPoint classify(const GradientField& field, Point location, double length_scale,
                       const CriticalSearchOptions& options = {});

enum class BreakupVerdict { breaks, no_conclusion };
std::string to_string(BreakupVerdict verdict);

struct BreakupIntegral {
  double value = 0.0;
  BreakupVerdict verdict = BreakupVerdict::no_conclusion;
  double error_estimate = 0.0;
};

// I = integral_0^b d(x sqrt(f)) / (x^2 + f), Stieltjes form on a graded
// mesh with Richardson refinement; "breaks" iff I > pi/2.
BreakupIntegral breakup_integral(const std::function<double(double)>& f, double b);
// Samples (x_k, f(x_k)) with 0 = x_0 < ... < x_m = b.
BreakupIntegral breakup_integral(std::span<const double> x, std::span<const double> f);

// Number of local extrema of x -> Pi(x, 0) for a system symmetric about the x axis.
int axis_extrema_count(const geometry::BubbleSystem& system, double gradient_tolerance = 1e-10);

struct Symmetry {
  enum class Kind { none, central, axial } kind = Kind::none;
  Point center;           // central: symmetry point; axial: a point on the line
  Point direction{1, 0};  // axial: line direction
};

BreakupVerdict predict_breakup(const geometry::BubbleSystem& system, const Symmetry& symmetry);

// Reflection/rotation helpers used by the symmetry checks.
geometry::BubbleSystem transformed(const geometry::BubbleSystem& system, const std::function<Point(Point)>& map,
                                   bool reverses_orientation);

}  // namespace hsb::potential
