#pragma once

// Closed-curve primitives for bubble boundaries.
//
// Curves are closed polylines stored without repeating the first vertex.
// Points are complex numbers x + iy; all lengths are dimensionless.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace hsb::geometry {

using Point = std::complex<double>;

struct BoundaryCurve {
  std::vector<Point> vertices;
  // Set for curves that are allowed to touch themselves (e.g. a slit).
  bool degenerate = false;

  std::size_t size() const { return vertices.size(); }
  const Point& operator[](std::size_t i) const { return vertices[i]; }
};

struct Bubble {
  int label = 0;
  BoundaryCurve boundary;
};

struct BubbleSystem {
  std::vector<Bubble> bubbles;
  double time = 0.0;

  int next_label() const;
  double total_area() const;
  // Mean edge length over all boundaries.
  double marker_spacing() const;
  const Bubble* find(int label) const;
};

struct Box {
  Point lo;
  Point hi;
};

// Result of structural validation. `ok()` is the BoundaryCurve invariant.
struct CurveDiagnostics {
  bool enough_vertices = true;
  bool distinct_vertices = true;
  bool simple = true;
  bool counterclockwise = true;

  bool ok() const { return enough_vertices && distinct_vertices && simple && counterclockwise; }
};

inline constexpr std::size_t kMinCurveVertices = 8;

CurveDiagnostics validate(const BoundaryCurve& curve);
// Throws hsb::Error(geometry) describing the first violated invariant.
void require_valid(const BoundaryCurve& curve);

// Shoelace area; negative for clockwise curves. Throws with fewer than 3 vertices.
double signed_area(std::span<const Point> vertices);
double area(const BoundaryCurve& curve);
double perimeter(std::span<const Point> vertices);
Point centroid(std::span<const Point> vertices);
Box bounding_box(std::span<const Point> vertices);
Box bounding_box(const BubbleSystem& system);

// Central second moments (1/A) * integral of [x^2, xy; xy, y^2] over the enclosed region.
Eigen::Matrix2d second_moments(std::span<const Point> vertices);

struct EllipseFit {
  Point center;
  double major = 0.0;       // semi-axis
  double minor = 0.0;       // semi-axis
  double major_angle = 0.0; // radians, direction of the major axis in (-pi/2, pi/2]
};
// Ellipse with the same area centroid and second moments.
EllipseFit fit_ellipse(std::span<const Point> vertices);

BoundaryCurve reversed(const BoundaryCurve& curve);
bool is_counterclockwise(const BoundaryCurve& curve);
BoundaryCurve oriented_ccw(BoundaryCurve curve);

bool is_simple(std::span<const Point> vertices);
// Winding-number membership for a closed polyline.
bool contains(std::span<const Point> vertices, Point p);
double distance_to_segment(Point p, Point a, Point b);
double distance_to_polyline(std::span<const Point> vertices, Point p);
double distance_to_boundaries(const BubbleSystem& system, Point p);
// Index of the bubble containing p, or -1.
int bubble_containing(const BubbleSystem& system, Point p);
// Smallest distance between two closed polylines.
double curve_separation(std::span<const Point> a, std::span<const Point> b);

std::vector<Point> convex_hull(std::span<const Point> points);
// Rotating calipers on the convex hull.
double diameter(std::span<const Point> points);

// Arc-length resampling through a periodic cubic spline. The enclosed area of
// the input is restored by a uniform normal offset.
BoundaryCurve resample(const BoundaryCurve& curve, double spacing);
BoundaryCurve resample_count(const BoundaryCurve& curve, std::size_t count);

// Cuts a single pinch (two non-adjacent arcs closer than `clearance`) into two
// curves; returns the input unchanged when there is no pinch. Throws
// hsb::Error(geometry) when more than one pinch is present.
enum class PinchMode {
  strict,         // several separate pinches are an error
  closest_first,  // cut only the closest of several well-separated pinches
};
std::vector<BoundaryCurve> split_on_pinch(const BoundaryCurve& curve, double clearance,
                                          PinchMode mode = PinchMode::strict);

// Size measure fixed to 2 by the renormalizations: the Euclidean diameter or
// the extent of the projection onto the x-axis (the axis of the limit curves).
enum class Extent { diameter, x_width };

// z -> z + i*alpha*z^n, then x -> c*x, y -> c^(2n-1)*y with c chosen so the
// image has x-extent 2 (equal to the diameter whenever the limit curve is
// longest along its axis).
BoundaryCurve normalize_for_asymptotics(const BoundaryCurve& curve, int n, double alpha);
// Same with an explicit power for the y scaling (x -> c x, y -> c^y_power y).
// Returns the scale factor c through `scale` when non-null.
BoundaryCurve renormalize(const BoundaryCurve& curve, double y_power, double* scale = nullptr,
                          Extent extent = Extent::diameter);

struct CuspEstimate {
  double exponent = 0.0;   // p in |y| ~ C |x|^p in the local frame
  double prefactor = 0.0;  // C
  bool is_cusp = false;
  bool codirectional = false;  // both branches leave the tip on the same side
  double curvature_metric = 0.0;
  Point axis;              // unit vector along the local x axis
  std::size_t tip_index = 0;
};

struct CuspOptions {
  double window_lo = 0.05;
  double window_hi = 0.20;
  double smoothness_threshold = 10.0;
  // Maximum distance between `point` and the curve, in mean edge lengths.
  double on_curve_tolerance = 2.0;
};

CuspEstimate cusp_exponent(const BoundaryCurve& curve, Point point, const CuspOptions& options = {});
// Open polyline variant (window limited by the available arc on each side).
CuspEstimate cusp_exponent_open(std::span<const Point> arc, Point point, const CuspOptions& options = {});

// Symmetric Hausdorff distance between densified polylines.
double hausdorff_distance(const BoundaryCurve& a, const BoundaryCurve& b);
double hausdorff_distance(const BubbleSystem& a, const BubbleSystem& b);

// Largest |kappa| * sqrt(area/pi) over the vertices, with kappa from the
// discrete turning angle.
double max_scaled_curvature(const BoundaryCurve& curve);

// Builders. `area_exact` scales a regular polygon so its area equals pi r^2.
BoundaryCurve make_circle(Point center, double radius, std::size_t count, bool area_exact = false);
BoundaryCurve make_ellipse(Point center, double a, double b, std::size_t count, double angle = 0.0);
// Closed trace of {|x| < half_width, y^2 < f(x)} through x = w cos(theta).
BoundaryCurve make_profile_domain(const std::function<double(double)>& f, double half_width, std::size_t count);
BoundaryCurve make_parametric(const std::function<Point(double)>& z, std::size_t count);

BubbleSystem make_system(std::vector<BoundaryCurve> curves, double time = 0.0);

}  // namespace hsb::geometry
