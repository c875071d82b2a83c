#include "hsb/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "hsb/error.hpp"
#include "spline.hpp"

namespace hsb::geometry {

namespace {

double cross(Point a, Point b) { return a.real() * b.imag() - a.imag() * b.real(); }
double dot(Point a, Point b) { return a.real() * b.real() + a.imag() * b.imag(); }

std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(((i % m) + m) % m);
}

// Outward normal at vertex i of a counterclockwise polyline.
Point vertex_normal(std::span<const Point> v, std::size_t i) {
  const std::size_t n = v.size();
  const Point t = v[(i + 1) % n] - v[(i + n - 1) % n];
  const double len = std::abs(t);
  if (len == 0.0) return Point(0.0);
  return Point(t.imag(), -t.real()) / len;
}

std::vector<double> cumulative_arc(std::span<const Point> v, bool closed) {
  std::vector<double> s(v.size() + (closed ? 1 : 0), 0.0);
  for (std::size_t i = 1; i < s.size(); ++i) s[i] = s[i - 1] + std::abs(v[i % v.size()] - v[i - 1]);
  return s;
}

int orientation(Point a, Point b, Point c) {
  const double o = cross(b - a, c - a);
  const double scale = std::max({std::norm(b - a), std::norm(c - a), 1e-300});
  if (std::abs(o) <= 1e-14 * scale) return 0;
  return o > 0 ? 1 : -1;
}

bool on_segment(Point a, Point b, Point p) {
  return std::min(a.real(), b.real()) <= p.real() && p.real() <= std::max(a.real(), b.real()) &&
         std::min(a.imag(), b.imag()) <= p.imag() && p.imag() <= std::max(a.imag(), b.imag());
}

bool segments_intersect(Point a, Point b, Point c, Point d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

double segment_distance(Point a, Point b, Point c, Point d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min({distance_to_segment(a, c, d), distance_to_segment(b, c, d), distance_to_segment(c, a, b),
                   distance_to_segment(d, a, b)});
}

std::vector<Point> densify(std::span<const Point> v, double max_len) {
  std::vector<Point> out;
  const std::size_t n = v.size();
  out.reserve(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = v[i];
    const Point b = v[(i + 1) % n];
    const int k = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / max_len)));
    for (int j = 0; j < k; ++j) out.push_back(a + (b - a) * (static_cast<double>(j) / k));
  }
  return out;
}

double directed_hausdorff(const std::vector<std::vector<Point>>& from, const std::vector<std::vector<Point>>& to,
                          double max_len) {
  double worst = 0.0;
  for (const auto& curve : from) {
    for (const Point p : densify(curve, max_len)) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& other : to) {
        best = std::min(best, distance_to_polyline(other, p));
        if (best <= worst) break;
      }
      worst = std::max(worst, best);
    }
  }
  return worst;
}

double hausdorff_sets(const std::vector<std::vector<Point>>& a, const std::vector<std::vector<Point>>& b) {
  double spacing = std::numeric_limits<double>::infinity();
  for (const auto* set : {&a, &b}) {
    for (const auto& c : *set) {
      if (c.size() < 2) continue;
      spacing = std::min(spacing, perimeter(c) / static_cast<double>(c.size()));
    }
  }
  const double max_len = 0.5 * spacing;
  return std::max(directed_hausdorff(a, b, max_len), directed_hausdorff(b, a, max_len));
}

std::vector<Point> apply_normal_offset(std::span<const Point> v, double eps) {
  std::vector<Point> out(v.begin(), v.end());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] += eps * vertex_normal(v, i);
  return out;
}

// Restores `target_area` with a uniform offset along vertex normals.
void restore_area(std::vector<Point>& v, double target_area) {
  for (int it = 0; it < 3; ++it) {
    const double a = signed_area(v);
    const double diff = target_area - a;
    if (std::abs(diff) <= 1e-15 * std::abs(target_area)) break;
    const double eps = diff / perimeter(v);
    v = apply_normal_offset(v, eps);
  }
}

// Discrete curvature magnitude at vertex i from the turning angle.
double turning_curvature(std::span<const Point> v, std::size_t i) {
  const std::size_t n = v.size();
  const Point e0 = v[i] - v[(i + n - 1) % n];
  const Point e1 = v[(i + 1) % n] - v[i];
  const double l0 = std::abs(e0);
  const double l1 = std::abs(e1);
  if (l0 == 0.0 || l1 == 0.0) return std::numeric_limits<double>::infinity();
  const double angle = std::abs(std::arg(e1 / e0));
  return angle / (0.5 * (l0 + l1));
}

struct Branch {
  std::vector<Point> points;  // ordered away from the tip
  std::vector<double> arc;    // arc length from the tip
};

CuspEstimate estimate_cusp(const Branch& forward, const Branch& backward, Point tip, double window_scale,
                           double tip_curvature, const CuspOptions& options) {
  const double lo = options.window_lo * window_scale;
  const double hi = options.window_hi * window_scale;
  auto window_direction = [&](const Branch& b) {
    Point sum(0.0);
    for (std::size_t k = 0; k < b.points.size(); ++k) {
      if (b.arc[k] < lo || b.arc[k] > hi) continue;
      const Point d = b.points[k] - tip;
      if (std::abs(d) > 0.0) sum += d / std::abs(d);
    }
    return sum;
  };
  Point d1 = window_direction(forward);
  Point d2 = window_direction(backward);
  if (std::abs(d1) == 0.0 || std::abs(d2) == 0.0) throw geometry_error("cusp fit window holds no vertices");
  d1 /= std::abs(d1);
  d2 /= std::abs(d2);

  CuspEstimate est;
  est.codirectional = dot(d1, d2) > 0.0;
  Point axis = est.codirectional ? d1 + d2 : d1 - d2;
  if (std::abs(axis) == 0.0) axis = d1;
  axis /= std::abs(axis);
  est.axis = axis;
  const Point frame = std::conj(axis);

  // Local (u, v) samples of both branches.
  auto to_local = [&](const Branch& b, bool flip) {
    std::vector<std::pair<double, double>> uv;
    for (std::size_t k = 0; k < b.points.size(); ++k) {
      if (b.arc[k] > 1.5 * hi) break;
      const Point w = (b.points[k] - tip) * frame;
      uv.emplace_back(flip ? -w.real() : w.real(), w.imag());
    }
    return uv;
  };
  const auto first = to_local(forward, false);
  const auto second = to_local(backward, !est.codirectional);

  // Linear interpolation of the second branch in u; the combination cancels a
  // residual tilt of the axis to first order.
  auto interpolate_second = [&](double u, double& v_out) {
    for (std::size_t k = 1; k < second.size(); ++k) {
      const double u0 = second[k - 1].first;
      const double u1 = second[k].first;
      if ((u0 - u) * (u1 - u) <= 0.0 && u0 != u1) {
        const double t = (u - u0) / (u1 - u0);
        v_out = second[k - 1].second + t * (second[k].second - second[k - 1].second);
        return true;
      }
    }
    return false;
  };

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (std::size_t k = 0; k < first.size(); ++k) {
    if (forward.arc[k] < lo || forward.arc[k] > hi) continue;
    const double u = first[k].first;
    if (!(u > 0.0)) continue;
    double v2 = 0.0;
    if (!interpolate_second(u, v2)) continue;
    const double width = est.codirectional ? first[k].second - v2 : first[k].second + v2;
    if (!(std::abs(width) > 0.0)) continue;
    const double lx = std::log(u);
    const double ly = std::log(std::abs(width));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  if (count < 3) throw geometry_error("too few vertices in the cusp fit window");
  const double denom = count * sxx - sx * sx;
  est.exponent = (count * sxy - sx * sy) / denom;
  est.prefactor = 0.5 * std::exp((sy - est.exponent * sx) / count);
  est.curvature_metric = tip_curvature * window_scale / std::numbers::pi;
  est.is_cusp = est.codirectional || est.curvature_metric > options.smoothness_threshold;
  return est;
}

}  // namespace

// ---------------------------------------------------------------------------
// BubbleSystem

int BubbleSystem::next_label() const {
  int label = 0;
  for (const auto& b : bubbles) label = std::max(label, b.label + 1);
  return label;
}

double BubbleSystem::total_area() const {
  double s = 0.0;
  for (const auto& b : bubbles) s += area(b.boundary);
  return s;
}

double BubbleSystem::marker_spacing() const {
  double len = 0.0;
  std::size_t count = 0;
  for (const auto& b : bubbles) {
    len += perimeter(b.boundary.vertices);
    count += b.boundary.size();
  }
  return count == 0 ? 0.0 : len / static_cast<double>(count);
}

const Bubble* BubbleSystem::find(int label) const {
  for (const auto& b : bubbles)
    if (b.label == label) return &b;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Validation and basic measures

CurveDiagnostics validate(const BoundaryCurve& curve) {
  CurveDiagnostics d;
  const auto& v = curve.vertices;
  d.enough_vertices = v.size() >= kMinCurveVertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == v[(i + 1) % v.size()]) d.distinct_vertices = false;
  }
  if (v.size() >= 3) {
    d.counterclockwise = signed_area(v) > 0.0;
    d.simple = curve.degenerate || is_simple(v);
  } else {
    d.counterclockwise = false;
    d.simple = false;
  }
  return d;
}

void require_valid(const BoundaryCurve& curve) {
  const CurveDiagnostics d = validate(curve);
  if (!d.enough_vertices) {
    std::ostringstream os;
    os << "curve has " << curve.size() << " vertices, need at least " << kMinCurveVertices;
    throw geometry_error(os.str());
  }
  if (!d.distinct_vertices) throw geometry_error("curve has repeated consecutive vertices");
  if (!d.counterclockwise) throw geometry_error("curve is not counterclockwise (non-positive area)");
  if (!d.simple) throw geometry_error("curve is self-intersecting");
}

double signed_area(std::span<const Point> v) {
  if (v.size() < 3) throw geometry_error("area needs at least 3 vertices");
  double s = 0.0;
  const std::size_t n = v.size();
  // Shift to the first vertex to limit cancellation for small offset curves.
  const Point o = v[0];
  for (std::size_t i = 0; i < n; ++i) s += cross(v[i] - o, v[(i + 1) % n] - o);
  return 0.5 * s;
}

double area(const BoundaryCurve& curve) { return signed_area(curve.vertices); }

double perimeter(std::span<const Point> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += std::abs(v[(i + 1) % v.size()] - v[i]);
  return s;
}

Point centroid(std::span<const Point> v) {
  const std::size_t n = v.size();
  const Point o = v[0];
  double a = 0.0;
  Point c(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Point p = v[i] - o;
    const Point q = v[(i + 1) % n] - o;
    const double w = cross(p, q);
    a += w;
    c += (p + q) * w;
  }
  if (a == 0.0) return o;
  return o + c / (3.0 * a);
}

Box bounding_box(std::span<const Point> v) {
  Box b{Point(std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()),
        Point(-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity())};
  for (const Point p : v) {
    b.lo = Point(std::min(b.lo.real(), p.real()), std::min(b.lo.imag(), p.imag()));
    b.hi = Point(std::max(b.hi.real(), p.real()), std::max(b.hi.imag(), p.imag()));
  }
  return b;
}

Box bounding_box(const BubbleSystem& system) {
  Box total = bounding_box(std::span<const Point>{});
  for (const auto& b : system.bubbles) {
    const Box bb = bounding_box(b.boundary.vertices);
    total.lo = Point(std::min(total.lo.real(), bb.lo.real()), std::min(total.lo.imag(), bb.lo.imag()));
    total.hi = Point(std::max(total.hi.real(), bb.hi.real()), std::max(total.hi.imag(), bb.hi.imag()));
  }
  return total;
}

Eigen::Matrix2d second_moments(std::span<const Point> v) {
  const Point c = centroid(v);
  const std::size_t n = v.size();
  double a = 0.0, ixx = 0.0, iyy = 0.0, ixy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point p = v[i] - c;
    const Point q = v[(i + 1) % n] - c;
    const double w = cross(p, q);
    const double x0 = p.real(), y0 = p.imag(), x1 = q.real(), y1 = q.imag();
    a += 0.5 * w;
    ixx += (x0 * x0 + x0 * x1 + x1 * x1) * w / 12.0;
    iyy += (y0 * y0 + y0 * y1 + y1 * y1) * w / 12.0;
    ixy += (x0 * y1 + 2.0 * x0 * y0 + 2.0 * x1 * y1 + x1 * y0) * w / 24.0;
  }
  Eigen::Matrix2d m;
  m << ixx / a, ixy / a, ixy / a, iyy / a;
  return m;
}

EllipseFit fit_ellipse(std::span<const Point> v) {
  EllipseFit fit;
  fit.center = centroid(v);
  const Eigen::Matrix2d m = second_moments(v);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
  const double small = std::max(es.eigenvalues()(0), 0.0);
  const double large = std::max(es.eigenvalues()(1), 0.0);
  fit.minor = 2.0 * std::sqrt(small);
  fit.major = 2.0 * std::sqrt(large);
  const Eigen::Vector2d dir = es.eigenvectors().col(1);
  double angle = std::atan2(dir(1), dir(0));
  if (angle <= -std::numbers::pi / 2) angle += std::numbers::pi;
  if (angle > std::numbers::pi / 2) angle -= std::numbers::pi;
  fit.major_angle = angle;
  return fit;
}

BoundaryCurve reversed(const BoundaryCurve& curve) {
  BoundaryCurve out = curve;
  std::reverse(out.vertices.begin(), out.vertices.end());
  return out;
}

bool is_counterclockwise(const BoundaryCurve& curve) { return signed_area(curve.vertices) > 0.0; }

BoundaryCurve oriented_ccw(BoundaryCurve curve) {
  if (curve.size() >= 3 && signed_area(curve.vertices) < 0.0) std::reverse(curve.vertices.begin(), curve.vertices.end());
  return curve;
}

bool is_simple(std::span<const Point> v) {
  const std::size_t n = v.size();
  if (n < 3) return false;
  struct Seg {
    double xmin, xmax;
    std::size_t i;
  };
  std::vector<Seg> segs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = v[i], b = v[(i + 1) % n];
    segs[i] = {std::min(a.real(), b.real()), std::max(a.real(), b.real()), i};
  }
  std::sort(segs.begin(), segs.end(), [](const Seg& a, const Seg& b) { return a.xmin < b.xmin; });
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n && segs[q].xmin <= segs[p].xmax; ++q) {
      const std::size_t i = segs[p].i, j = segs[q].i;
      const std::size_t d = (i > j) ? i - j : j - i;
      if (d == 1 || d == n - 1) {
        // Adjacent segments may only share their common vertex; reject folds.
        const std::size_t first = (d == 1) ? std::min(i, j) : std::max(i, j);
        const Point a = v[first], b = v[(first + 1) % n], c = v[(first + 2) % n];
        if (orientation(a, b, c) == 0 && dot(b - a, c - b) < 0.0) return false;
        continue;
      }
      if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool contains(std::span<const Point> v, Point p) {
  bool inside = false;
  const std::size_t n = v.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = v[i], b = v[j];
    if ((a.imag() > p.imag()) != (b.imag() > p.imag())) {
      const double x = (b.real() - a.real()) * (p.imag() - a.imag()) / (b.imag() - a.imag()) + a.real();
      if (p.real() < x) inside = !inside;
    }
  }
  return inside;
}

double distance_to_segment(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

double distance_to_polyline(std::span<const Point> v, Point p) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) best = std::min(best, distance_to_segment(p, v[i], v[(i + 1) % n]));
  return best;
}

double distance_to_boundaries(const BubbleSystem& system, Point p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : system.bubbles) best = std::min(best, distance_to_polyline(b.boundary.vertices, p));
  return best;
}

int bubble_containing(const BubbleSystem& system, Point p) {
  for (std::size_t i = 0; i < system.bubbles.size(); ++i)
    if (contains(system.bubbles[i].boundary.vertices, p)) return static_cast<int>(i);
  return -1;
}

double curve_separation(std::span<const Point> a, std::span<const Point> b) {
  double best = std::numeric_limits<double>::infinity();
  const Box ba = bounding_box(a);
  const Box bb = bounding_box(b);
  // Boxes far apart: distance between boxes is a lower bound; still exact below.
  (void)ba;
  (void)bb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Point p = a[i], q = a[(i + 1) % a.size()];
    for (std::size_t j = 0; j < b.size(); ++j) {
      best = std::min(best, segment_distance(p, q, b[j], b[(j + 1) % b.size()]));
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Convex hull and diameter

std::vector<Point> convex_hull(std::span<const Point> points) {
  std::vector<Point> p(points.begin(), points.end());
  std::sort(p.begin(), p.end(), [](Point a, Point b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) return p;
  std::vector<Point> hull(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 1] - hull[k - 2], p[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p[i];
  }
  hull.resize(k - 1);
  return hull;
}

double diameter(std::span<const Point> points) {
  const std::vector<Point> h = convex_hull(points);
  const std::size_t n = h.size();
  if (n == 0) return 0.0;
  if (n == 1) return 0.0;
  if (n == 2) return std::abs(h[1] - h[0]);
  double best = 0.0;
  std::size_t j = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const Point e = h[(i + 1) % n] - h[i];
    while (cross(e, h[(j + 1) % n] - h[i]) > cross(e, h[j] - h[i])) j = (j + 1) % n;
    best = std::max({best, std::abs(h[j] - h[i]), std::abs(h[j] - h[(i + 1) % n])});
  }
  return best;
}

// ---------------------------------------------------------------------------
// Resampling

BoundaryCurve resample_count(const BoundaryCurve& curve, std::size_t count) {
  if (count < 3) throw geometry_error("resample needs at least 3 output vertices");
  const double target_area = signed_area(curve.vertices);
  const detail::PeriodicSpline spline(curve.vertices);
  const std::size_t n = spline.segments();
  std::vector<double> seg_arc(n), cum(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    seg_arc[i] = spline.segment_arc(i);
    cum[i + 1] = cum[i] + seg_arc[i];
  }
  const double total = cum[n];
  BoundaryCurve out;
  out.degenerate = curve.degenerate;
  out.vertices.resize(count);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(count);
    while (seg + 1 < n && cum[seg + 1] <= target) ++seg;
    const double remaining = target - cum[seg];
    const double h = spline.knot(seg + 1) - spline.knot(seg);
    double t = h * remaining / seg_arc[seg];
    for (int it = 0; it < 8; ++it) {
      const double f = spline.partial_arc(seg, t) - remaining;
      const double df = std::abs(spline.derivative_local(seg, t));
      if (df == 0.0) break;
      const double step = f / df;
      t = std::clamp(t - step, 0.0, h);
      if (std::abs(step) < 1e-15 * h) break;
    }
    out.vertices[k] = spline.value_local(seg, t);
  }
  restore_area(out.vertices, target_area);
  return out;
}

BoundaryCurve resample(const BoundaryCurve& curve, double spacing) {
  if (!(spacing > 0.0)) throw geometry_error("resample spacing must be positive");
  const double len = perimeter(curve.vertices);
  if (spacing > len / 8.0) {
    std::ostringstream os;
    os << "resample spacing " << spacing << " too coarse for curve of length " << len;
    throw geometry_error(os.str());
  }
  const auto count = static_cast<std::size_t>(std::max(8.0, std::round(len / spacing)));
  return resample_count(curve, count);
}

// ---------------------------------------------------------------------------
// Pinch surgery

std::vector<BoundaryCurve> split_on_pinch(const BoundaryCurve& curve, double clearance, PinchMode mode) {
  const auto& v = curve.vertices;
  const std::size_t n = v.size();
  if (n < 8) return {curve};
  const std::vector<double> s = cumulative_arc(v, true);
  const double total = s[n];
  const double min_arc = 3.0 * clearance;

  struct Candidate {
    std::size_t i, j;
    double d;
  };
  std::vector<Candidate> cand;
  std::vector<Point> normals(n);
  for (std::size_t i = 0; i < n; ++i) normals[i] = vertex_normal(v, i);
  const double c2 = clearance * clearance;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d2 = std::norm(v[i] - v[j]);
      if (d2 >= c2) continue;
      const double arc = std::min(s[j] - s[i], total - (s[j] - s[i]));
      if (arc <= min_arc) continue;
      if (dot(normals[i], normals[j]) > -0.5) continue;
      if (!contains(v, 0.5 * (v[i] + v[j]))) continue;
      cand.push_back({i, j, std::sqrt(d2)});
    }
  }
  if (cand.empty()) return {curve};

  // Cluster candidate pairs that are neighbours in index space.
  std::vector<std::size_t> parent(cand.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto cyc = [&](std::size_t a, std::size_t b) {
    const std::size_t d = a > b ? a - b : b - a;
    return std::min(d, n - d);
  };
  for (std::size_t a = 0; a < cand.size(); ++a)
    for (std::size_t b = a + 1; b < cand.size(); ++b)
      if (cyc(cand[a].i, cand[b].i) <= 3 && cyc(cand[a].j, cand[b].j) <= 3) parent[find(a)] = find(b);
  std::size_t clusters = 0;
  for (std::size_t a = 0; a < cand.size(); ++a)
    if (find(a) == a) ++clusters;
  if (clusters > 1) {
    // Representative (closest) pair per cluster.
    std::vector<std::size_t> rep(cand.size(), cand.size());
    for (std::size_t a = 0; a < cand.size(); ++a) {
      const std::size_t r = find(a);
      if (rep[r] == cand.size() || cand[a].d < cand[rep[r]].d) rep[r] = a;
    }
    std::vector<Point> mids;
    for (std::size_t a = 0; a < cand.size(); ++a)
      if (find(a) == a) mids.push_back(0.5 * (v[cand[rep[a]].i] + v[cand[rep[a]].j]));
    bool separated = true;
    for (std::size_t a = 0; a < mids.size(); ++a)
      for (std::size_t b = a + 1; b < mids.size(); ++b)
        if (std::abs(mids[a] - mids[b]) <= 2.0 * clearance) separated = false;
    if (mode == PinchMode::strict || !separated) {
      std::ostringstream os;
      os << "ambiguous surgery: " << clusters << " simultaneous pinches below clearance " << clearance << " near";
      for (const Point m : mids) os << " (" << m.real() << ", " << m.imag() << ")";
      throw geometry_error(os.str());
    }
  }

  const Candidate best = *std::min_element(cand.begin(), cand.end(),
                                           [](const Candidate& a, const Candidate& b) { return a.d < b.d; });
  auto collect = [&](std::size_t from, std::size_t to) {
    // Vertices from+1 .. to-1 (cyclic).
    std::vector<Point> out;
    for (std::size_t k = (from + 1) % n; k != to; k = (k + 1) % n) out.push_back(v[k]);
    return out;
  };
  std::vector<BoundaryCurve> pieces;
  for (auto piece : {collect(best.i, best.j), collect(best.j, best.i)}) {
    if (piece.size() < 3) continue;
    // Relax the corners created by the cut.
    const std::size_t m = piece.size();
    for (int pass = 0; pass < 3; ++pass) {
      std::vector<Point> next = piece;
      for (std::ptrdiff_t off = -3; off < 3; ++off) {
        const std::size_t k = wrap(off, m);
        next[k] = 0.5 * piece[k] + 0.25 * (piece[wrap(static_cast<std::ptrdiff_t>(k) - 1, m)] +
                                           piece[wrap(static_cast<std::ptrdiff_t>(k) + 1, m)]);
      }
      piece = std::move(next);
    }
    BoundaryCurve c;
    c.vertices = std::move(piece);
    pieces.push_back(std::move(c));
  }
  return pieces;
}

// ---------------------------------------------------------------------------
// Renormalization

BoundaryCurve renormalize(const BoundaryCurve& curve, double y_power, double* scale, Extent extent) {
  if (extent == Extent::x_width) {
    const Box box = bounding_box(curve.vertices);
    const double w = box.hi.real() - box.lo.real();
    if (!(w > 0.0)) throw geometry_error("zero-width curve cannot be renormalized");
    const double c = 2.0 / w;
    const double cy = std::pow(c, y_power);
    BoundaryCurve out;
    out.degenerate = curve.degenerate;
    out.vertices.reserve(curve.size());
    for (const Point p : curve.vertices) out.vertices.emplace_back(c * p.real(), cy * p.imag());
    if (scale) *scale = c;
    return out;
  }
  const double d0 = diameter(curve.vertices);
  if (!(d0 > 0.0)) throw geometry_error("zero-diameter curve cannot be renormalized");
  auto scaled = [&](double c) {
    std::vector<Point> out(curve.size());
    const double cy = std::pow(c, y_power);
    for (std::size_t i = 0; i < curve.size(); ++i)
      out[i] = Point(c * curve[i].real(), cy * curve[i].imag());
    return out;
  };
  double c = 2.0 / d0;
  if (y_power != 1.0) {
    // diameter(c) is increasing in c; bisect on log c.
    double lo = std::log(c), hi = std::log(c);
    while (diameter(scaled(std::exp(lo))) > 2.0) lo -= 1.0;
    while (diameter(scaled(std::exp(hi))) < 2.0) hi += 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (diameter(scaled(std::exp(mid))) < 2.0)
        lo = mid;
      else
        hi = mid;
    }
    c = std::exp(0.5 * (lo + hi));
  }
  BoundaryCurve out;
  out.degenerate = curve.degenerate;
  out.vertices = scaled(c);
  // Exact diameter 2 after the final rounding of c.
  const double d = diameter(out.vertices);
  if (y_power == 1.0) {
    for (auto& p : out.vertices) p *= 2.0 / d;
  }
  if (scale) *scale = c;
  return out;
}

BoundaryCurve normalize_for_asymptotics(const BoundaryCurve& curve, int n, double alpha) {
  if (n < 1) throw geometry_error("normalize_for_asymptotics needs n >= 1");
  BoundaryCurve mapped = curve;
  if (alpha != 0.0) {
    for (auto& z : mapped.vertices) z = z + Point(0.0, alpha) * std::pow(z, n);
  }
  return renormalize(mapped, 2.0 * n - 1.0, nullptr, Extent::x_width);
}

// ---------------------------------------------------------------------------
// Cusp diagnostics

CuspEstimate cusp_exponent(const BoundaryCurve& curve, Point point, const CuspOptions& options) {
  const auto& v = curve.vertices;
  const std::size_t n = v.size();
  if (n < 8) throw geometry_error("cusp_exponent needs a valid curve");
  std::size_t tip = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::abs(v[i] - point);
    if (d < best) {
      best = d;
      tip = i;
    }
  }
  const double spacing = perimeter(v) / static_cast<double>(n);
  if (distance_to_polyline(v, point) > options.on_curve_tolerance * spacing)
    throw geometry_error("cusp_exponent: point is not on the curve");
  const double window = 0.5 * perimeter(v);
  Branch fwd, bwd;
  double s = 0.0;
  for (std::size_t k = 1; k < n / 2; ++k) {
    s += std::abs(v[(tip + k) % n] - v[(tip + k - 1) % n]);
    fwd.points.push_back(v[(tip + k) % n]);
    fwd.arc.push_back(s);
  }
  s = 0.0;
  for (std::size_t k = 1; k < n / 2; ++k) {
    s += std::abs(v[(tip + n - k) % n] - v[(tip + n - k + 1) % n]);
    bwd.points.push_back(v[(tip + n - k) % n]);
    bwd.arc.push_back(s);
  }
  CuspEstimate est = estimate_cusp(fwd, bwd, v[tip], window, turning_curvature(v, tip), options);
  est.tip_index = tip;
  return est;
}

CuspEstimate cusp_exponent_open(std::span<const Point> arc, Point point, const CuspOptions& options) {
  const std::size_t n = arc.size();
  if (n < 8) throw geometry_error("cusp_exponent needs at least 8 vertices");
  std::size_t tip = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::abs(arc[i] - point);
    if (d < best) {
      best = d;
      tip = i;
    }
  }
  if (tip == 0 || tip + 1 == n) throw geometry_error("cusp_exponent: tip at the end of an open arc");
  double seg = 0.0;
  double min_seg = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < n; ++i) {
    seg += std::abs(arc[i] - arc[i - 1]);
    min_seg = std::min(min_seg, std::abs(arc[i] - arc[i - 1]));
  }
  const double spacing = seg / static_cast<double>(n - 1);
  if (best > options.on_curve_tolerance * spacing) throw geometry_error("cusp_exponent: point is not on the curve");
  Branch fwd, bwd;
  double s = 0.0;
  for (std::size_t k = tip + 1; k < n; ++k) {
    s += std::abs(arc[k] - arc[k - 1]);
    fwd.points.push_back(arc[k]);
    fwd.arc.push_back(s);
  }
  const double avail_f = s;
  s = 0.0;
  for (std::size_t k = tip; k-- > 0;) {
    s += std::abs(arc[k] - arc[k + 1]);
    bwd.points.push_back(arc[k]);
    bwd.arc.push_back(s);
  }
  const double window = std::min(avail_f, s);
  const Point e0 = arc[tip] - arc[tip - 1];
  const Point e1 = arc[tip + 1] - arc[tip];
  const double kappa = std::abs(std::arg(e1 / e0)) / (0.5 * (std::abs(e0) + std::abs(e1)));
  CuspEstimate est = estimate_cusp(fwd, bwd, arc[tip], window, kappa, options);
  est.tip_index = tip;
  return est;
}

// ---------------------------------------------------------------------------
// Distances

double hausdorff_distance(const BoundaryCurve& a, const BoundaryCurve& b) {
  return hausdorff_sets({a.vertices}, {b.vertices});
}

double hausdorff_distance(const BubbleSystem& a, const BubbleSystem& b) {
  std::vector<std::vector<Point>> ca, cb;
  for (const auto& x : a.bubbles) ca.push_back(x.boundary.vertices);
  for (const auto& x : b.bubbles) cb.push_back(x.boundary.vertices);
  if (ca.empty() || cb.empty()) {
    if (ca.empty() && cb.empty()) return 0.0;
    return std::numeric_limits<double>::infinity();
  }
  return hausdorff_sets(ca, cb);
}

double max_scaled_curvature(const BoundaryCurve& curve) {
  const auto& v = curve.vertices;
  const double scale = std::sqrt(std::abs(signed_area(v)) / std::numbers::pi);
  double best = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) best = std::max(best, turning_curvature(v, i));
  return best * scale;
}

// ---------------------------------------------------------------------------
// Builders

BoundaryCurve make_circle(Point center, double radius, std::size_t count, bool area_exact) {
  const double n = static_cast<double>(count);
  double r = radius;
  if (area_exact) r *= std::sqrt(std::numbers::pi / (0.5 * n * std::sin(2.0 * std::numbers::pi / n)));
  BoundaryCurve c;
  c.vertices.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / n;
    c.vertices[k] = center + std::polar(r, t);
  }
  return c;
}

BoundaryCurve make_ellipse(Point center, double a, double b, std::size_t count, double angle) {
  BoundaryCurve c;
  c.vertices.resize(count);
  const Point rot = std::polar(1.0, angle);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
    c.vertices[k] = center + rot * Point(a * std::cos(t), b * std::sin(t));
  }
  return c;
}

BoundaryCurve make_profile_domain(const std::function<double(double)>& f, double half_width, std::size_t count) {
  BoundaryCurve c;
  c.vertices.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
    const double x = half_width * std::cos(t);
    const double y = std::sqrt(std::max(f(x), 0.0));
    c.vertices[k] = Point(x, std::sin(t) >= 0.0 ? y : -y);
  }
  return c;
}

BoundaryCurve make_parametric(const std::function<Point(double)>& z, std::size_t count) {
  BoundaryCurve c;
  c.vertices.resize(count);
  for (std::size_t k = 0; k < count; ++k)
    c.vertices[k] = z(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count));
  return oriented_ccw(std::move(c));
}

BubbleSystem make_system(std::vector<BoundaryCurve> curves, double time) {
  BubbleSystem s;
  s.time = time;
  int label = 0;
  for (auto& c : curves) s.bubbles.push_back(Bubble{label++, oriented_ccw(std::move(c))});
  return s;
}

}  // namespace hsb::geometry
