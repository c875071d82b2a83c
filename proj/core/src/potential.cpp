#include "hsb/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hsb/error.hpp"

namespace hsb::potential {

namespace {

constexpr double kInvTwoPi = 0.5 / std::numbers::pi;

double dot(Point a, Point b) { return a.real() * b.real() + a.imag() * b.imag(); }

// Antiderivative of log sqrt(s^2 + d^2) in s.
double log_antiderivative(double s, double d) {
  const double ad = std::abs(d);
  if (ad == 0.0) return s == 0.0 ? 0.0 : s * std::log(std::abs(s)) - s;
  return 0.5 * s * std::log(s * s + d * d) - s + ad * std::atan(s / ad);
}

void accumulate_polygon(std::span<const Point> v, Point p, PotentialProbe& out) {
  const std::size_t n = v.size();
  double value = 0.0;
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
  Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = v[i];
    const Point b = v[(i + 1) % n];
    const Point e = b - a;
    const double len = std::abs(e);
    if (len == 0.0) continue;
    const Point t = e / len;
    const Point nrm(t.imag(), -t.real());
    const Point ua = a - p;
    const Point ub = b - p;
    const double d = dot(ua, nrm);
    const double sa = dot(ua, t);
    const double sb = dot(ub, t);
    const double g = log_antiderivative(sb, d) - log_antiderivative(sa, d);
    value += d * (0.5 * g - 0.25 * (sb - sa));
    grad -= Eigen::Vector2d(nrm.real(), nrm.imag()) * g;
    const double log_ratio = 0.5 * std::log((sb * sb + d * d) / (sa * sa + d * d));
    const double dtheta = std::arg(ub / ua);
    const Point w = t * log_ratio + nrm * dtheta;
    hess += Eigen::Vector2d(nrm.real(), nrm.imag()) * Eigen::RowVector2d(w.real(), w.imag());
  }
  out.value += kInvTwoPi * value;
  out.gradient += kInvTwoPi * grad;
  out.hessian += kInvTwoPi * hess;
}

void symmetrize(PotentialProbe& probe) {
  const double off = 0.5 * (probe.hessian(0, 1) + probe.hessian(1, 0));
  probe.hessian(0, 1) = off;
  probe.hessian(1, 0) = off;
}

void require_clear(const geometry::BubbleSystem& system, Point p, double min_distance) {
  for (const auto& b : system.bubbles) {
    const double d = geometry::distance_to_polyline(b.boundary.vertices, p);
    if (d < min_distance) {
      std::ostringstream os;
      os << "potential probe at (" << p.real() << ", " << p.imag() << ") is " << d
         << " from the boundary of bubble " << b.label << " (minimum " << min_distance << ")";
      throw geometry_error(os.str());
    }
  }
}

}  // namespace

PotentialProbe eval_polygon(std::span<const Point> vertices, Point p) {
  PotentialProbe probe;
  probe.point = p;
  accumulate_polygon(vertices, p, probe);
  symmetrize(probe);
  return probe;
}

PotentialProbe eval_curves(const std::vector<std::span<const Point>>& curves, Point p, double min_distance) {
  PotentialProbe probe;
  probe.point = p;
  for (const auto& c : curves) {
    if (min_distance > 0.0 && geometry::distance_to_polyline(c, p) < min_distance) {
      std::ostringstream os;
      os << "potential probe at (" << p.real() << ", " << p.imag() << ") is within " << min_distance
         << " of a boundary";
      throw geometry_error(os.str());
    }
    accumulate_polygon(c, p, probe);
  }
  symmetrize(probe);
  return probe;
}

PotentialProbe eval_potential(const geometry::BubbleSystem& system, Point p) {
  require_clear(system, p, kNearBoundaryFactor * system.marker_spacing());
  PotentialProbe probe;
  probe.point = p;
  for (const auto& b : system.bubbles) accumulate_polygon(b.boundary.vertices, p, probe);
  symmetrize(probe);
  return probe;
}

PotentialProbe eval_difference(const geometry::BubbleSystem& outer, const geometry::BubbleSystem& inner, Point p) {
  PotentialProbe a = eval_potential(outer, p);
  if (inner.bubbles.empty()) return a;
  const PotentialProbe b = eval_potential(inner, p);
  a.value -= b.value;
  a.gradient -= b.gradient;
  a.hessian -= b.hessian;
  return a;
}

PotentialProbe disk_potential(Point center, double radius, Point p) {
  PotentialProbe probe;
  probe.point = p;
  const Point w = p - center;
  const double r2 = std::norm(w);
  const double rho2 = radius * radius;
  if (r2 >= rho2) {
    probe.value = 0.25 * rho2 * std::log(r2);
    probe.gradient = 0.5 * rho2 / r2 * Eigen::Vector2d(w.real(), w.imag());
    const double x = w.real(), y = w.imag();
    const double s = 0.5 * rho2 / (r2 * r2);
    probe.hessian << s * (y * y - x * x), -2.0 * s * x * y, -2.0 * s * x * y, s * (x * x - y * y);
  } else {
    probe.value = 0.25 * r2 + 0.5 * rho2 * std::log(radius) - 0.25 * rho2;
    probe.gradient = 0.5 * Eigen::Vector2d(w.real(), w.imag());
    probe.hessian = 0.5 * Eigen::Matrix2d::Identity();
  }
  return probe;
}

PotentialProbe ellipse_potential(double a, double b, Point p) {
  if (!(a > 0.0) || !(b > 0.0)) throw validation_error("ellipse semi-axes must be positive");
  const double x = p.real(), y = p.imag();
  if ((x * x) / (a * a) + (y * y) / (b * b) >= 1.0) throw validation_error("ellipse_potential: point is not inside");
  PotentialProbe probe;
  probe.point = p;
  const double cx = b / (a + b);
  const double cy = a / (a + b);
  probe.value = 0.0;
  probe.gradient = Eigen::Vector2d(cx * x, cy * y);
  probe.hessian << cx, 0.0, 0.0, cy;
  return probe;
}

std::complex<double> cauchy_from_gradient(Point z, const Eigen::Vector2d& gradient) {
  return std::conj(z) - 2.0 * std::complex<double>(gradient(0), -gradient(1));
}

std::complex<double> cauchy_transform(const geometry::BubbleSystem& system, Point z) {
  if (geometry::bubble_containing(system, z) < 0) throw validation_error("cauchy_transform: point is outside all bubbles");
  return cauchy_from_gradient(z, eval_potential(system, z).gradient);
}

std::string to_string(CriticalKind kind) {
  switch (kind) {
    case CriticalKind::minimum: return "minimum";
    case CriticalKind::saddle: return "saddle";
    case CriticalKind::maximum: return "maximum";
    case CriticalKind::degenerate: return "degenerate";
  }
  return "unknown";
}

std::string to_string(BreakupVerdict verdict) {
  return verdict == BreakupVerdict::breaks ? "breaks" : "no-conclusion";
}

geometry::BubbleSystem transformed(const geometry::BubbleSystem& system, const std::function<Point(Point)>& map,
                                   bool reverses_orientation) {
  geometry::BubbleSystem out = system;
  for (auto& b : out.bubbles) {
    for (auto& v : b.boundary.vertices) v = map(v);
    if (reverses_orientation) std::reverse(b.boundary.vertices.begin(), b.boundary.vertices.end());
  }
  return out;
}

}  // namespace hsb::potential
