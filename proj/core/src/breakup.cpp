#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hsb/error.hpp"
#include "hsb/potential.hpp"

namespace hsb::potential {

namespace {

// Midpoint Stieltjes sum of dG / (x^2 + f) on the graded mesh
// x = b (1 - (1 - u)^2), which keeps sqrt(f) smooth at a simple zero of f(b).
double graded_stieltjes(const std::function<double(double)>& f, double b, int n, double floor) {
  auto x_of = [b](double u) { return b * (1.0 - (1.0 - u) * (1.0 - u)); };
  auto f_checked = [&](double x) {
    const double v = f(x);
    if (!std::isfinite(v)) throw validation_error("breakup profile is not finite");
    if (v < floor) {
      std::ostringstream os;
      os << "breakup profile is negative at x = " << x << " (f = " << v << ")";
      throw validation_error(os.str());
    }
    return std::max(v, 0.0);
  };
  double sum = 0.0;
  double x0 = x_of(0.0);
  double g0 = x0 * std::sqrt(f_checked(x0));
  for (int i = 0; i < n; ++i) {
    const double u1 = static_cast<double>(i + 1) / n;
    const double um = (i + 0.5) / n;
    const double x1 = x_of(u1);
    const double g1 = x1 * std::sqrt(f_checked(x1));
    const double xm = x_of(um);
    const double denom = xm * xm + f_checked(xm);
    sum += (g1 - g0) / denom;
    g0 = g1;
  }
  return sum;
}

}  // namespace

BreakupIntegral breakup_integral(const std::function<double(double)>& f, double b) {
  if (!(b > 0.0)) throw validation_error("breakup integral needs b > 0");
  const double scale = std::max(std::abs(f(0.0)), std::abs(f(0.5 * b)));
  const double floor = -1e-12 * std::max(scale, 1e-300);
  BreakupIntegral out;
  int n = 1024;
  double coarse = graded_stieltjes(f, b, n, floor);
  double prev_extrapolated = std::numeric_limits<double>::quiet_NaN();
  for (; n <= (1 << 22); n *= 2) {
    const double fine = graded_stieltjes(f, b, 2 * n, floor);
    const double extrapolated = (4.0 * fine - coarse) / 3.0;
    out.value = extrapolated;
    out.error_estimate = std::isnan(prev_extrapolated) ? std::abs(fine - coarse) : std::abs(extrapolated - prev_extrapolated);
    if (!std::isnan(prev_extrapolated) && out.error_estimate < 1e-11) break;
    prev_extrapolated = extrapolated;
    coarse = fine;
  }
  out.verdict = out.value > 0.5 * std::numbers::pi ? BreakupVerdict::breaks : BreakupVerdict::no_conclusion;
  return out;
}

BreakupIntegral breakup_integral(std::span<const double> x, std::span<const double> f) {
  if (x.size() != f.size() || x.size() < 2) throw validation_error("breakup samples need matching x and f of length >= 2");
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (f[k] < 0.0) {
      std::ostringstream os;
      os << "breakup profile sample " << k << " is negative (f = " << f[k] << ")";
      throw validation_error(os.str());
    }
    if (k > 0 && !(x[k] > x[k - 1])) throw validation_error("breakup sample abscissae must increase");
  }
  BreakupIntegral out;
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    const double g0 = x[k] * std::sqrt(f[k]);
    const double g1 = x[k + 1] * std::sqrt(f[k + 1]);
    const double xm = 0.5 * (x[k] + x[k + 1]);
    const double fm = 0.5 * (f[k] + f[k + 1]);
    sum += (g1 - g0) / (xm * xm + fm);
  }
  out.value = sum;
  out.verdict = out.value > 0.5 * std::numbers::pi ? BreakupVerdict::breaks : BreakupVerdict::no_conclusion;
  return out;
}

namespace {

double symmetry_tolerance(const geometry::BubbleSystem& system) {
  const geometry::Box box = geometry::bounding_box(system);
  return std::max(2.0 * system.marker_spacing(), 1e-9 * std::abs(box.hi - box.lo));
}

void require_symmetric(const geometry::BubbleSystem& a, const geometry::BubbleSystem& b, const std::string& what) {
  const double d = geometry::hausdorff_distance(a, b);
  const double tol = symmetry_tolerance(a);
  if (d > tol) {
    std::ostringstream os;
    os << "declared " << what << " symmetry violated: mirror distance " << d << " exceeds " << tol;
    throw validation_error(os.str());
  }
}

}  // namespace

int axis_extrema_count(const geometry::BubbleSystem& system, double gradient_tolerance) {
  if (system.bubbles.empty()) throw validation_error("axis_extrema_count needs a nonempty system");
  const auto mirrored = transformed(system, [](Point z) { return std::conj(z); }, true);
  require_symmetric(system, mirrored, "axial");
  const geometry::Box box = geometry::bounding_box(system);
  const double width = box.hi.real() - box.lo.real();
  const double lo = box.lo.real() - 0.1 * width;
  const double hi = box.hi.real() + 0.1 * width;
  const double step = std::min(0.5 * system.marker_spacing(), width / 2000.0);
  const double tol = gradient_tolerance * std::sqrt(system.total_area());
  int last_sign = 0;
  int count = 0;
  for (double x = lo; x <= hi; x += step) {
    PotentialProbe probe;
    try {
      probe = eval_potential(system, Point(x, 0.0));
    } catch (const Error&) {
      continue;
    }
    const double gx = probe.gradient(0);
    if (std::abs(gx) <= tol) continue;
    const int sign = gx > 0.0 ? 1 : -1;
    if (last_sign != 0 && sign != last_sign) ++count;
    last_sign = sign;
  }
  return count;
}

BreakupVerdict predict_breakup(const geometry::BubbleSystem& system, const Symmetry& symmetry) {
  if (symmetry.kind == Symmetry::Kind::none) return BreakupVerdict::no_conclusion;
  if (system.bubbles.empty()) throw validation_error("predict_breakup needs a nonempty system");
  const double scale = std::sqrt(system.total_area());
  const double location_tol = 1e-6 * scale + 1e-3 * system.marker_spacing();

  // Work in a frame where the symmetry point is the origin and the axis is x.
  Point dir = symmetry.direction;
  if (symmetry.kind == Symmetry::Kind::axial) {
    if (std::abs(dir) == 0.0) throw validation_error("axial symmetry needs a nonzero direction");
    dir /= std::abs(dir);
  } else {
    dir = Point(1.0, 0.0);
  }
  const Point c = symmetry.center;
  const auto frame = transformed(system, [&](Point z) { return (z - c) * std::conj(dir); }, false);

  if (symmetry.kind == Symmetry::Kind::central) {
    require_symmetric(frame, transformed(frame, [](Point z) { return -z; }, false), "central");
  } else {
    require_symmetric(frame, transformed(frame, [](Point z) { return std::conj(z); }, true), "axial");
  }

  geometry::Box box = geometry::bounding_box(frame);
  const Point pad = 0.05 * (box.hi - box.lo);
  box.lo -= pad;
  box.hi += pad;
  const CriticalSearch search = find_critical_points(frame, box);
  for (const auto& cp : search.points) {
    if (!cp.is_global_min) continue;
    const double off = symmetry.kind == Symmetry::Kind::central ? std::abs(cp.location)
                                                                : std::abs(cp.location.imag());
    if (off > location_tol) return BreakupVerdict::breaks;
  }
  if (symmetry.kind == Symmetry::Kind::axial && axis_extrema_count(frame) > 1) return BreakupVerdict::breaks;
  return BreakupVerdict::no_conclusion;
}

}  // namespace hsb::potential
