#include <cmath>
#include <numbers>
#include <sstream>

#include "hsb/conformal.hpp"
#include "hsb/error.hpp"

namespace hsb::conformal {

std::array<double, 4> kufarev_cubic(double a, double R, double r, double q, double t) {
  const double drained = q * t / std::numbers::pi;
  const double k = 2.0 * r * r + R * R - drained;
  const double a2 = a * a;
  return {2.0 * a2 * a2, -(2.0 * a2 * (R * R - drained) + a2 * a2), 0.0, k * k};
}

KufarevMap kufarev_solve(double a, double R, double r, double q, double t) {
  if (!(R > r) || !(r > 0.0)) throw validation_error("Kufarev configuration needs R > r > 0");
  if (!(a > R + r)) throw validation_error("Kufarev configuration needs a > R + r");
  if (!(q > 0.0)) throw validation_error("Kufarev configuration needs q > 0");
  if (!(t >= 0.0)) throw validation_error("Kufarev configuration needs t >= 0");
  const double k = 2.0 * r * r + R * R - q * t / std::numbers::pi;
  if (!(k > 0.0)) {
    std::ostringstream os;
    os << "Kufarev cubic degenerates at t = " << t << " (2r^2 + R^2 - qt/pi = " << k << ")";
    throw solver_error(os.str());
  }
  const auto c = kufarev_cubic(a, R, r, q, t);
  const std::vector<double> roots = real_cubic_roots(c[0], c[1], c[2], c[3]);
  if (roots.size() != 3) {
    std::ostringstream os;
    os << "Kufarev cubic has " << roots.size() << " real root(s) at t = " << t << "; outside the validity window";
    throw solver_error(os.str());
  }
  const double spread = std::max(std::abs(roots[0]), std::abs(roots[2]));
  if (roots[1] - roots[0] < 1e-9 * spread || roots[2] - roots[1] < 1e-9 * spread)
    throw solver_error("Kufarev cubic roots coalesce; boundary of the validity window");
  const double x = roots[1];
  if (!(x > 0.0) || !(x < 1.0)) {
    std::ostringstream os;
    os << "Kufarev middle root " << x << " is not in (0, 1)";
    throw solver_error(os.str());
  }
  KufarevMap m;
  m.a = a;
  m.R = R;
  m.r = r;
  m.q = q;
  m.t = t;
  m.cubic_roots = {roots[0], roots[1], roots[2]};
  m.alpha = std::sqrt(x);
  const double aa = a * m.alpha;
  m.gamma = 0.5 * (aa + k / aa);
  m.beta = 0.5 * (1.0 - x) * (aa - k / aa);
  const UnivalenceReport report = univalence_check(m);
  if (!report.univalent) {
    std::ostringstream os;
    os << "Kufarev map at t = " << t << " is not univalent: " << report.reason;
    throw solver_error(os.str());
  }
  return m;
}

}  // namespace hsb::conformal
