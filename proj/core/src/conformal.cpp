#include "hsb/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/Polynomials>

#include "hsb/error.hpp"

namespace hsb::conformal {

namespace {

using cd = std::complex<double>;

// Winding number of g around 0 along |zeta| = radius.
int winding_number(const std::function<cd(cd)>& g, double radius, int samples = 4096) {
  double total = 0.0;
  cd prev = g(cd(radius, 0.0));
  for (int k = 1; k <= samples; ++k) {
    const double t = 2.0 * std::numbers::pi * k / samples;
    const cd cur = g(std::polar(radius, t));
    total += std::arg(cur / prev);
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

bool first_self_intersection(const std::vector<Point>& v, Point& where) {
  const std::size_t n = v.size();
  auto cross = [](Point a, Point b) { return a.real() * b.imag() - a.imag() * b.real(); };
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = v[i], b = v[(i + 1) % n];
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      const Point c = v[j], d = v[(j + 1) % n];
      const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
      const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
      if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0))) {
        where = a;
        return true;
      }
      if (c == a || d == a) {
        where = a;
        return true;
      }
    }
  }
  return false;
}

UnivalenceReport check_trace_and_zeros(const BoundaryCurve& trace, const std::function<cd(cd)>& g,
                                       const std::vector<cd>& poly_low_to_high) {
  UnivalenceReport report;
  if (trace.degenerate || geometry::signed_area(trace.vertices) <= 0.0) {
    report.univalent = false;
    report.failure = trace.vertices.front();
    report.reason = "traced boundary encloses no area";
    return report;
  }
  if (!geometry::is_simple(trace.vertices)) {
    report.univalent = false;
    Point where = trace.vertices.front();
    first_self_intersection(trace.vertices, where);
    report.failure = where;
    report.reason = "traced boundary self-intersects";
    return report;
  }
  const int inner = winding_number(g, 0.2);
  const int outer = winding_number(g, 1.0 - 1e-6);
  if (inner != 0 || outer != 0) {
    report.univalent = false;
    report.reason = "derivative vanishes inside the unit disk";
    // Locate a zero for the report.
    std::vector<cd> c = poly_low_to_high;
    while (c.size() > 1 && std::abs(c.back()) == 0.0) c.pop_back();
    if (c.size() >= 2) {
      Eigen::VectorXcd coeffs(c.size());
      for (std::size_t k = 0; k < c.size(); ++k) coeffs(k) = c[k];
      Eigen::PolynomialSolver<cd, Eigen::Dynamic> solver(coeffs);
      double best = 1e300;
      for (Eigen::Index k = 0; k < solver.roots().size(); ++k) {
        const cd z = solver.roots()(k);
        if (std::abs(z) < best) {
          best = std::abs(z);
          report.failure = z;
        }
      }
    }
    return report;
  }
  return report;
}

}  // namespace

Point LaurentMap::operator()(Point zeta) const {
  cd sum = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) sum = sum * zeta + coeffs[k];
  return A / zeta + sum;
}

Point LaurentMap::derivative(Point zeta) const {
  cd sum = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 1;) sum = sum * zeta + static_cast<double>(k) * coeffs[k];
  return -A / (zeta * zeta) + sum;
}

Point KufarevMap::operator()(Point zeta) const {
  return (beta / alpha) / (1.0 - alpha * zeta) + gamma / zeta;
}

Point KufarevMap::derivative(Point zeta) const {
  const cd d = 1.0 - alpha * zeta;
  return beta / (d * d) - gamma / (zeta * zeta);
}

namespace {

template <class Map>
BoundaryCurve trace_any(const Map& map, std::size_t count) {
  if (count < 64) throw validation_error("trace_boundary needs at least 64 samples");
  BoundaryCurve c;
  c.vertices.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
    const Point z = map(std::polar(1.0, t));
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw validation_error("conformal map is not finite");
    c.vertices[k] = z;
  }
  const double area = geometry::signed_area(c.vertices);
  const double len = geometry::perimeter(c.vertices);
  if (std::abs(area) <= 1e-12 * len * len) {
    c.degenerate = true;
    return c;
  }
  if (area < 0.0) std::reverse(c.vertices.begin(), c.vertices.end());
  return c;
}

}  // namespace

BoundaryCurve trace_boundary(const LaurentMap& map, std::size_t count) {
  if (!std::isfinite(map.A)) throw validation_error("map coefficient A is not finite");
  for (const auto& a : map.coeffs)
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) throw validation_error("map coefficients are not finite");
  BoundaryCurve c = trace_any(map, count);
  if (map.degenerate) c.degenerate = true;
  return c;
}

BoundaryCurve trace_boundary(const KufarevMap& map, std::size_t count) {
  if (!std::isfinite(map.alpha) || !std::isfinite(map.beta) || !std::isfinite(map.gamma) || map.alpha == 0.0)
    throw validation_error("Kufarev map coefficients are not finite");
  return trace_any(map, count);
}

UnivalenceReport univalence_check(const LaurentMap& map) {
  if (map.degenerate) {
    UnivalenceReport r;
    r.univalent = false;
    r.reason = "degenerate (slit) map";
    return r;
  }
  const BoundaryCurve trace = trace_boundary(map, 2048);
  // zeta^2 f'(zeta) = -A + sum_k k a_k zeta^(k+1)
  std::vector<cd> poly(map.coeffs.size() + 1, 0.0);
  poly[0] = -map.A;
  for (std::size_t k = 1; k < map.coeffs.size(); ++k) poly[k + 1] = static_cast<double>(k) * map.coeffs[k];
  auto g = [&poly](cd z) {
    cd s = 0.0;
    for (std::size_t k = poly.size(); k-- > 0;) s = s * z + poly[k];
    return s;
  };
  return check_trace_and_zeros(trace, g, poly);
}

UnivalenceReport univalence_check(const KufarevMap& map) {
  const BoundaryCurve trace = trace_boundary(map, 2048);
  // zeta^2 (1 - alpha zeta)^2 f'(zeta) = beta zeta^2 - gamma (1 - alpha zeta)^2
  const double a = map.alpha;
  std::vector<cd> poly = {-map.gamma, 2.0 * map.gamma * a, map.beta - map.gamma * a * a};
  auto g = [&poly](cd z) { return poly[0] + z * (poly[1] + z * poly[2]); };
  return check_trace_and_zeros(trace, g, poly);
}

double map_area(const LaurentMap& map) {
  const UnivalenceReport report = univalence_check(map);
  if (!report.univalent) throw geometry_error("map_area: map is not univalent (" + report.reason + ")");
  double s = map.A * map.A;
  for (std::size_t k = 1; k < map.coeffs.size(); ++k) s -= static_cast<double>(k) * std::norm(map.coeffs[k]);
  return std::numbers::pi * s;
}

double QPolynomial::operator()(double u) const {
  double s = 0.0;
  for (std::size_t j = coeffs.size(); j-- > 0;) s = s * u + coeffs[j].value();
  return s;
}

QPolynomial qn(int n) {
  if (n < 0 || n > 12) throw validation_error("qn: n must be in [0, 12]");
  QPolynomial q;
  q.n = n;
  q.coeffs.assign(static_cast<std::size_t>(n) + 1, Rational{});
  for (int k = 0; k <= n; ++k) {
    // C(2k, k) / 4^k
    std::int64_t c = 1;
    for (int j = 1; j <= k; ++j) c = c * (k + j) / j;
    std::int64_t den = std::int64_t{1} << (2 * k);
    const std::int64_t g = std::gcd(c, den);
    q.coeffs[static_cast<std::size_t>(n - k)] = Rational{c / g, den / g};
  }
  return q;
}

BoundaryCurve limit_curve(int n, double beta, double alpha, std::size_t count) {
  if (n < 1) throw validation_error("limit_curve needs n >= 1");
  const double amp = beta - n * alpha * alpha;
  if (!(amp > 0.0)) throw validation_error("limit_curve needs beta - n alpha^2 > 0");
  const QPolynomial q = qn(n - 1);
  BoundaryCurve c;
  c.vertices.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
    const double x = std::cos(t);
    c.vertices[k] = Point(x, amp * std::sin(t) * q(x * x));
  }
  return c;
}

BoundaryCurve saddle_node_curve(double beta, std::size_t count) {
  if (!(beta > 0.0)) throw validation_error("saddle_node_curve needs beta > 0");
  return geometry::make_parametric(
      [beta](double t) { return Point(std::cos(t) + 0.5, -beta * std::sin(t) * (1.0 + std::cos(t))); }, count);
}

std::string to_string(Family family) { return family == Family::quartic ? "quartic" : "saddle"; }

double saddle_family_constant(double A, double beta) { return 6.0 * beta * A * A - 16.0 * beta * beta * A * A * A; }

LaurentMap exact_family(Family family, double A, double beta) {
  if (!(A > 0.0) || !std::isfinite(A)) throw validation_error("exact_family needs A > 0");
  if (!std::isfinite(beta) || beta < 0.0) throw validation_error("exact_family needs beta >= 0");
  LaurentMap m;
  m.A = A;
  if (family == Family::quartic) {
    m.coeffs = {0.0, A / (1.0 + 6.0 * beta * A * A), 0.0, -2.0 * beta * A * A * A};
    if (beta == 0.0) {
      m.degenerate = true;
      return m;
    }
  } else {
    m.coeffs = {A, A - 4.0 * beta * A * A, -2.0 * beta * A * A};
    if (beta == 0.0) {
      m.degenerate = true;
      return m;
    }
  }
  const UnivalenceReport r = univalence_check(m);
  if (!r.univalent) {
    std::ostringstream os;
    os << to_string(family) << " family is not univalent at A = " << A << ", beta = " << beta << ": " << r.reason;
    throw geometry_error(os.str());
  }
  return m;
}

std::vector<double> real_cubic_roots(double c3, double c2, double c1, double c0) {
  std::vector<double> roots;
  if (c3 == 0.0) {
    if (c2 == 0.0) {
      if (c1 != 0.0) roots.push_back(-c0 / c1);
      return roots;
    }
    const double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc < 0.0) return roots;
    const double s = std::sqrt(disc);
    const double qq = -0.5 * (c1 + std::copysign(s, c1));
    if (qq != 0.0) roots.push_back(qq / c2);
    if (qq != 0.0) roots.push_back(c0 / qq);
    else roots.push_back(0.0);
    std::sort(roots.begin(), roots.end());
    return roots;
  }
  const double a = c2 / c3, b = c1 / c3, c = c0 / c3;
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double disc = -(4.0 * p * p * p + 27.0 * q * q);
  if (disc > 0.0) {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) roots.push_back(m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) - a / 3.0);
  } else {
    const double s = std::sqrt(std::max(0.25 * q * q + p * p * p / 27.0, 0.0));
    const double y = std::cbrt(-0.5 * q + s) + std::cbrt(-0.5 * q - s);
    roots.push_back(y - a / 3.0);
  }
  for (double& x : roots) {
    for (int it = 0; it < 4; ++it) {
      const double f = ((c3 * x + c2) * x + c1) * x + c0;
      const double df = (3.0 * c3 * x + 2.0 * c2) * x + c1;
      if (df == 0.0) break;
      x -= f / df;
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

double richardson_residual(const LaurentMap& map, const std::vector<std::complex<double>>& h_poly) {
  const int m = 1024;
  std::vector<cd> g(m);
  for (int k = 0; k < m; ++k) {
    const cd zeta = std::polar(1.0, 2.0 * std::numbers::pi * k / m);
    const cd z = map(zeta);
    cd h = 0.0;
    for (std::size_t j = h_poly.size(); j-- > 0;) h = h * z + h_poly[j];
    g[k] = std::conj(z) - h;
  }
  Eigen::FFT<double> fft;
  std::vector<cd> spectrum;
  fft.fwd(spectrum, g);
  double mass = std::norm(spectrum[0]);
  for (int k = m / 2; k < m; ++k) mass += std::norm(spectrum[k]);
  return std::sqrt(mass) / m;
}

}  // namespace hsb::conformal
