#include "spline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "hsb/error.hpp"

namespace hsb::detail {

namespace {

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 8> kGaussNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

std::vector<Point> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                                     std::vector<double> upper, std::vector<Point> rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  std::vector<Point> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
  return x;
}

}  // namespace

std::vector<Point> solve_cyclic_tridiagonal(const std::vector<double>& lower,
                                            const std::vector<double>& diag,
                                            const std::vector<double>& upper,
                                            const std::vector<Point>& rhs) {
  const std::size_t n = diag.size();
  if (n < 3) throw geometry_error("cyclic tridiagonal system needs at least 3 unknowns");
  // Sherman-Morrison on the corner entries.
  const double gamma = -diag[0];
  const double alpha = upper[n - 1];  // A[n-1][0]
  const double beta = lower[0];       // A[0][n-1]
  std::vector<double> d = diag;
  d[0] -= gamma;
  d[n - 1] -= alpha * beta / gamma;
  std::vector<Point> x = solve_tridiagonal(lower, d, upper, rhs);
  std::vector<Point> u(n, Point(0.0));
  u[0] = gamma;
  u[n - 1] = alpha;
  std::vector<Point> z = solve_tridiagonal(lower, d, upper, u);
  const Point num = x[0] + beta * x[n - 1] / gamma;
  const Point den = 1.0 + z[0] + beta * z[n - 1] / gamma;
  const Point fact = num / den;
  for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
  return x;
}

PeriodicSpline::PeriodicSpline(std::span<const Point> nodes) : values_(nodes.begin(), nodes.end()) {
  const std::size_t n = values_.size();
  if (n < 3) throw geometry_error("spline needs at least 3 nodes");
  knots_.resize(n + 1);
  knots_[0] = 0.0;
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) {
    h[i] = std::abs(values_[(i + 1) % n] - values_[i]);
    if (!(h[i] > 0.0)) throw geometry_error("spline nodes must be distinct");
    knots_[i + 1] = knots_[i] + h[i];
  }
  std::vector<double> lower(n), diag(n), upper(n);
  std::vector<Point> rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t im = (i + n - 1) % n;
    const std::size_t ip = (i + 1) % n;
    lower[i] = h[im];
    diag[i] = 2.0 * (h[im] + h[i]);
    upper[i] = h[i];
    rhs[i] = 6.0 * ((values_[ip] - values_[i]) / h[i] - (values_[i] - values_[im]) / h[im]);
  }
  second_ = solve_cyclic_tridiagonal(lower, diag, upper, rhs);
}

Point PeriodicSpline::value_local(std::size_t i, double t) const {
  const std::size_t n = values_.size();
  const std::size_t ip = (i + 1) % n;
  const double h = knots_[i + 1] - knots_[i];
  const double a = h - t;
  return second_[i] * (a * a * a) / (6.0 * h) + second_[ip] * (t * t * t) / (6.0 * h) +
         (values_[i] / h - second_[i] * h / 6.0) * a + (values_[ip] / h - second_[ip] * h / 6.0) * t;
}

Point PeriodicSpline::derivative_local(std::size_t i, double t) const {
  const std::size_t n = values_.size();
  const std::size_t ip = (i + 1) % n;
  const double h = knots_[i + 1] - knots_[i];
  const double a = h - t;
  return -second_[i] * (a * a) / (2.0 * h) + second_[ip] * (t * t) / (2.0 * h) -
         (values_[i] / h - second_[i] * h / 6.0) + (values_[ip] / h - second_[ip] * h / 6.0);
}

Point PeriodicSpline::value(double s) const {
  const double L = period();
  s = std::fmod(s, L);
  if (s < 0.0) s += L;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
  std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - knots_.begin()) - 1));
  i = std::min(i, values_.size() - 1);
  return value_local(i, s - knots_[i]);
}

Point PeriodicSpline::derivative(double s) const {
  const double L = period();
  s = std::fmod(s, L);
  if (s < 0.0) s += L;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
  std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - knots_.begin()) - 1));
  i = std::min(i, values_.size() - 1);
  return derivative_local(i, s - knots_[i]);
}

double PeriodicSpline::partial_arc(std::size_t i, double t) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < kGaussNodes.size(); ++k) {
    const double tk = 0.5 * t * (kGaussNodes[k] + 1.0);
    sum += kGaussWeights[k] * std::abs(derivative_local(i, tk));
  }
  return 0.5 * t * sum;
}

double PeriodicSpline::segment_arc(std::size_t i) const { return partial_arc(i, knots_[i + 1] - knots_[i]); }

}  // namespace hsb::detail
