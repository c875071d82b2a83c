#pragma once

#include <complex>
#include <span>
#include <vector>

namespace hsb::detail {

using Point = std::complex<double>;

// Periodic C2 cubic spline through closed-polyline nodes, parametrized by
// cumulative chord length.
class PeriodicSpline {
 public:
  explicit PeriodicSpline(std::span<const Point> nodes);

  double period() const { return knots_.back(); }
  std::size_t segments() const { return values_.size(); }
  double knot(std::size_t i) const { return knots_[i]; }

  Point value(double s) const;
  Point derivative(double s) const;

  // Arc length of segment i (Gauss-Legendre).
  double segment_arc(std::size_t i) const;
  // Arc length from the start of segment i to local parameter t in [0, h_i].
  double partial_arc(std::size_t i, double t) const;

  Point value_local(std::size_t i, double t) const;
  Point derivative_local(std::size_t i, double t) const;

 private:
  std::vector<double> knots_;   // size n + 1, knots_[0] = 0
  std::vector<Point> values_;   // size n
  std::vector<Point> second_;   // size n, second derivatives at knots
};

// Solves the cyclic tridiagonal system
//   lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]  (indices mod n).
std::vector<Point> solve_cyclic_tridiagonal(const std::vector<double>& lower,
                                            const std::vector<double>& diag,
                                            const std::vector<double>& upper,
                                            const std::vector<Point>& rhs);

}  // namespace hsb::detail
