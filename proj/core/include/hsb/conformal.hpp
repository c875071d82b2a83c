#pragma once

// Exact-solution track: finite conformal maps from the unit disk onto bubble
// exteriors (0 -> infinity), the explicit families, and the limit curves.

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "hsb/geometry.hpp"

namespace hsb::conformal {

using geometry::BoundaryCurve;
using geometry::Point;

// f(zeta) = A / zeta + sum_k coeffs[k] zeta^k.
struct LaurentMap {
  double A = 1.0;
  std::vector<std::complex<double>> coeffs;
  // Set by exact_family when the parameters collapse the bubble (slit).
  bool degenerate = false;

  Point operator()(Point zeta) const;
  Point derivative(Point zeta) const;
};

// f(zeta) = (beta / alpha) / (1 - alpha zeta) + gamma / zeta, the exterior of
// the larger of two disks after the smaller one has been absorbed.
struct KufarevMap {
  double a = 0.0, R = 0.0, r = 0.0, q = 0.0, t = 0.0;
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  // Middle root alpha^2 and its neighbours, ascending.
  std::array<double, 3> cubic_roots{};

  Point operator()(Point zeta) const;
  Point derivative(Point zeta) const;
};

// Samples f(e^{i theta}) at `count` uniform angles, counterclockwise around
// the bubble. Sets `degenerate` when the trace encloses no area.
BoundaryCurve trace_boundary(const LaurentMap& map, std::size_t count);
BoundaryCurve trace_boundary(const KufarevMap& map, std::size_t count);

struct UnivalenceReport {
  bool univalent = true;
  Point failure;        // zero of f' or self-intersection vertex
  std::string reason;
};
UnivalenceReport univalence_check(const LaurentMap& map);
UnivalenceReport univalence_check(const KufarevMap& map);

// pi (A^2 - sum k |a_k|^2); throws for non-univalent maps.
double map_area(const LaurentMap& map);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

// Q_n(u) = sum_{k=0}^{n} C(2k, k) / 4^k * u^(n-k); coeffs[j] multiplies u^j.
struct QPolynomial {
  int n = 0;
  std::vector<Rational> coeffs;
  double operator()(double u) const;
};
QPolynomial qn(int n);

// y^2 = (beta - n alpha^2)^2 (1 - x^2) Q_{n-1}(x^2)^2, traced through
// x = cos(theta).
BoundaryCurve limit_curve(int n, double beta, double alpha, std::size_t count = 1024);
// y^2 = beta^2 (x + 1/2)^3 (3/2 - x) via x = cos(theta) + 1/2,
// y = -beta sin(theta) (1 + cos(theta)); cusp at (-1/2, 0).
BoundaryCurve saddle_node_curve(double beta, std::size_t count = 1024);

enum class Family { quartic, saddle };
std::string to_string(Family family);

// quartic: A/zeta + A/(1 + 6 beta A^2) zeta - 2 beta A^3 zeta^3
//   (Cauchy transform h(z) = z - 2 beta z^3);
// saddle:  A/zeta + A + (A - 4 beta A^2) zeta - 2 beta A^2 zeta^2
//   (h(z) = K + z - 2 beta z^2, f'(-1) = 0).
LaurentMap exact_family(Family family, double A, double beta);
// Constant term of the saddle family's Cauchy transform.
double saddle_family_constant(double A, double beta);

// Real roots of c3 x^3 + c2 x^2 + c1 x + c0, ascending, Newton-polished.
std::vector<double> real_cubic_roots(double c3, double c2, double c1, double c0);
// Coefficients (c3, c2, c1, c0) of the alpha^2 cubic.
std::array<double, 4> kufarev_cubic(double a, double R, double r, double q, double t);
KufarevMap kufarev_solve(double a, double R, double r, double q, double t);

// l2 mass of the non-positive Fourier modes of conj(f) - h(f) on |zeta| = 1;
// h_poly[k] multiplies z^k.
double richardson_residual(const LaurentMap& map, const std::vector<std::complex<double>>& h_poly);

}  // namespace hsb::conformal
