#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "field_internal.hpp"
#include "hsb/error.hpp"
#include "hsb/evolution.hpp"

namespace hsb::evolution {

namespace {

constexpr double kPi = std::numbers::pi;

double dot(Point a, Point b) { return a.real() * b.real() + a.imag() * b.imag(); }

// Weights of the periodic log-kernel product rule on N equispaced nodes,
// indexed by the node offset.
const std::vector<double>& log_weights(std::size_t n_nodes) {
  static std::mutex mutex;
  static std::map<std::size_t, std::vector<double>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n_nodes);
  if (it != cache.end()) return it->second;
  const std::size_t n = n_nodes / 2;
  const double nn = static_cast<double>(n_nodes);
  std::vector<double> r(n_nodes, 0.0);
  for (std::size_t k = 0; k < n_nodes; ++k) {
    const double t = 2.0 * kPi * static_cast<double>(k) / nn;
    double s = 0.0;
    for (std::size_t m = 1; m < n; ++m) s += std::cos(static_cast<double>(m) * t) / static_cast<double>(m);
    r[k] = -(4.0 * kPi / nn) * s - (4.0 * kPi / (nn * nn)) * std::cos(static_cast<double>(n) * t);
  }
  return cache.emplace(n_nodes, std::move(r)).first->second;
}

}  // namespace

namespace detail {

CurveGeometry analyze_curve(const std::vector<Point>& z, double filter_level) {
  const std::size_t n = z.size();
  if (n < 8 || n % 2 != 0) throw geometry_error("field solver needs an even node count >= 8");
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> in(z.begin(), z.end());
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, in);
  double biggest = 0.0;
  for (std::size_t k = 1; k < n; ++k) biggest = std::max(biggest, std::abs(spec[k]));
  std::vector<std::complex<double>> d1(n), d2(n);
  const std::complex<double> I(0.0, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> c = spec[k];
    if (std::abs(c) < filter_level * biggest) c = 0.0;
    double m = k < n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
    if (k == n / 2) {
      d1[k] = 0.0;
      d2[k] = -m * m * c;
      continue;
    }
    d1[k] = I * m * c;
    d2[k] = -m * m * c;
  }
  std::vector<std::complex<double>> zp, zpp;
  fft.inv(zp, d1);
  fft.inv(zpp, d2);
  CurveGeometry g;
  g.nodes = z;
  g.speed.resize(n);
  g.normal.resize(n);
  g.curvature.resize(n);
  g.weight.resize(n);
  g.area_weight.resize(n);
  const double dt = 2.0 * kPi / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = std::abs(zp[j]);
    if (!(s > 0.0)) throw geometry_error("degenerate parametrization (zero speed)");
    g.speed[j] = s;
    const Point tangent = zp[j] / s;
    g.normal[j] = Point(tangent.imag(), -tangent.real());
    g.curvature[j] = (zp[j].real() * zpp[j].imag() - zp[j].imag() * zpp[j].real()) / (s * s * s);
    g.weight[j] = s * dt;
    const Point prev = z[(j + n - 1) % n];
    const Point next = z[(j + 1) % n];
    // d(area)/d(z_j) = J (z_{j+1} - z_{j-1}) / 2 for a counterclockwise polygon.
    const Point grad(0.5 * (next.imag() - prev.imag()), 0.5 * (prev.real() - next.real()));
    g.area_weight[j] = dot(g.normal[j], grad);
  }
  return g;
}

double self_single_layer(const CurveGeometry& g, const double* density, std::size_t i) {
  const std::size_t n = g.nodes.size();
  const auto& r = log_weights(n);
  const double nn = static_cast<double>(n);
  double sum_r = 0.0, sum_m = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double phi = density[k] * g.speed[k];
    const std::size_t off = (i + n - k) % n;
    sum_r += r[off] * phi;
    double m;
    if (k == i) {
      m = std::log(g.speed[i] * g.speed[i]);
    } else {
      const double half = kPi * static_cast<double>(off) / nn;
      const double s = std::sin(half);
      m = std::log(std::norm(g.nodes[i] - g.nodes[k]) / (4.0 * s * s));
    }
    sum_m += m * phi;
  }
  const double integral = 0.5 * sum_r + 0.5 * (2.0 * kPi / nn) * sum_m;
  return integral / (2.0 * kPi);
}

double cross_single_layer(const CurveGeometry& g, const double* density, Point p) {
  double s = 0.0;
  for (std::size_t k = 0; k < g.nodes.size(); ++k) s += g.weight[k] * density[k] * std::log(std::abs(p - g.nodes[k]));
  return s / (2.0 * kPi);
}

}  // namespace detail

FluxSpec FluxSpec::free_flux(double q) {
  FluxSpec f;
  f.mode = Mode::free;
  f.q_total = q;
  return f;
}

FluxSpec FluxSpec::regulated(double q1, double q2) {
  FluxSpec f;
  f.mode = Mode::regulated;
  f.q1 = q1;
  f.q2 = q2;
  f.q_total = q1 + q2;
  return f;
}

void FluxSpec::validate(std::size_t bubble_count) const {
  if (mode == Mode::free) {
    if (!(q_total >= 0.0) || !std::isfinite(q_total)) throw validation_error("flux.q must be a nonnegative number");
  } else {
    if (bubble_count != 2) throw validation_error("regulated mode needs exactly two bubbles");
    if (!(q1 >= 0.0) || !(q2 >= 0.0) || !std::isfinite(q1) || !std::isfinite(q2))
      throw validation_error("regulated rates q1, q2 must be nonnegative");
  }
}

void Numerics::validate() const {
  auto in = [](double v, double lo, double hi, const char* name) {
    if (!(v >= lo && v <= hi)) {
      std::ostringstream os;
      os << "numerics." << name << " = " << v << " outside [" << lo << ", " << hi << "]";
      throw validation_error(os.str());
    }
  };
  in(h_factor, 1e-3, 0.1, "h_factor");
  in(dt_factor, 1e-3, 0.5, "dt_factor");
  in(vanish_factor, 1.0, 10.0, "vanish_factor");
  in(clearance_factor, 1.0, 10.0, "clearance_factor");
  in(cusp_curvature, 5.0, 1e4, "cusp_curvature");
  in(cusp_rcond_drop, 10.0, 1e12, "cusp_rcond_drop");
  if (max_events < 1 || max_events > 64) throw validation_error("numerics.max_events must be in [1, 64]");
  if (max_steps < 1) throw validation_error("numerics.max_steps must be positive");
  if (min_nodes < 16) throw validation_error("numerics.min_nodes must be at least 16");
}

double FieldSolution::phi(Point p) const {
  for (std::size_t b = 0; b < nodes.size(); ++b)
    if (geometry::contains(nodes[b], p)) return constants[b];
  double s = 0.0;
  for (std::size_t b = 0; b < nodes.size(); ++b)
    for (std::size_t k = 0; k < nodes[b].size(); ++k)
      s += weights[b][k] * velocity[b][k] * std::log(std::abs(p - nodes[b][k]));
  return s / (2.0 * kPi) + far_constant;
}

FieldSolution solve_field(const BubbleSystem& system, const FluxSpec& flux, const Numerics& numerics) {
  const std::size_t m = system.bubbles.size();
  if (m == 0) throw validation_error("solve_field needs at least one bubble");
  flux.validate(m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      if (geometry::curve_separation(system.bubbles[a].boundary.vertices, system.bubbles[b].boundary.vertices) <= 0.0)
        throw geometry_error("bubbles touch; the exterior field is undefined");

  std::vector<detail::CurveGeometry> geo;
  geo.reserve(m);
  std::vector<std::size_t> offset(m + 1, 0);
  for (std::size_t b = 0; b < m; ++b) {
    geo.push_back(detail::analyze_curve(system.bubbles[b].boundary.vertices, numerics.filter_level));
    offset[b + 1] = offset[b] + geo.back().nodes.size();
  }
  const std::size_t nt = offset[m];
  const std::size_t dim = nt + m;

  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t bi = 0; bi < m; ++bi) {
    const auto& gi = geo[bi];
    for (std::size_t i = 0; i < gi.nodes.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(offset[bi] + i);
      const Point x = gi.nodes[i];
      const Point nx = gi.normal[i];
      for (std::size_t bj = 0; bj < m; ++bj) {
        const auto& gj = geo[bj];
        for (std::size_t j = 0; j < gj.nodes.size(); ++j) {
          const auto col = static_cast<Eigen::Index>(offset[bj] + j);
          double k;
          if (bi == bj && i == j) {
            k = gi.curvature[i] / (4.0 * kPi);
          } else {
            const Point d = x - gj.nodes[j];
            k = dot(d, nx) / (2.0 * kPi * std::norm(d));
          }
          mat(row, col) = k * gj.weight[j];
        }
      }
      mat(row, row) -= 0.5;
      mat(row, static_cast<Eigen::Index>(nt + bi)) = 1.0;
    }
    for (std::size_t j = 0; j < gi.nodes.size(); ++j)
      mat(static_cast<Eigen::Index>(nt + bi), static_cast<Eigen::Index>(offset[bi] + j)) = numerics.polygon_flux ? gi.area_weight[j] : gi.weight[j];
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(mat);
  FieldSolution sol;
  sol.rcond = lu.rcond();
  if (!(sol.rcond > numerics.min_rcond)) {
    std::ostringstream os;
    os << "boundary integral system is ill-conditioned (rcond estimate " << sol.rcond << ")";
    throw solver_error(os.str());
  }
  // One basis solve per bubble: unit extraction from bubble c.
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(m));
  for (std::size_t c = 0; c < m; ++c) rhs(static_cast<Eigen::Index>(nt + c), static_cast<Eigen::Index>(c)) = -1.0;
  const Eigen::MatrixXd basis = lu.solve(rhs);

  // P(j, c): single-layer value of basis c on boundary j.
  Eigen::MatrixXd P(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t c = 0; c < m; ++c) {
    const double* col = basis.col(static_cast<Eigen::Index>(c)).data();
    for (std::size_t bj = 0; bj < m; ++bj) {
      const auto& gj = geo[bj];
      double acc = 0.0, wsum = 0.0;
      for (std::size_t i = 0; i < gj.nodes.size(); ++i) {
        double v = detail::self_single_layer(gj, col + offset[bj], i);
        for (std::size_t bl = 0; bl < m; ++bl) {
          if (bl == bj) continue;
          v += detail::cross_single_layer(geo[bl], col + offset[bl], gj.nodes[i]);
        }
        acc += gj.weight[i] * v;
        wsum += gj.weight[i];
      }
      P(static_cast<Eigen::Index>(bj), static_cast<Eigen::Index>(c)) = acc / wsum;
    }
  }

  Eigen::VectorXd q(static_cast<Eigen::Index>(m));
  if (flux.mode == FluxSpec::Mode::free) {
    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m + 1), static_cast<Eigen::Index>(m + 1));
    sys.topLeftCorner(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)) = P;
    for (std::size_t j = 0; j < m; ++j) {
      sys(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(m)) = -1.0;
      sys(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(j)) = 1.0;
    }
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m + 1));
    b(static_cast<Eigen::Index>(m)) = flux.q_total;
    const Eigen::VectorXd x = sys.fullPivLu().solve(b);
    q = x.head(static_cast<Eigen::Index>(m));
    sol.far_constant = -x(static_cast<Eigen::Index>(m));
    sol.constants.assign(m, 0.0);
  } else {
    q(0) = flux.q1;
    q(1) = flux.q2;
    sol.far_constant = 0.0;
    const Eigen::VectorXd c = P * q;
    sol.constants.assign(c.data(), c.data() + m);
  }
  const Eigen::VectorXd sigma = basis * q;

  sol.fluxes.assign(q.data(), q.data() + m);
  for (std::size_t b = 0; b < m; ++b) {
    const auto& g = geo[b];
    sol.nodes.push_back(g.nodes);
    sol.normals.push_back(g.normal);
    sol.weights.push_back(g.weight);
    sol.curvature.push_back(g.curvature);
    std::vector<double> v(g.nodes.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = sigma(static_cast<Eigen::Index>(offset[b] + i));
    sol.velocity.push_back(std::move(v));
  }
  return sol;
}

}  // namespace hsb::evolution
