#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "hsb/analysis.hpp"
#include "hsb/error.hpp"

namespace hsb::analysis {

namespace {

constexpr double kPi = std::numbers::pi;

int index_of(const BubbleSystem& s, int label) {
  for (std::size_t i = 0; i < s.bubbles.size(); ++i)
    if (s.bubbles[i].label == label) return static_cast<int>(i);
  return -1;
}

const evolution::Event* disappearance_of(const Trajectory& traj, int label) {
  for (const auto& e : traj.events)
    if (e.kind == evolution::Event::Kind::disappearance && !e.labels.empty() && e.labels.front() == label) return &e;
  return nullptr;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? std::numeric_limits<double>::quiet_NaN() : s / static_cast<double>(v.size());
}

}  // namespace

double FitReport::parameter(const std::string& name) const {
  for (const auto& [k, v] : parameters)
    if (k == name) return v;
  return std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------------------
// Logarithmic slowdown

FitReport fit_logslow(const Trajectory& traj, int label, int n, double tolerance) {
  if (n < 1) throw validation_error("fit_logslow needs n >= 1");
  const evolution::Event* ev = disappearance_of(traj, label);
  if (!ev) throw validation_error("fit_logslow: the bubble never disappears in this trajectory");
  const double t_prime = ev->extrapolated_time;

  // Surviving domain E at the partial-contraction time.
  const geometry::Bubble* survivor = nullptr;
  for (const auto& s : traj.snapshots) {
    if (s.time < ev->time - 1e-12 || s.find(label) != nullptr) continue;
    for (const auto& b : s.bubbles)
      if (!survivor || geometry::area(b.boundary) > geometry::area(survivor->boundary)) survivor = &b;
    break;
  }
  if (!survivor) throw validation_error("fit_logslow: no surviving bubble after the disappearance");
  const GreensData gd = greens_data(survivor->boundary, ev->location);
  const double b = gd.b;
  const double log_b = std::log(b);

  struct Row {
    double tau, A, Q, q;
  };
  std::vector<Row> rows;
  // Below a few vanish areas the bubble is under-resolved.
  const double min_area = 4.0 * std::pow(3.0 * traj.h, 2);
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const auto& s = traj.snapshots[i];
    const int k = index_of(s, label);
    if (k < 0 || i >= traj.fluxes.size()) continue;
    const double tau = t_prime - s.time;
    const double A = geometry::area(s.bubbles[static_cast<std::size_t>(k)].boundary);
    if (!(tau > 0.0) || A < min_area) continue;
    double q = 0.0;
    for (double f : traj.fluxes[i]) q += f;
    rows.push_back({tau, A, traj.fluxes[i][static_cast<std::size_t>(k)], q});
  }
  if (rows.size() < 3) throw validation_error("fit_logslow: too few resolved snapshots near the partial contraction");
  double tau_lo = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) tau_lo = std::min(tau_lo, r.tau);
  const double tau_hi = 10.0 * tau_lo;

  FitReport rep;
  rep.model = "Q log(tau) / (2 n q log b) -> 1";
  rep.tolerance = tolerance;
  std::vector<double> ratio_q, ratio_a, ratio_q_log_a, ratio_next;
  const double gamma = std::log(gd.derivative / (1.0 - b * b));
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    const Row& r = *it;
    if (r.tau > tau_hi) continue;
    const double denom = 2.0 * n * r.q * log_b;
    ratio_q.push_back(r.Q * std::log(r.tau) / denom);
    ratio_a.push_back(r.A * std::log(r.tau) / (denom * r.tau));
    ratio_q_log_a.push_back(r.Q * std::log(r.A) / denom);
    ratio_next.push_back(r.Q * (0.5 * std::log(r.A / kPi) + gamma) / (n * r.q * log_b));
    rep.abscissa.push_back(r.tau);
    rep.residuals.push_back(std::abs(ratio_q.back() - 1.0));
  }
  rep.parameters = {{"b", b},
                    {"log_b", log_b},
                    {"t_prime", t_prime},
                    {"tau_lo", tau_lo},
                    {"tau_hi", tau_hi},
                    {"points", static_cast<double>(ratio_q.size())},
                    {"ratio_Q_mean", mean(ratio_q)},
                    {"ratio_A_mean", mean(ratio_a)},
                    {"ratio_Q_logA_mean", mean(ratio_q_log_a)},
                    {"zeta_derivative", gd.derivative},
                    {"ratio_Q_next_order_mean", mean(ratio_next)},
                    {"ratio_Q_next_order_last", ratio_next.empty() ? std::numeric_limits<double>::quiet_NaN() : ratio_next.back()}};
  rep.pass = ratio_q.size() >= 3 &&
             std::all_of(rep.residuals.begin(), rep.residuals.end(), [&](double r) { return r <= tolerance; });
  std::ostringstream os;
  os << "decade tau in [" << tau_lo << ", " << tau_hi << "], " << ratio_q.size() << " snapshots";
  rep.note = os.str();
  return rep;
}

// ---------------------------------------------------------------------------
// Ellipse asymptotics

FitReport fit_ellipse_asymptotics(const Trajectory& traj, Point point, const Eigen::Matrix2d& hessian,
                                  std::size_t count) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(0.5 * (hessian + hessian.transpose()));
  const Eigen::Vector2d lam = es.eigenvalues();
  if (!(lam(0) > 0.0) || lam(0) < 1e-3 * lam(1))
    throw validation_error("fit_ellipse_asymptotics needs a nondegenerate minimum (positive-definite Hessian)");
  const double predicted_ratio = lam(1) / lam(0);
  // The long half-axis follows the eigenvector of the smaller eigenvalue.
  const double predicted_angle = std::atan2(es.eigenvectors()(1, 0), es.eigenvectors()(0, 0));

  int label = -1;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : traj.events)
    if (e.kind == evolution::Event::Kind::disappearance && std::abs(e.location - point) < best) {
      best = std::abs(e.location - point);
      label = e.labels.front();
    }
  if (label < 0 && !traj.snapshots.empty())
    for (const auto& b : traj.snapshots.back().bubbles) {
      const double d = std::abs(geometry::centroid(b.boundary.vertices) - point);
      if (d < best) {
        best = d;
        label = b.label;
      }
    }
  std::vector<std::pair<double, const geometry::BoundaryCurve*>> shots;
  for (const auto& s : traj.snapshots)
    if (const auto* b = s.find(label)) shots.emplace_back(s.time, &b->boundary);
  if (shots.empty()) throw validation_error("fit_ellipse_asymptotics: no snapshots of the contracting bubble");
  const std::size_t first = shots.size() > count ? shots.size() - count : 0;

  FitReport rep;
  rep.model = "ellipse axes from the Hessian";
  rep.tolerance = 0.05;
  double last_angle = 0.0, last_ratio = 0.0;
  for (std::size_t i = first; i < shots.size(); ++i) {
    geometry::BoundaryCurve c = *shots[i].second;
    const Point g = geometry::centroid(c.vertices);
    for (auto& p : c.vertices) p -= g;
    c = geometry::renormalize(c, 1.0);
    const geometry::EllipseFit fit = geometry::fit_ellipse(c.vertices);
    const double ratio = fit.major / fit.minor;
    double dangle = std::remainder(fit.major_angle - predicted_angle, kPi);
    last_angle = std::abs(dangle) * 180.0 / kPi;
    last_ratio = ratio;
    rep.abscissa.push_back(shots[i].first);
    rep.residuals.push_back(std::abs(ratio / predicted_ratio - 1.0));
  }
  const bool check_angle = predicted_ratio > 1.0 + 1e-3;
  rep.parameters = {{"predicted_ratio", predicted_ratio},
                    {"fitted_ratio", last_ratio},
                    {"angle_error_deg", check_angle ? last_angle : 0.0},
                    {"label", static_cast<double>(label)}};
  const double final_residual = rep.residuals.back();
  rep.pass = final_residual < rep.tolerance && (!check_angle || last_angle < 5.0) &&
             final_residual <= std::max(rep.residuals.front(), rep.tolerance);
  return rep;
}

// ---------------------------------------------------------------------------
// Degenerate limit curves

FitReport fit_limit_curve(const std::vector<BoundaryCurve>& curves, const std::vector<double>& abscissa, int n,
                          double beta, double alpha, LimitModel model, double tolerance) {
  if (curves.empty() || curves.size() != abscissa.size())
    throw validation_error("fit_limit_curve needs one abscissa value per curve");
  if (model == LimitModel::symmetric && n < 1) throw validation_error("fit_limit_curve needs n >= 1");
  const BoundaryCurve target = model == LimitModel::symmetric ? conformal::limit_curve(n, beta, alpha, 256)
                                                              : conformal::saddle_node_curve(beta, 256);
  FitReport rep;
  rep.model = model == LimitModel::symmetric ? "y^2 = (beta - n alpha^2)^2 (1 - x^2) Q_{n-1}(x^2)^2"
                                             : "y^2 = beta^2 (x + 1/2)^3 (3/2 - x)";
  rep.tolerance = tolerance;
  BoundaryCurve last;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    last = model == LimitModel::symmetric
               ? geometry::normalize_for_asymptotics(curves[i], n, alpha)
               : geometry::renormalize(curves[i], 2.0, nullptr, geometry::Extent::x_width);
    rep.abscissa.push_back(abscissa[i]);
    rep.residuals.push_back(geometry::hausdorff_distance(last, target));
  }
  // Residuals may stall at the sampling floor; allow that much jitter.
  const double floor = 1e-4;
  bool decreasing = true;
  for (std::size_t i = 1; i < rep.residuals.size(); ++i)
    if (rep.residuals[i] > rep.residuals[i - 1] + floor) decreasing = false;
  rep.parameters = {{"n", static_cast<double>(n)},
                    {"beta", beta},
                    {"alpha", alpha},
                    {"final_distance", rep.residuals.back()},
                    {"decreasing", decreasing ? 1.0 : 0.0}};
  if (model == LimitModel::saddle_node) {
    // Cusp of the rescaled boundary: leftmost point, direction away from the
    // bubble body.
    std::size_t tip = 0;
    for (std::size_t i = 1; i < last.size(); ++i)
      if (last[i].real() < last[tip].real()) tip = i;
    const Point body = geometry::centroid(last.vertices);
    const Point dir = (last[tip] - body) / std::abs(last[tip] - body);
    rep.parameters.emplace_back("cusp_x", last[tip].real());
    rep.parameters.emplace_back("cusp_y", last[tip].imag());
    rep.parameters.emplace_back("cusp_direction_x", dir.real());
    try {
      const geometry::CuspEstimate est = geometry::cusp_exponent(last, last[tip]);
      rep.parameters.emplace_back("cusp_exponent", est.exponent);
    } catch (const Error&) {
      rep.parameters.emplace_back("cusp_exponent", std::numeric_limits<double>::quiet_NaN());
    }
  }
  rep.pass = rep.residuals.back() < tolerance && decreasing;
  return rep;
}

FitReport fit_limit_curve(const Trajectory& traj, int label, Point point, double angle, int n, double beta,
                          double alpha, LimitModel model, std::size_t count) {
  std::vector<BoundaryCurve> curves;
  std::vector<double> times;
  const Point rot = std::polar(1.0, -angle);
  for (const auto& s : traj.snapshots)
    if (const auto* b = s.find(label)) {
      BoundaryCurve c = b->boundary;
      for (auto& p : c.vertices) p = (p - point) * rot;
      curves.push_back(std::move(c));
      times.push_back(s.time);
    }
  if (curves.empty()) throw validation_error("fit_limit_curve: no snapshots of the requested bubble");
  if (curves.size() > count) {
    curves.erase(curves.begin(), curves.end() - static_cast<std::ptrdiff_t>(count));
    times.erase(times.begin(), times.end() - static_cast<std::ptrdiff_t>(count));
  }
  return fit_limit_curve(curves, times, n, beta, alpha, model);
}

}  // namespace hsb::analysis
