#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "hsb/error.hpp"
#include "hsb/potential.hpp"

namespace hsb::potential {

namespace {

bool try_eval(const GradientField& field, Point p, PotentialProbe& out) {
  try {
    out = field(p);
    return std::isfinite(out.value) && out.gradient.allFinite() && out.hessian.allFinite();
  } catch (const Error&) {
    return false;
  }
}

Point to_point(const Eigen::Vector2d& v) { return Point(v(0), v(1)); }

// Kernel-direction polynomial fit of the potential around a degenerate point.
void fit_degenerate(const GradientField& field, CriticalPoint& cp, double length_scale, int kernel) {
  const Eigen::Vector2d e = cp.axes.col(kernel);
  const Point dir = to_point(e);
  const int samples = 41;
  const int degree = 8;
  double w = 0.1 * length_scale;
  for (int attempt = 0; attempt < 12; ++attempt, w *= 0.5) {
    Eigen::MatrixXd a(samples, degree + 1);
    Eigen::VectorXd rhs(samples);
    bool ok = true;
    for (int k = 0; k < samples && ok; ++k) {
      const double s = -1.0 + 2.0 * k / (samples - 1);
      PotentialProbe probe;
      if (!try_eval(field, cp.location + dir * (s * w), probe)) {
        ok = false;
        break;
      }
      rhs(k) = probe.value - cp.value;
      double pw = 1.0;
      for (int j = 0; j <= degree; ++j, pw *= s) a(k, j) = pw;
    }
    if (!ok) continue;
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(rhs);
    double biggest = 0.0;
    for (int j = 3; j <= degree; ++j) biggest = std::max(biggest, std::abs(c(j)));
    if (biggest == 0.0) return;
    for (int j = 3; j <= degree; ++j) {
      if (std::abs(c(j)) < 0.05 * biggest) continue;
      const double coeff = c(j) / std::pow(w, j);
      if (j % 2 == 1) {
        cp.saddle_node = true;
        cp.degree = (j + 1) / 2;
        cp.beta = static_cast<double>(j) * coeff;
        // Orient the kernel axis so beta > 0.
        if (cp.beta < 0.0) {
          cp.beta = -cp.beta;
          cp.axes.col(kernel) = -cp.axes.col(kernel);
        }
      } else {
        cp.degree = j / 2;
        cp.beta = static_cast<double>(j) * coeff;
      }
      return;
    }
    return;
  }
}

}  // namespace

CriticalPoint classify(const GradientField& field, Point location, double length_scale,
                       const CriticalSearchOptions& options) {
  const PotentialProbe probe = field(location);
  CriticalPoint cp;
  cp.location = location;
  cp.value = probe.value;
  cp.gradient_norm = probe.gradient.norm();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(probe.hessian);
  cp.eigenvalues = es.eigenvalues();
  cp.axes = es.eigenvectors();
  const double l0 = cp.eigenvalues(0), l1 = cp.eigenvalues(1);
  const double small = std::min(std::abs(l0), std::abs(l1));
  const double large = std::max(std::abs(l0), std::abs(l1));
  if (large == 0.0 || small / large < options.degeneracy_threshold) {
    cp.kind = CriticalKind::degenerate;
    fit_degenerate(field, cp, length_scale, std::abs(l1) < std::abs(l0) ? 1 : 0);
  } else if (l0 > 0.0) {
    cp.kind = CriticalKind::minimum;
  } else if (l1 < 0.0) {
    cp.kind = CriticalKind::maximum;
  } else {
    cp.kind = CriticalKind::saddle;
  }
  return cp;
}

std::optional<CriticalPoint> refine_critical_point(const GradientField& field, Point seed, double length_scale,
                                                   const CriticalSearchOptions& options, std::string* failure) {
  const double tol = options.gradient_tolerance * std::max(length_scale, 1e-300);
  PotentialProbe probe;
  if (!try_eval(field, seed, probe)) {
    if (failure) *failure = "seed too close to a boundary";
    return std::nullopt;
  }
  Point x = seed;
  double gnorm = probe.gradient.norm();
  const double max_step = 0.25 * length_scale;
  for (int it = 0; it < options.max_iterations; ++it) {
    if (gnorm < tol) return classify(field, x, length_scale, options);
    Eigen::Vector2d step;
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(probe.hessian, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Vector2d sv = svd.singularValues();
    if (sv(0) == 0.0 || sv(1) < 1e-14 * sv(0)) {
      step = -probe.gradient / std::max(sv(0), 1e-300);
    } else {
      step = -svd.solve(probe.gradient);
    }
    if (step.norm() > max_step) step *= max_step / step.norm();
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
      PotentialProbe trial;
      const Point xt = x + alpha * to_point(step);
      if (!try_eval(field, xt, trial)) continue;
      const double tn = trial.gradient.norm();
      if (tn < (1.0 - 1e-4 * alpha) * gnorm || tn < tol) {
        x = xt;
        probe = trial;
        gnorm = tn;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (gnorm < 100.0 * tol) return classify(field, x, length_scale, options);
      if (failure) {
        std::ostringstream os;
        os << "line search stalled at |grad| = " << gnorm;
        *failure = os.str();
      }
      return std::nullopt;
    }
  }
  if (gnorm < tol) return classify(field, x, length_scale, options);
  if (failure) {
    std::ostringstream os;
    os << "no convergence after " << options.max_iterations << " iterations, |grad| = " << gnorm;
    *failure = os.str();
  }
  return std::nullopt;
}

CriticalSearch find_critical_points(const GradientField& field, const std::vector<Point>& seeds, double length_scale,
                                    const CriticalSearchOptions& options) {
  CriticalSearch result;
  for (const Point seed : seeds) {
    std::string reason;
    auto cp = refine_critical_point(field, seed, length_scale, options, &reason);
    if (!cp) {
      if (reason != "seed too close to a boundary") result.failures.push_back({seed, reason});
      continue;
    }
    bool duplicate = false;
    for (auto& existing : result.points) {
      const bool loose = existing.kind == CriticalKind::degenerate || cp->kind == CriticalKind::degenerate;
      const double radius = loose ? 1e-3 * length_scale
                                  : std::max(10.0 * options.gradient_tolerance * length_scale, 1e-7 * length_scale);
      if (std::abs(existing.location - cp->location) < radius) {
        duplicate = true;
        if (cp->gradient_norm < existing.gradient_norm) existing = *cp;
        break;
      }
    }
    if (!duplicate) result.points.push_back(*cp);
  }
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& p : result.points) {
    const bool min_like = p.kind == CriticalKind::minimum ||
                          (p.kind == CriticalKind::degenerate && p.eigenvalues(1) > 0.0 && !p.saddle_node &&
                           p.beta >= 0.0);
    if (min_like) lowest = std::min(lowest, p.value);
  }
  for (auto& p : result.points) {
    const bool min_like = p.kind == CriticalKind::minimum ||
                          (p.kind == CriticalKind::degenerate && p.eigenvalues(1) > 0.0 && !p.saddle_node &&
                           p.beta >= 0.0);
    p.is_global_min = min_like && p.value <= lowest + 1e-9 * std::max(1.0, std::abs(lowest));
  }
  // Deterministic order: by x, then y.
  std::sort(result.points.begin(), result.points.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
    return a.location.imag() < b.location.imag();
  });
  return result;
}

CriticalSearch find_critical_points(const geometry::BubbleSystem& system, const geometry::Box& box,
                                    const CriticalSearchOptions& options) {
  if (!(box.hi.real() > box.lo.real()) || !(box.hi.imag() > box.lo.imag()))
    throw validation_error("critical-point search box must have positive extent");
  const double scale = std::sqrt(system.total_area());
  std::vector<Point> seeds;
  const int g = std::max(options.grid, 1);
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const double fx = (i + 0.5) / g;
      const double fy = (j + 0.5) / g;
      seeds.emplace_back(box.lo.real() + fx * (box.hi.real() - box.lo.real()),
                         box.lo.imag() + fy * (box.hi.imag() - box.lo.imag()));
    }
  }
  for (const auto& b : system.bubbles) seeds.push_back(geometry::centroid(b.boundary.vertices));
  for (const Point p : options.extra_seeds) seeds.push_back(p);
  const GradientField field = [&system](Point p) { return eval_potential(system, p); };
  CriticalSearch all = find_critical_points(field, seeds, scale, options);
  CriticalSearch inside;
  inside.failures = std::move(all.failures);
  for (auto& p : all.points) {
    const Point z = p.location;
    if (z.real() >= box.lo.real() && z.real() <= box.hi.real() && z.imag() >= box.lo.imag() &&
        z.imag() <= box.hi.imag())
      inside.points.push_back(p);
  }
  // Global-minimum flags were computed over all located points; keep them.
  return inside;
}

}  // namespace hsb::potential
