#pragma once

#include <vector>

#include "hsb/geometry.hpp"

namespace hsb::evolution::detail {

using geometry::Point;

// Spectral geometry of a closed curve sampled at equispaced parameter values.
struct CurveGeometry {
  std::vector<Point> nodes;
  std::vector<double> speed;        // |z'(t)|, t in [0, 2 pi)
  std::vector<Point> normal;        // outward unit normal
  std::vector<double> curvature;    // signed, positive for convex ccw curves
  std::vector<double> weight;       // trapezoid weight |z'| 2 pi / N
  std::vector<double> area_weight;  // d(polygon area) / d(normal displacement)
};

CurveGeometry analyze_curve(const std::vector<Point>& z, double filter_level);

// (1/2pi) * integral of density log|z_i - y| ds_y over the curve itself.
double self_single_layer(const CurveGeometry& g, const double* density, std::size_t i);
// Same at an off-curve point with the trapezoid rule.
double cross_single_layer(const CurveGeometry& g, const double* density, Point p);

}  // namespace hsb::evolution::detail
