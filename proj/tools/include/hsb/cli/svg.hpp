#pragma once

// Static SVG plots with a fixed viewport mapping, layered curves and a legend.

#include <string>
#include <vector>

#include "hsb/analysis.hpp"
#include "hsb/geometry.hpp"

namespace hsb::cli {

struct SvgCurve {
  std::vector<geometry::Point> points;
  std::string color = "#1f77b4";
  double width = 1.0;
  bool closed = true;
  std::string label;  // legend entry (empty: none)
};

struct SvgMarker {
  geometry::Point at;
  std::string color = "#d62728";
  std::string label;
};

struct SvgCell {
  geometry::Point lo, hi;
  std::string color;
};

struct SvgScene {
  std::string title;
  std::vector<SvgCell> cells;
  std::vector<SvgCurve> curves;
  std::vector<SvgMarker> markers;
  std::vector<std::string> annotations;
  int size = 640;
};

// Throws a validation error when the scene holds no data.
std::string render_svg(const SvgScene& scene);

// Nested snapshot boundaries, colored from early (blue) to late (red).
SvgScene trajectory_scene(const std::vector<geometry::BubbleSystem>& snapshots, const std::string& title);
// Three-color grid in (X, Y) with the free path overlaid.
SvgScene region_scene(const analysis::RegionMap& region);

}  // namespace hsb::cli
