#include "hsb/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "hsb/cli/output.hpp"
#include "hsb/error.hpp"

namespace hsb::cli {

namespace {

using geometry::Point;

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Blue -> red ramp.
std::string ramp(double s) {
  const int r = static_cast<int>(std::lround(31 + s * (214 - 31)));
  const int g = static_cast<int>(std::lround(119 + s * (39 - 119)));
  const int b = static_cast<int>(std::lround(180 + s * (40 - 180)));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string render_svg(const SvgScene& scene) {
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
  auto grow = [&](Point p) {
    x0 = std::min(x0, p.real());
    x1 = std::max(x1, p.real());
    y0 = std::min(y0, p.imag());
    y1 = std::max(y1, p.imag());
  };
  for (const auto& c : scene.cells) {
    grow(c.lo);
    grow(c.hi);
  }
  for (const auto& c : scene.curves)
    for (Point p : c.points) grow(p);
  for (const auto& m : scene.markers) grow(m.at);
  if (!(x1 >= x0)) throw validation_error("render_svg: empty scene");

  const double size = scene.size;
  const double margin = 40.0;
  const double span = std::max({x1 - x0, y1 - y0, 1e-12});
  const double scale = (size - 2 * margin) / span;
  const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
  auto X = [&](double x) { return coord(size / 2 + (x - cx) * scale); };
  auto Y = [&](double y) { return coord(size / 2 - (y - cy) * scale); };

  const int legend_lines = static_cast<int>(std::count_if(scene.curves.begin(), scene.curves.end(),
                                                          [](const SvgCurve& c) { return !c.label.empty(); }) +
                                            std::count_if(scene.markers.begin(), scene.markers.end(),
                                                          [](const SvgMarker& m) { return !m.label.empty(); }));
  const double height = size + 16.0 * (legend_lines + static_cast<int>(scene.annotations.size()));
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + coord(size) + "\" height=\"" + coord(height) +
         "\" viewBox=\"0 0 " + coord(size) + " " + coord(height) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + coord(size) + "\" height=\"" + coord(height) + "\" fill=\"white\"/>\n";
  if (!scene.title.empty())
    out += "<text x=\"" + coord(margin) + "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" +
           escape(scene.title) + "</text>\n";
  out += "<g id=\"cells\">\n";
  for (const auto& c : scene.cells) {
    const double w = (c.hi.real() - c.lo.real()) * scale, h = (c.hi.imag() - c.lo.imag()) * scale;
    out += "<rect x=\"" + X(c.lo.real()) + "\" y=\"" + Y(c.hi.imag()) + "\" width=\"" + coord(w) + "\" height=\"" +
           coord(h) + "\" fill=\"" + c.color + "\" stroke=\"none\"/>\n";
  }
  out += "</g>\n<g id=\"curves\" fill=\"none\">\n";
  for (const auto& c : scene.curves) {
    if (c.points.empty()) continue;
    out += std::string(c.closed ? "<polygon" : "<polyline") + " stroke=\"" + c.color + "\" stroke-width=\"" +
           coord(c.width) + "\" points=\"";
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      if (i) out += ' ';
      out += X(c.points[i].real()) + ',' + Y(c.points[i].imag());
    }
    out += "\"/>\n";
  }
  out += "</g>\n<g id=\"markers\">\n";
  for (const auto& m : scene.markers)
    out += "<circle cx=\"" + X(m.at.real()) + "\" cy=\"" + Y(m.at.imag()) + "\" r=\"3\" fill=\"" + m.color + "\"/>\n";
  out += "</g>\n<g id=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n";
  double ly = size + 4.0;
  for (const auto& c : scene.curves) {
    if (c.label.empty()) continue;
    ly += 16.0;
    out += "<line x1=\"" + coord(margin) + "\" y1=\"" + coord(ly - 4) + "\" x2=\"" + coord(margin + 20) + "\" y2=\"" +
           coord(ly - 4) + "\" stroke=\"" + c.color + "\" stroke-width=\"2\"/>";
    out += "<text x=\"" + coord(margin + 26) + "\" y=\"" + coord(ly) + "\">" + escape(c.label) + "</text>\n";
  }
  for (const auto& m : scene.markers) {
    if (m.label.empty()) continue;
    ly += 16.0;
    out += "<circle cx=\"" + coord(margin + 10) + "\" cy=\"" + coord(ly - 4) + "\" r=\"3\" fill=\"" + m.color + "\"/>";
    out += "<text x=\"" + coord(margin + 26) + "\" y=\"" + coord(ly) + "\">" + escape(m.label) + "</text>\n";
  }
  for (const auto& a : scene.annotations) {
    ly += 16.0;
    out += "<text x=\"" + coord(margin) + "\" y=\"" + coord(ly) + "\">" + escape(a) + "</text>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

SvgScene trajectory_scene(const std::vector<geometry::BubbleSystem>& snapshots, const std::string& title) {
  SvgScene scene;
  scene.title = title;
  if (snapshots.empty()) return scene;
  // At most 12 evenly spaced frames.
  const std::size_t frames = std::min<std::size_t>(12, snapshots.size());
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t k = frames == 1 ? 0 : f * (snapshots.size() - 1) / (frames - 1);
    const double s = frames == 1 ? 0.0 : static_cast<double>(f) / static_cast<double>(frames - 1);
    for (const auto& b : snapshots[k].bubbles) {
      SvgCurve c;
      c.points = b.boundary.vertices;
      c.color = ramp(s);
      c.label = (f == 0 || f + 1 == frames) && &b == &snapshots[k].bubbles.front()
                    ? "t = " + format_short(snapshots[k].time)
                    : "";
      scene.curves.push_back(std::move(c));
    }
  }
  return scene;
}

SvgScene region_scene(const analysis::RegionMap& region) {
  SvgScene scene;
  scene.title = "accessibility region";
  const double dx = region.S1 / region.grid_n, dy = region.S2 / region.grid_n;
  for (int j = 0; j < region.grid_n; ++j)
    for (int i = 0; i < region.grid_n; ++i) {
      const Point c = region.center(i, j);
      std::string color;
      switch (region.at(i, j)) {
        case analysis::CellStatus::accessible: color = "#a6d96a"; break;
        case analysis::CellStatus::inaccessible: color = "#f4a582"; break;
        case analysis::CellStatus::boundary: color = "#fee08b"; break;
        case analysis::CellStatus::unknown: color = "#d9d9d9"; break;
      }
      scene.cells.push_back({c - Point(dx / 2, dy / 2), c + Point(dx / 2, dy / 2), color});
    }
  if (!region.free_path.empty()) {
    SvgCurve path;
    path.points = region.free_path;
    path.closed = false;
    path.color = "#2c7bb6";
    path.width = 2.0;
    path.label = "free path";
    scene.curves.push_back(std::move(path));
  }
  scene.annotations.push_back("green accessible, orange inaccessible, yellow boundary");
  scene.annotations.push_back("S1 = " + format_short(region.S1) + ", S2 = " + format_short(region.S2) +
                              ", origin accessible: " + (region.origin_accessible ? "yes" : "no"));
  return scene;
}

}  // namespace hsb::cli
