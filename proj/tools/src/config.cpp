#include "hsb/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hsb/analysis.hpp"
#include "hsb/conformal.hpp"
#include "hsb/error.hpp"

namespace hsb::cli {

namespace {

using geometry::Point;

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw validation_error(path + ": " + what); }

const json& member(const json& object, const std::string& key, const std::string& path) {
  if (!object.is_object()) fail(path, "expected an object");
  auto it = object.find(key);
  if (it == object.end()) fail(path + "." + key, "missing");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

double positive(const json& object, const std::string& key, const std::string& path) {
  const double x = number_at(object, key, path);
  if (!(x > 0.0)) fail(path + "." + key, "must be > 0");
  return x;
}

double in_range(const json& object, const std::string& key, const std::string& path, double lo, double hi,
                double fallback) {
  const double x = number_or(object, key, path, fallback);
  if (x < lo || x > hi) {
    std::ostringstream os;
    os << "must be in [" << lo << ", " << hi << "]";
    fail(path + "." + key, os.str());
  }
  return x;
}

std::size_t node_count(const json& entry, const std::string& path) {
  const int n = integer_or(entry, "nodes", path, 256);
  if (n < 16 || n > 200000) fail(path + ".nodes", "must be in [16, 200000]");
  return static_cast<std::size_t>(n);
}

std::vector<Point> read_polyline_file(const std::filesystem::path& file, const std::string& path) {
  std::ifstream in(file);
  if (!in) fail(path + ".file", "cannot open " + file.string());
  std::vector<Point> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (char& c : line)
      if (c == ',' || c == ';') c = ' ';
    std::istringstream ls(line);
    double x = 0.0, y = 0.0;
    if (!(ls >> x >> y)) {
      if (pts.empty()) continue;  // header
      fail(path + ".file", "malformed line '" + line + "'");
    }
    pts.emplace_back(x, y);
  }
  return pts;
}

// Piecewise-linear profile through samples; samples starting at x = 0 are
// extended evenly.
geometry::BoundaryCurve profile_from_samples(const json& entry, const std::string& path, std::size_t nodes) {
  const json& xs = member(entry, "x", path);
  const json& fs = member(entry, "f", path);
  if (!xs.is_array() || !fs.is_array() || xs.size() != fs.size() || xs.size() < 3)
    fail(path, "x and f must be arrays of equal length >= 3");
  std::vector<double> x, f;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    x.push_back(as_number(xs[i], path + ".x[" + std::to_string(i) + "]"));
    f.push_back(as_number(fs[i], path + ".f[" + std::to_string(i) + "]"));
    if (i > 0 && !(x[i] > x[i - 1])) fail(path + ".x", "must be strictly increasing");
  }
  const bool even = std::abs(x.front()) < 1e-15;
  const double half = even ? x.back() : std::max(std::abs(x.front()), x.back());
  if (!even && std::abs(x.front() + x.back()) > 1e-12 * half) fail(path + ".x", "must start at 0 or be symmetric about 0");
  auto profile = [x, f, even](double t) {
    if (even) t = std::abs(t);
    if (t <= x.front()) return f.front();
    if (t >= x.back()) return f.back();
    const auto it = std::upper_bound(x.begin(), x.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - x.begin());
    const double s = (t - x[k - 1]) / (x[k] - x[k - 1]);
    return f[k - 1] + s * (f[k] - f[k - 1]);
  };
  return geometry::make_profile_domain(profile, half, nodes);
}

void build_curve(DomainSpec& d, const json& entry, const std::string& path, const std::filesystem::path& base_dir,
                 std::size_t nodes);

DomainSpec parse_domain(const json& entry, const std::string& path, const std::filesystem::path& base_dir) {
  DomainSpec d;
  d.source = entry;
  const json& type = member(entry, "type", path);
  if (!type.is_string()) fail(path + ".type", "expected a string");
  d.type = type.get<std::string>();
  const std::size_t nodes = node_count(entry, path);
  try {
    build_curve(d, entry, path, base_dir, nodes);
  } catch (const Error& e) {
    const std::string what = e.what();
    if (what.rfind("config.", 0) == 0) throw;
    fail(path, what);
  }
  return d;
}

void build_curve(DomainSpec& d, const json& entry, const std::string& path, const std::filesystem::path& base_dir,
                 std::size_t nodes) {
  if (d.type == "disk") {
    d.curve = geometry::make_circle(entry.contains("center") ? point_at(entry["center"], path + ".center") : Point{},
                                    positive(entry, "radius", path), nodes, true);
  } else if (d.type == "ellipse") {
    d.curve = geometry::make_ellipse(entry.contains("center") ? point_at(entry["center"], path + ".center") : Point{},
                                     positive(entry, "a", path), positive(entry, "b", path), nodes,
                                     number_or(entry, "angle", path, 0.0));
  } else if (d.type == "polyline") {
    std::vector<Point> pts;
    if (entry.contains("points")) {
      pts = points_at(entry["points"], path + ".points");
    } else {
      const json& file = member(entry, "file", path);
      if (!file.is_string()) fail(path + ".file", "expected a string");
      std::filesystem::path p = file.get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      pts = read_polyline_file(p, path);
    }
    if (pts.size() < 3) fail(path + ".points", "need at least 3 vertices");
    d.curve.vertices = std::move(pts);
    d.curve = geometry::oriented_ccw(d.curve);
  } else if (d.type == "profile") {
    if (entry.contains("family")) {
      if (entry["family"] != "dumbbell") fail(path + ".family", "only 'dumbbell' is built in");
      d.curve = analysis::dumbbell(positive(entry, "c", path), nodes).bubbles.front().boundary;
    } else {
      d.curve = profile_from_samples(entry, path, nodes);
    }
  } else if (d.type == "laurent") {
    conformal::LaurentMap map;
    if (entry.contains("family")) {
      const std::string fam = entry["family"].is_string() ? entry["family"].get<std::string>() : "";
      if (fam != "quartic" && fam != "saddle") fail(path + ".family", "expected 'quartic' or 'saddle'");
      map = conformal::exact_family(fam == "quartic" ? conformal::Family::quartic : conformal::Family::saddle,
                                    positive(entry, "A", path), number_at(entry, "beta", path));
    } else {
      map.A = positive(entry, "A", path);
      const json& coeffs = member(entry, "coeffs", path);
      if (!coeffs.is_array()) fail(path + ".coeffs", "expected an array of [re, im]");
      for (std::size_t k = 0; k < coeffs.size(); ++k) {
        const Point c = point_at(coeffs[k], path + ".coeffs[" + std::to_string(k) + "]");
        map.coeffs.push_back(c);
      }
    }
    const auto uni = conformal::univalence_check(map);
    if (!uni.univalent) fail(path, "map is not univalent (" + uni.reason + ")");
    d.curve = conformal::trace_boundary(map, nodes);
  } else if (d.type == "kufarev") {
    const auto map = conformal::kufarev_solve(positive(entry, "a", path), positive(entry, "R", path),
                                              positive(entry, "r", path), positive(entry, "q", path),
                                              number_or(entry, "t", path, 0.0));
    d.curve = conformal::trace_boundary(map, nodes);
  } else {
    fail(path + ".type", "unknown domain type '" + d.type + "' (disk, ellipse, polyline, profile, laurent, kufarev)");
  }
  geometry::require_valid(d.curve);
}

evolution::Strategy parse_strategy(const json& s, const std::string& path) {
  if (!s.is_object()) fail(path, "expected an object");
  auto pair_at = [&](const json& v, const std::string& p) {
    const Point q = point_at(v, p);
    if (q.real() < 0.0 || q.imag() < 0.0) fail(p, "rates and volumes must be nonnegative");
    return std::pair<double, double>(q.real(), q.imag());
  };
  if (s.contains("volumes")) {
    const json& v = s["volumes"];
    if (!v.is_array() || v.empty()) fail(path + ".volumes", "expected a nonempty array of [dQ1, dQ2]");
    std::vector<std::pair<double, double>> vols;
    for (std::size_t i = 0; i < v.size(); ++i) vols.push_back(pair_at(v[i], path + ".volumes[" + std::to_string(i) + "]"));
    return evolution::Strategy::from_volumes(vols, s.contains("rate") ? positive(s, "rate", path) : 1.0);
  }
  if (s.contains("constant")) {
    const auto q = pair_at(s["constant"], path + ".constant");
    return evolution::Strategy::constant(q.first, q.second, positive(s, "duration", path));
  }
  const json& bp = member(s, "breakpoints", path);
  const json& rates = member(s, "rates", path);
  if (!bp.is_array() || !rates.is_array() || bp.size() != rates.size() + 1)
    fail(path, "breakpoints must hold one more entry than rates");
  evolution::Strategy out;
  for (std::size_t i = 0; i < bp.size(); ++i) out.breakpoints.push_back(as_number(bp[i], path + ".breakpoints[" + std::to_string(i) + "]"));
  for (std::size_t i = 0; i < rates.size(); ++i) out.rates.push_back(pair_at(rates[i], path + ".rates[" + std::to_string(i) + "]"));
  return out;
}

evolution::Numerics parse_numerics(const json& n, const std::string& path) {
  evolution::Numerics out;
  if (n.is_null()) return out;
  if (!n.is_object()) fail(path, "expected an object");
  static const char* known[] = {"h_factor", "dt_factor", "vanish_factor", "clearance_factor", "cusp_curvature",
                                "cusp_rcond_drop", "max_events", "max_steps", "min_nodes", "polygon_flux"};
  for (auto it = n.begin(); it != n.end(); ++it)
    if (std::find(std::begin(known), std::end(known), it.key()) == std::end(known))
      fail(path + "." + it.key(), "unknown numerics override");
  out.h_factor = in_range(n, "h_factor", path, 1e-3, 0.1, out.h_factor);
  out.dt_factor = in_range(n, "dt_factor", path, 1e-3, 0.5, out.dt_factor);
  out.vanish_factor = in_range(n, "vanish_factor", path, 1.0, 10.0, out.vanish_factor);
  out.clearance_factor = in_range(n, "clearance_factor", path, 1.0, 10.0, out.clearance_factor);
  out.cusp_curvature = in_range(n, "cusp_curvature", path, 5.0, 1e4, out.cusp_curvature);
  out.cusp_rcond_drop = in_range(n, "cusp_rcond_drop", path, 10.0, 1e8, out.cusp_rcond_drop);
  out.max_events = static_cast<int>(in_range(n, "max_events", path, 1, 10000, out.max_events));
  out.max_steps = static_cast<int>(in_range(n, "max_steps", path, 1, 1e7, out.max_steps));
  out.min_nodes = static_cast<std::size_t>(in_range(n, "min_nodes", path, 16, 100000, static_cast<double>(out.min_nodes)));
  if (n.contains("polygon_flux")) {
    if (!n["polygon_flux"].is_boolean()) fail(path + ".polygon_flux", "expected a boolean");
    out.polygon_flux = n["polygon_flux"].get<bool>();
  }
  return out;
}

}  // namespace

double number_at(const json& object, const std::string& key, const std::string& path) {
  return as_number(member(object, key, path), path + "." + key);
}

double number_or(const json& object, const std::string& key, const std::string& path, double fallback) {
  if (!object.is_object() || !object.contains(key)) return fallback;
  return as_number(object.at(key), path + "." + key);
}

int integer_or(const json& object, const std::string& key, const std::string& path, int fallback) {
  if (!object.is_object() || !object.contains(key)) return fallback;
  const json& v = object.at(key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<int>();
}

Point point_at(const json& value, const std::string& path) {
  if (!value.is_array() || value.size() != 2) fail(path, "expected [x, y]");
  return {as_number(value[0], path + "[0]"), as_number(value[1], path + "[1]")};
}

std::vector<Point> points_at(const json& value, const std::string& path) {
  if (!value.is_array()) fail(path, "expected an array of [x, y]");
  std::vector<Point> out;
  for (std::size_t i = 0; i < value.size(); ++i) out.push_back(point_at(value[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

geometry::BubbleSystem ScenarioConfig::system() const {
  std::vector<geometry::BoundaryCurve> curves;
  for (const auto& d : domains) curves.push_back(d.curve);
  return geometry::make_system(std::move(curves));
}

const json& ScenarioConfig::section(const std::string& name) const {
  static const json empty = json::object();
  auto it = sections.find(name);
  return it == sections.end() ? empty : *it;
}

ScenarioConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  const std::string root = "config";
  if (!doc.is_object()) fail(root, "expected an object");
  static const char* known[] = {"domains", "mode",   "rate", "t_end",       "strategy", "probes", "numerics",
                                "outputs", "seed",   "potential", "exact", "region",   "sync",   "asymptotics",
                                "sweep",   "check",  "description"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (std::find(std::begin(known), std::end(known), it.key()) == std::end(known))
      fail(root + "." + it.key(), "unknown section");

  ScenarioConfig cfg;
  const json& domains = member(doc, "domains", root);
  if (!domains.is_array() || domains.empty()) fail(root + ".domains", "expected a nonempty array");
  for (std::size_t i = 0; i < domains.size(); ++i)
    cfg.domains.push_back(parse_domain(domains[i], root + ".domains[" + std::to_string(i) + "]", base_dir));

  const std::string mode = doc.value("mode", std::string("free"));
  if (mode == "free") {
    cfg.mode = ScenarioConfig::Mode::free;
  } else if (mode == "regulated") {
    cfg.mode = ScenarioConfig::Mode::regulated;
  } else {
    fail(root + ".mode", "expected 'free' or 'regulated'");
  }
  if (doc.contains("rate")) cfg.rate = positive(doc, "rate", root);
  if (doc.contains("t_end")) cfg.t_end = positive(doc, "t_end", root);
  if (doc.contains("strategy")) cfg.strategy = parse_strategy(doc["strategy"], root + ".strategy");
  if (doc.contains("probes")) cfg.probes = points_at(doc["probes"], root + ".probes");
  if (doc.contains("numerics")) cfg.numerics = parse_numerics(doc["numerics"], root + ".numerics");
  if (doc.contains("outputs")) {
    const json& o = doc["outputs"];
    if (!o.is_object()) fail(root + ".outputs", "expected an object");
    auto flag = [&](const char* key, bool& dst) {
      if (!o.contains(key)) return;
      if (!o[key].is_boolean()) fail(root + ".outputs." + key, "expected a boolean");
      dst = o[key].get<bool>();
    };
    flag("boundary", cfg.outputs.boundary);
    flag("events", cfg.outputs.events);
    flag("probes", cfg.outputs.probes);
    flag("reports", cfg.outputs.reports);
    flag("svg", cfg.outputs.svg);
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) fail(root + ".seed", "expected a nonnegative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  for (const char* s : {"potential", "exact", "region", "sync", "asymptotics", "sweep", "check"})
    if (doc.contains(s)) {
      if (!doc[s].is_object()) fail(root + "." + s, "expected an object");
      cfg.sections[s] = doc[s];
    }

  if (cfg.mode == ScenarioConfig::Mode::regulated) {
    if (cfg.domains.size() != 2) fail(root + ".domains", "regulated mode requires exactly two bubbles");
    if (!cfg.strategy) fail(root + ".strategy", "regulated mode requires a strategy");
    try {
      cfg.strategy->validate(cfg.system());
    } catch (const Error& e) {
      fail(root + ".strategy", e.what());
    }
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("config: cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw validation_error(std::string("config: parse error: ") + e.what());
  }
  return parse_config(doc, path.parent_path());
}

}  // namespace hsb::cli
