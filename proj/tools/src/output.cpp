#include "hsb/cli/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "hsb/error.hpp"

namespace hsb::cli {

namespace {

json point_json(geometry::Point p) { return json::array({p.real(), p.imag()}); }

// NaN and infinities are not JSON numbers.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string boundary_csv(const std::vector<geometry::BubbleSystem>& snapshots, int stride) {
  if (stride < 1) throw validation_error("stride must be >= 1");
  std::string out = "t,bubble,idx,x,y\n";
  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    if (k % static_cast<std::size_t>(stride) != 0 && k + 1 != snapshots.size()) continue;
    const auto& s = snapshots[k];
    const std::string t = format_number(s.time);
    for (const auto& b : s.bubbles)
      for (std::size_t i = 0; i < b.boundary.size(); ++i) {
        out += t;
        out += ',' + std::to_string(b.label) + ',' + std::to_string(i) + ',';
        out += format_number(b.boundary[i].real()) + ',' + format_number(b.boundary[i].imag()) + '\n';
      }
  }
  return out;
}

std::vector<geometry::BubbleSystem> parse_boundary_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "t,bubble,idx,x,y") throw validation_error("boundary csv: bad header");
  std::vector<geometry::BubbleSystem> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    double t = 0.0, x = 0.0, y = 0.0;
    int label = 0;
    std::size_t idx = 0;
    if (std::sscanf(line.c_str(), "%lf,%d,%zu,%lf,%lf", &t, &label, &idx, &x, &y) != 5)
      throw validation_error("boundary csv: malformed row " + std::to_string(row));
    if (out.empty() || out.back().time != t) {
      out.emplace_back();
      out.back().time = t;
    }
    auto& sys = out.back();
    if (sys.bubbles.empty() || sys.bubbles.back().label != label || idx == 0) {
      if (idx != 0) throw validation_error("boundary csv: row " + std::to_string(row) + " does not start a bubble at idx 0");
      sys.bubbles.push_back({label, {}});
    }
    auto& v = sys.bubbles.back().boundary.vertices;
    if (idx != v.size()) throw validation_error("boundary csv: non-consecutive idx at row " + std::to_string(row));
    v.emplace_back(x, y);
  }
  return out;
}

std::string probes_csv(const evolution::Trajectory& traj) {
  std::string out = "t,probe,x,y,phi\n";
  for (const auto& s : traj.probe_log) {
    const auto p = traj.probes.at(static_cast<std::size_t>(s.probe));
    out += format_number(s.t) + ',' + std::to_string(s.probe) + ',' + format_number(p.real()) + ',' +
           format_number(p.imag()) + ',' + format_number(s.phi) + '\n';
  }
  return out;
}

std::string region_csv(const analysis::RegionMap& region) {
  std::string out = "i,j,X,Y,status\n";
  for (int j = 0; j < region.grid_n; ++j)
    for (int i = 0; i < region.grid_n; ++i) {
      const auto c = region.center(i, j);
      out += std::to_string(i) + ',' + std::to_string(j) + ',' + format_number(c.real()) + ',' +
             format_number(c.imag()) + ',' + analysis::to_string(region.at(i, j)) + '\n';
    }
  return out;
}

json to_json(const evolution::Event& e) {
  json j = {{"kind", evolution::to_string(e.kind)},
            {"time", num(e.time)},
            {"location", point_json(e.location)},
            {"labels", e.labels},
            {"metric", num(e.metric)}};
  if (e.kind == evolution::Event::Kind::disappearance) j["extrapolated_time"] = num(e.extrapolated_time);
  return j;
}

json to_json(const evolution::Trajectory& t) {
  json events = json::array();
  for (const auto& e : t.events) events.push_back(to_json(e));
  double area = 0.0;
  if (!t.snapshots.empty()) area = t.snapshots.back().total_area();
  const double expected = t.initial_area - t.extracted;
  return {{"termination", evolution::to_string(t.termination)},
          {"termination_label", t.termination_label},
          {"termination_location", point_json(t.termination_location)},
          {"h", num(t.h)},
          {"initial_area", num(t.initial_area)},
          {"t_star", num(t.t_star)},
          {"total_time", num(t.total_time)},
          {"extracted", num(t.extracted)},
          {"removed_area", num(t.removed_area)},
          {"final_area", num(area)},
          {"area_law_error", num(t.initial_area > 0 ? std::abs(area + t.removed_area - expected) / t.initial_area : 0.0)},
          {"snapshots", t.snapshots.size()},
          {"events", events}};
}

json to_json(const evolution::Strategy& s) {
  json rates = json::array();
  for (const auto& [a, b] : s.rates) rates.push_back({num(a), num(b)});
  const auto [v1, v2] = s.volumes();
  return {{"breakpoints", s.breakpoints}, {"rates", rates}, {"volumes", {num(v1), num(v2)}}};
}

json to_json(const analysis::FitReport& r) {
  json params = json::object();
  for (const auto& [k, v] : r.parameters) params[k] = num(v);
  json res = json::array(), abs = json::array();
  for (double v : r.residuals) res.push_back(num(v));
  for (double v : r.abscissa) abs.push_back(num(v));
  return {{"model", r.model}, {"parameters", params}, {"abscissa", abs}, {"residuals", res},
          {"tolerance", num(r.tolerance)}, {"pass", r.pass}, {"note", r.note}};
}

json to_json(const analysis::ContractionPoint& c) {
  return {{"label", c.label},
          {"kind", analysis::to_string(c.kind)},
          {"time", num(c.time)},
          {"extrapolated_time", num(c.extrapolated_time)},
          {"location", point_json(c.location)},
          {"refined", point_json(c.refined)},
          {"gradient_norm", num(c.gradient_norm)},
          {"value_gap", num(c.value_gap)},
          {"inside_initial", c.inside_initial},
          {"verified", c.verified}};
}

json to_json(const potential::CriticalPoint& p) {
  return {{"location", point_json(p.location)},
          {"kind", potential::to_string(p.kind)},
          {"degree", p.degree},
          {"saddle_node", p.saddle_node},
          {"eigenvalues", {num(p.eigenvalues(0)), num(p.eigenvalues(1))}},
          {"is_global_min", p.is_global_min},
          {"beta", num(p.beta)},
          {"value", num(p.value)},
          {"gradient_norm", num(p.gradient_norm)}};
}

json to_json(const analysis::SyncReport& r) {
  json eps = json::array();
  for (const auto& e : r.endpoints)
    eps.push_back({{"label", e.label},
                   {"location", point_json(e.location)},
                   {"refined", point_json(e.refined)},
                   {"gradient_norm", num(e.gradient_norm)},
                   {"classification", to_json(e.classification)},
                   {"inside_initial", e.inside_initial}});
  return {{"found", r.strategy.has_value()},
          {"strategy", r.strategy ? to_json(*r.strategy) : json(nullptr)},
          {"free_synchronizes", r.free_synchronizes},
          {"crossing", num(r.crossing)},
          {"time_gap", num(r.time_gap)},
          {"endpoints", eps},
          {"gradient_check", r.gradient_check},
          {"minima_check", r.minima_check},
          {"note", r.note}};
}

json to_json(const analysis::FamilySweepReport& r) {
  json samples = json::array();
  for (const auto& s : r.samples)
    samples.push_back({{"s", num(s.s)}, {"breaks", s.breaks}, {"criterion_breaks", s.criterion_breaks},
                       {"breakup_time", num(s.breakup_time)}});
  return {{"samples", samples},
          {"sigma", r.sigma ? num(*r.sigma) : json(nullptr)},
          {"bracket", {num(r.bracket_lo), num(r.bracket_hi)}},
          {"monotone", r.monotone},
          {"sufficiency_holds", r.sufficiency_holds},
          {"cusp",
           {{"found", r.cusp.found},
            {"time", num(r.cusp.time)},
            {"exponent", num(r.cusp.exponent)},
            {"metric", num(r.cusp.metric)},
            {"location", point_json(r.cusp.location)},
            {"relax_steps", r.cusp.relax_steps}}},
          {"note", r.note}};
}

std::string dump(const json& value) { return value.dump(2) + "\n"; }

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::validation, "cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw Error(ErrorKind::validation, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

OutputWriter::OutputWriter(std::filesystem::path directory) : dir_(std::move(directory)) {
  std::filesystem::create_directories(dir_);
}

void OutputWriter::add(const std::string& name, const std::string& contents) {
  write_atomic(dir_ / name, contents);
  written_.push_back(name);
}

void OutputWriter::write_manifest(const std::string& command, int exit_code, const std::string& error) {
  json m = {{"command", command}, {"exit_code", exit_code}, {"files", written_}};
  if (!error.empty()) {
    m["error"] = error;
    m["partial"] = true;
  }
  write_atomic(dir_ / "manifest.json", dump(m));
}

}  // namespace hsb::cli
