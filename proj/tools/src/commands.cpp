#include "hsb/cli/commands.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <random>

#include "hsb/analysis.hpp"
#include "hsb/cli/output.hpp"
#include "hsb/cli/suites.hpp"
#include "hsb/cli/svg.hpp"
#include "hsb/conformal.hpp"
#include "hsb/error.hpp"
#include "hsb/potential.hpp"

namespace hsb::cli {

namespace {

using geometry::Point;

struct Context {
  const ScenarioConfig& cfg;
  const RunOptions& opt;
  OutputWriter& out;
  std::uint64_t seed;

  void log(const std::string& line) const {
    if (!opt.quiet) std::cerr << line << '\n';
  }
  void svg(const std::string& name, const SvgScene& scene) const {
    if (cfg.outputs.svg) out.add(name, render_svg(scene));
  }
  void report(const std::string& name, const json& value) const {
    if (cfg.outputs.reports) out.add(name, dump(value));
  }
};

json point_json(Point p) { return json::array({p.real(), p.imag()}); }

SvgScene domain_scene(const geometry::BubbleSystem& sys, const std::string& title) {
  SvgScene scene;
  scene.title = title;
  for (const auto& b : sys.bubbles) scene.curves.push_back({b.boundary.vertices, "#1f77b4", 1.5, true, ""});
  return scene;
}

// Config numerics with the section's h_factor (or `coarse` when given).
evolution::Numerics section_numerics(const Context& ctx, const json& sec, const std::string& path,
                                     std::optional<double> coarse = {}) {
  evolution::Numerics num = ctx.cfg.numerics;
  if (coarse) num.h_factor = *coarse;
  if (sec.contains("h_factor")) {
    num.h_factor = number_at(sec, "h_factor", path);
    if (num.h_factor < 1e-3 || num.h_factor > 0.1) throw validation_error(path + ".h_factor: must be in [0.001, 0.1]");
  }
  return num;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Context& ctx) {
  const auto sys = ctx.cfg.system();
  evolution::Trajectory traj;
  if (ctx.cfg.mode == ScenarioConfig::Mode::free) {
    const double t_end = ctx.cfg.t_end.value_or(sys.total_area() / ctx.cfg.rate);
    traj = evolution::run_free(sys, ctx.cfg.rate, t_end, ctx.cfg.probes, ctx.cfg.numerics);
  } else {
    traj = evolution::run_regulated(sys, *ctx.cfg.strategy, ctx.cfg.probes, ctx.cfg.numerics);
  }
  ctx.log("simulate: " + evolution::to_string(traj.termination) + " at t = " + format_short(traj.total_time) + ", " +
          std::to_string(traj.events.size()) + " events");
  if (ctx.cfg.outputs.boundary) ctx.out.add("boundary.csv", boundary_csv(traj.snapshots, ctx.opt.stride));
  if (ctx.cfg.outputs.events) {
    json events = json::array();
    for (const auto& e : traj.events) events.push_back(to_json(e));
    ctx.out.add("events.json", dump(events));
  }
  if (ctx.cfg.outputs.probes && !traj.probes.empty()) ctx.out.add("probes.csv", probes_csv(traj));
  ctx.report("report.json", to_json(traj));
  ctx.svg("trajectory.svg", trajectory_scene(traj.snapshots, "boundary snapshots"));
  if (ctx.cfg.mode == ScenarioConfig::Mode::regulated && traj.termination == evolution::Termination::cusp)
    return exit_cusp;
  return exit_ok;
}

int cmd_potential(const Context& ctx) {
  const auto sys = ctx.cfg.system();
  const json& sec = ctx.cfg.section("potential");
  const std::string path = "config.potential";
  std::vector<Point> points;
  if (sec.contains("points")) points = points_at(sec["points"], path + ".points");
  std::string csv = "x,y,value,gx,gy,hxx,hxy,hyy\n";
  for (Point p : points) {
    const auto pr = potential::eval_potential(sys, p);
    csv += format_number(p.real()) + ',' + format_number(p.imag()) + ',' + format_number(pr.value) + ',' +
           format_number(pr.gradient(0)) + ',' + format_number(pr.gradient(1)) + ',' + format_number(pr.hessian(0, 0)) +
           ',' + format_number(pr.hessian(0, 1)) + ',' + format_number(pr.hessian(1, 1)) + '\n';
  }
  if (!points.empty()) ctx.out.add("potential.csv", csv);

  potential::CriticalSearchOptions opts;
  opts.grid = integer_or(sec, "grid", path, opts.grid);
  if (opts.grid < 4 || opts.grid > 512) throw validation_error(path + ".grid: must be in [4, 512]");
  geometry::Box box = geometry::bounding_box(sys);
  const Point pad = 0.1 * (box.hi - box.lo);
  box = {box.lo - pad, box.hi + pad};
  // Multistart jitter: a few seeded extra starts.
  std::mt19937_64 rng(ctx.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int jitter = integer_or(sec, "jitter_seeds", path, 8);
  for (int k = 0; k < jitter; ++k)
    opts.extra_seeds.push_back(box.lo + Point(u(rng) * (box.hi - box.lo).real(), u(rng) * (box.hi - box.lo).imag()));
  const auto search = potential::find_critical_points(sys, box, opts);
  json pts = json::array();
  SvgScene scene = domain_scene(sys, "critical points of the potential");
  for (const auto& p : search.points) {
    pts.push_back(to_json(p));
    scene.markers.push_back({p.location, p.kind == potential::CriticalKind::minimum ? "#d62728" : "#2ca02c", ""});
  }
  json rep = {{"critical_points", pts}, {"seed_failures", search.failures.size()}};
  if (sec.contains("symmetry")) {
    const json& s = sec["symmetry"];
    potential::Symmetry sym;
    const std::string kind = s.value("kind", std::string("none"));
    if (kind == "central") {
      sym.kind = potential::Symmetry::Kind::central;
    } else if (kind == "axial") {
      sym.kind = potential::Symmetry::Kind::axial;
    } else if (kind != "none") {
      throw validation_error(path + ".symmetry.kind: expected none, central or axial");
    }
    if (s.contains("center")) sym.center = point_at(s["center"], path + ".symmetry.center");
    if (s.contains("direction")) sym.direction = point_at(s["direction"], path + ".symmetry.direction");
    rep["breakup_verdict"] = potential::to_string(potential::predict_breakup(sys, sym));
  }
  ctx.log("potential: " + std::to_string(search.points.size()) + " critical points");
  ctx.report("critical_points.json", rep);
  ctx.svg("potential.svg", scene);
  return exit_ok;
}

int cmd_exact(const Context& ctx) {
  const json& sec = ctx.cfg.section("exact");
  const std::string path = "config.exact";
  const std::size_t nodes = static_cast<std::size_t>(integer_or(sec, "nodes", path, 2048));
  if (sec.contains("kufarev")) {
    const json& k = sec["kufarev"];
    const std::string kp = path + ".kufarev";
    const double a = number_at(k, "a", kp), R = number_at(k, "R", kp), r = number_at(k, "r", kp);
    const double q = number_or(k, "q", kp, 1.0);
    std::vector<geometry::BubbleSystem> shots;
    json maps = json::array();
    if (k.contains("times"))
      for (std::size_t i = 0; i < k["times"].size(); ++i) {
        const double t = k["times"][i].get<double>();
        const auto map = conformal::kufarev_solve(a, R, r, q, analysis::kufarev_map_time(r, q, t));
        auto sys = geometry::make_system({conformal::trace_boundary(map, nodes)}, t);
        maps.push_back({{"t", t}, {"alpha", map.alpha}, {"beta", map.beta}, {"gamma", map.gamma},
                        {"cubic_roots", map.cubic_roots}, {"area", sys.total_area()}});
        shots.push_back(std::move(sys));
      }
    const auto pc = analysis::kufarev_partial(a, R, r, q);
    json rep = {{"maps", maps},
                {"partial_contraction",
                 {{"z0", point_json(pc.z0)}, {"tau", pc.tau}, {"residual", pc.residual},
                  {"gradient_norm", pc.gradient_norm}}}};
    ctx.log("exact: kufarev partial contraction at tau = " + format_short(pc.tau));
    if (ctx.cfg.outputs.boundary && !shots.empty()) ctx.out.add("exact_boundary.csv", boundary_csv(shots, 1));
    ctx.report("exact.json", rep);
    if (!shots.empty()) {
      SvgScene scene = trajectory_scene(shots, "two-disk exact solution");
      scene.markers.push_back({pc.z0, "#d62728", "partial contraction point"});
      ctx.svg("exact.svg", scene);
    }
    return exit_ok;
  }

  const std::string fam = sec.value("family", std::string("quartic"));
  if (fam != "quartic" && fam != "saddle") throw validation_error(path + ".family: expected 'quartic' or 'saddle'");
  const auto family = fam == "quartic" ? conformal::Family::quartic : conformal::Family::saddle;
  const double beta = number_or(sec, "beta", path, 1.0);
  std::vector<double> areas = {0.1, 0.03, 0.01, 0.003, 0.001};
  if (sec.contains("areas")) {
    areas.clear();
    const auto pts = sec["areas"];
    if (!pts.is_array() || pts.empty()) throw validation_error(path + ".areas: expected a nonempty array");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!pts[i].is_number() || !(pts[i].get<double>() > 0.0))
        throw validation_error(path + ".areas[" + std::to_string(i) + "]: expected a positive number");
      areas.push_back(pts[i].get<double>());
    }
  }
  std::vector<geometry::BoundaryCurve> curves;
  std::vector<geometry::BubbleSystem> shots;
  json maps = json::array();
  for (double A : areas) {
    const auto map = conformal::exact_family(family, A, beta);
    auto curve = conformal::trace_boundary(map, nodes);
    maps.push_back({{"A", A}, {"area", conformal::map_area(map)}, {"univalent", conformal::univalence_check(map).univalent}});
    shots.push_back(geometry::make_system({curve}, A));
    curves.push_back(std::move(curve));
  }
  const auto fit = family == conformal::Family::quartic
                       ? analysis::fit_limit_curve(curves, areas, 2, beta, 0.0, analysis::LimitModel::symmetric)
                       : analysis::fit_limit_curve(curves, areas, 1, beta, 0.0, analysis::LimitModel::saddle_node);
  ctx.log("exact: " + fam + " family, final sup-distance " + format_short(fit.residuals.back()));
  if (ctx.cfg.outputs.boundary) ctx.out.add("exact_boundary.csv", boundary_csv(shots, 1));
  ctx.report("exact.json", {{"family", fam}, {"beta", beta}, {"maps", maps}, {"fit", to_json(fit)}});
  SvgScene scene;
  scene.title = fam + " family: rescaled boundary vs limit curve";
  const auto last = family == conformal::Family::quartic
                        ? geometry::normalize_for_asymptotics(curves.back(), 2, 0.0)
                        : geometry::renormalize(curves.back(), 2.0, nullptr, geometry::Extent::x_width);
  const auto target = family == conformal::Family::quartic ? conformal::limit_curve(2, beta, 0.0, 256)
                                                           : conformal::saddle_node_curve(beta, 256);
  scene.curves.push_back({last.vertices, "#1f77b4", 1.5, true, "rescaled boundary, A = " + format_short(areas.back())});
  scene.curves.push_back({target.vertices, "#d62728", 1.0, true, "limit curve"});
  scene.annotations.push_back("sup-distance " + format_short(fit.residuals.back()));
  ctx.svg("exact.svg", scene);
  return exit_ok;
}

int cmd_region(const Context& ctx) {
  const auto sys = ctx.cfg.system();
  if (sys.bubbles.size() != 2) throw validation_error("config.domains: region needs exactly two bubbles");
  const json& sec = ctx.cfg.section("region");
  int grid = ctx.opt.grid.value_or(integer_or(sec, "grid", "config.region", 16));
  if (grid < 16 || grid > 256) throw validation_error("--grid: must be in [16, 256]");
  // Each cell costs whole regulated runs: coarse spacing by default.
  const evolution::Numerics num = section_numerics(ctx, sec, "config.region", 0.02);
  const auto region = analysis::accessibility_region(sys, grid, num, [&](int done, int total) {
    ctx.log("region: ray " + std::to_string(done) + "/" + std::to_string(total));
  });
  ctx.out.add("region.csv", region_csv(region));
  json rays = json::array();
  for (const auto& r : region.rays)
    rays.push_back({{"angle", r.angle}, {"reach", r.reach}, {"length", r.length}, {"complete", r.complete},
                    {"failed", r.failed}, {"termination", r.termination}});
  json path = json::array();
  for (Point p : region.free_path) path.push_back(point_json(p));
  ctx.report("region.json", {{"grid", grid}, {"S1", region.S1}, {"S2", region.S2},
                             {"origin_accessible", region.origin_accessible}, {"rays", rays}, {"free_path", path}});
  ctx.svg("region.svg", region_scene(region));
  return exit_ok;
}

int cmd_sync(const Context& ctx) {
  const auto sys = ctx.cfg.system();
  const json& sec = ctx.cfg.section("sync");
  const auto num = section_numerics(ctx, sec, "config.sync");
  const int bis = integer_or(sec, "max_bisections", "config.sync", 12);
  const auto rep = analysis::find_synchronizing(sys, num, bis);
  ctx.log(std::string("sync: ") + (rep.strategy ? "synchronizing strategy found" : "no synchronizing strategy"));
  ctx.report("sync.json", to_json(rep));
  SvgScene scene = domain_scene(sys, "synchronizing endpoints");
  for (const auto& e : rep.endpoints) scene.markers.push_back({e.refined, "#d62728", "endpoint of bubble " + std::to_string(e.label)});
  ctx.svg("sync.svg", scene);
  return exit_ok;
}

int cmd_asymptotics(const Context& ctx) {
  const auto sys = ctx.cfg.system();
  const double t_end = ctx.cfg.t_end.value_or(sys.total_area() / ctx.cfg.rate);
  const auto traj = evolution::run_free(sys, ctx.cfg.rate, t_end, ctx.cfg.probes, ctx.cfg.numerics);
  const auto points = analysis::contraction_points(traj);
  json cps = json::array(), fits = json::array();
  const double L = std::sqrt(traj.initial_area);
  for (const auto& cp : points) {
    cps.push_back(to_json(cp));
    geometry::BubbleSystem after;
    for (const auto& s : traj.snapshots)
      if (s.time >= cp.time && !s.find(cp.label)) {
        after = s;
        break;
      }
    const auto field = analysis::accumulated_potential(traj.initial, after);
    const auto cls = potential::classify(field, cp.refined, L);
    json entry = {{"label", cp.label}, {"classification", to_json(cls)}};
    try {
      if (cp.kind == analysis::ContractionKind::partial)
        entry["logslow"] = to_json(analysis::fit_logslow(traj, cp.label, cls.degree));
      if (cls.kind == potential::CriticalKind::minimum)
        entry["ellipse"] = to_json(analysis::fit_ellipse_asymptotics(traj, cp.location, field(cp.refined).hessian));
    } catch (const Error& e) {
      entry["error"] = e.what();
    }
    fits.push_back(entry);
  }
  ctx.log("asymptotics: " + std::to_string(points.size()) + " contraction points");
  if (ctx.cfg.outputs.events) {
    json events = json::array();
    for (const auto& e : traj.events) events.push_back(to_json(e));
    ctx.out.add("events.json", dump(events));
  }
  ctx.report("asymptotics.json", {{"trajectory", to_json(traj)}, {"contraction_points", cps}, {"fits", fits}});
  SvgScene scene = trajectory_scene(traj.snapshots, "contraction points");
  for (const auto& cp : points) scene.markers.push_back({cp.refined, "#d62728", "contraction point " + std::to_string(cp.label)});
  ctx.svg("asymptotics.svg", scene);
  return exit_ok;
}

int cmd_sweep(const Context& ctx) {
  const json& sec = ctx.cfg.section("sweep");
  const std::string path = "config.sweep";
  if (sec.value("family", std::string("dumbbell")) != "dumbbell")
    throw validation_error(path + ".family: only 'dumbbell' is built in");
  const double lo = number_or(sec, "s_lo", path, 0.005), hi = number_or(sec, "s_hi", path, 0.105);
  if (!(lo > 0.0) || !(hi > lo)) throw validation_error(path + ": need 0 < s_lo < s_hi");
  const int samples = integer_or(sec, "samples", path, 11);
  if (samples < 2) throw validation_error(path + ".samples: must be >= 2");
  const double tol = number_or(sec, "tolerance", path, 1e-3);
  evolution::Numerics coarse = section_numerics(ctx, sec, path, 0.02);
  std::optional<evolution::Numerics> refined;
  if (sec.contains("refined_h_factor")) {
    refined = coarse;
    refined->h_factor = number_at(sec, "refined_h_factor", path);
  }
  const auto family = analysis::dumbbell_family(static_cast<std::size_t>(integer_or(sec, "nodes", path, 300)));
  const auto rep = analysis::rupture_boundary_sweep(family, lo, hi, samples, coarse, tol, refined ? &*refined : nullptr);
  std::string csv = "s,breaks,criterion_breaks,breakup_time\n";
  for (const auto& s : rep.samples)
    csv += format_number(s.s) + ',' + (s.breaks ? "1" : "0") + ',' + (s.criterion_breaks ? "1" : "0") + ',' +
           format_number(s.breakup_time) + '\n';
  ctx.out.add("sweep.csv", csv);
  ctx.report("sweep.json", to_json(rep));
  ctx.log(rep.sigma ? "sweep: sigma = " + format_short(*rep.sigma) : "sweep: no transition in range");
  if (rep.sigma) ctx.svg("sweep.svg", domain_scene(family.make(*rep.sigma), "member at sigma = " + format_short(*rep.sigma)));
  return exit_ok;
}

int cmd_check(const Context& ctx) {
  const json& sec = ctx.cfg.section("check");
  const int systems = integer_or(sec, "systems", "config.check", 100);
  const int probes = integer_or(sec, "probes", "config.check", 10);
  std::vector<SuiteResult> results = {gradient_bound_suite(systems, probes, ctx.seed), ellipse_oracle_suite(),
                                      qn_positivity_suite()};
  results.push_back(area_law_suite(ctx.cfg.system(), number_or(sec, "fraction", "config.check", 0.2),
                                   ctx.cfg.numerics.h_factor));
  json arr = json::array();
  bool all = true;
  for (const auto& r : results) {
    all = all && r.pass;
    ctx.log(std::string(r.pass ? "PASS " : "FAIL ") + r.name + ": " + r.detail);
    arr.push_back({{"name", r.name}, {"pass", r.pass}, {"measured", r.measured}, {"bound", r.bound}, {"detail", r.detail}});
  }
  ctx.report("check.json", {{"seed", ctx.seed}, {"suites", arr}, {"pass", all}});
  return all ? exit_ok : exit_check_failed;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"simulate", "potential", "exact", "region",
                                                 "sync",     "asymptotics", "sweep", "check"};
  return names;
}

int run_command(const std::string& command, const ScenarioConfig& config, const RunOptions& options) {
  int code = exit_ok;
  std::string error;
  std::optional<OutputWriter> writer;
  try {
    if (options.stride < 1) throw validation_error("--stride: must be >= 1");
    writer.emplace(options.out);
    const Context ctx{config, options, *writer, options.seed.value_or(config.seed)};
    if (command == "simulate") {
      code = cmd_simulate(ctx);
    } else if (command == "potential") {
      code = cmd_potential(ctx);
    } else if (command == "exact") {
      code = cmd_exact(ctx);
    } else if (command == "region") {
      code = cmd_region(ctx);
    } else if (command == "sync") {
      code = cmd_sync(ctx);
    } else if (command == "asymptotics") {
      code = cmd_asymptotics(ctx);
    } else if (command == "sweep") {
      code = cmd_sweep(ctx);
    } else if (command == "check") {
      code = cmd_check(ctx);
    } else {
      throw validation_error("unknown command '" + command + "'");
    }
  } catch (const Error& e) {
    error = e.what();
    switch (e.kind()) {
      case ErrorKind::validation: code = exit_validation; break;
      case ErrorKind::cusp: code = exit_cusp; break;
      case ErrorKind::geometry:
      case ErrorKind::solver: code = exit_solver; break;
    }
  } catch (const std::exception& e) {
    error = e.what();
    code = exit_solver;
  }
  if (!error.empty()) std::cerr << "error: " << error << '\n';
  if (writer) {
    try {
      writer->write_manifest(command, code, error);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
    }
  }
  return code;
}

}  // namespace hsb::cli
