#include <filesystem>

#include <gtest/gtest.h>

#include "hsb/cli/commands.hpp"
#include "hsb/cli/config.hpp"
#include "hsb/cli/output.hpp"
#include "hsb/cli/svg.hpp"
#include "hsb/error.hpp"

namespace {

using namespace hsb;
using namespace hsb::cli;
namespace fs = std::filesystem;

std::string error_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::validation);
    return e.what();
  }
  return "";
}

json disk_config() {
  return json::parse(R"({"domains": [{"type": "disk", "radius": 1.0, "nodes": 128}],
                          "numerics": {"h_factor": 0.05}, "probes": [[3, 0]]})");
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hsb_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

TEST(Config, ErrorsNameTheField) {
  auto doc = disk_config();
  doc["rate"] = -1.0;
  EXPECT_EQ(error_of(doc).rfind("config.rate:", 0), 0u);
  doc = disk_config();
  doc["domains"][0].erase("radius");
  EXPECT_EQ(error_of(doc).rfind("config.domains[0].radius:", 0), 0u);
  doc = disk_config();
  doc["domains"][0]["type"] = "blob";
  EXPECT_NE(error_of(doc).find("config.domains[0].type"), std::string::npos);
  doc = disk_config();
  doc["numerics"]["h_factor"] = 5.0;
  EXPECT_EQ(error_of(doc).rfind("config.numerics.h_factor:", 0), 0u);
  doc = disk_config();
  doc["bogus"] = 1;
  EXPECT_EQ(error_of(doc).rfind("config.bogus:", 0), 0u);
  doc = disk_config();
  doc["mode"] = "regulated";
  EXPECT_EQ(error_of(doc).rfind("config.domains:", 0), 0u);
}

TEST(Config, ParsesAllDomainKinds) {
  const auto doc = json::parse(R"({"domains": [
      {"type": "disk", "center": [-4, 0], "radius": 0.5},
      {"type": "ellipse", "center": [0, 4], "a": 1, "b": 0.5, "angle": 0.3},
      {"type": "polyline", "points": [[3,3],[4,3],[4,4],[3.5,4.5],[3,4],[2.8,3.6],[2.9,3.3],[2.95,3.1]]},
      {"type": "profile", "x": [0, 0.5, 1], "f": [0.2, 0.1, 0], "nodes": 64},
      {"type": "laurent", "A": 0.5, "coeffs": [[8, 0], [0.05, 0]]},
      {"type": "kufarev", "a": 3, "R": 1, "r": 0.5, "q": 1, "t": 0.5}]})");
  const auto cfg = parse_config(doc);
  ASSERT_EQ(cfg.domains.size(), 6u);
  for (const auto& d : cfg.domains) EXPECT_TRUE(geometry::validate(d.curve).ok()) << d.type;
  EXPECT_NEAR(geometry::area(cfg.domains[0].curve), 0.25 * 3.141592653589793, 1e-12);
}

TEST(Config, RegulatedNeedsStrategyWithinAreas) {
  auto doc = json::parse(R"({"domains": [{"type": "disk", "center": [-2, 0], "radius": 1},
                                         {"type": "disk", "center": [2, 0], "radius": 1}],
                             "mode": "regulated"})");
  EXPECT_EQ(error_of(doc).rfind("config.strategy:", 0), 0u);
  doc["strategy"] = {{"volumes", {{5.0, 0.0}}}};
  EXPECT_EQ(error_of(doc).rfind("config.strategy:", 0), 0u);
  doc["strategy"] = {{"volumes", {{0.5, 0.0}, {0.0, 0.5}}}};
  EXPECT_NO_THROW(parse_config(doc));
}

TEST(Output, BoundaryCsvRoundTripIsLossless) {
  auto a = geometry::make_system({geometry::make_ellipse({0.1, 0.2}, 1.0 / 3.0, 0.25, 37)}, 0.1);
  auto b = geometry::make_system({geometry::make_circle({-2, 0}, 0.7, 19), geometry::make_circle({2, 0}, 1e-7, 11)},
                                 1.0 / 7.0);
  b.bubbles[1].label = 5;
  const std::string csv = boundary_csv({a, b});
  const auto back = parse_boundary_csv(csv);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].time, 1.0 / 7.0);
  EXPECT_EQ(back[1].bubbles[1].label, 5);
  EXPECT_EQ(back[0].bubbles[0].boundary.vertices, a.bubbles[0].boundary.vertices);
  EXPECT_EQ(back[1].bubbles[1].boundary.vertices, b.bubbles[1].boundary.vertices);
  EXPECT_EQ(boundary_csv(back), csv);
}

TEST(Output, StrideKeepsLastSnapshot) {
  std::vector<geometry::BubbleSystem> shots;
  for (int k = 0; k < 5; ++k) shots.push_back(geometry::make_system({geometry::make_circle({0, 0}, 1.0, 8)}, k));
  const auto back = parse_boundary_csv(boundary_csv(shots, 3));
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[2].time, 4.0);
}

TEST(Svg, DeterministicAndRejectsEmpty) {
  SvgScene scene;
  EXPECT_THROW(render_svg(scene), Error);
  scene.curves.push_back({geometry::make_circle({0, 0}, 1.0, 16).vertices, "#000000", 1.0, true, "circle"});
  scene.markers.push_back({{0.5, 0.0}, "#ff0000", "point"});
  scene.annotations.push_back("distance 0.123457");
  const std::string svg = render_svg(scene);
  EXPECT_EQ(svg, render_svg(scene));
  EXPECT_NE(svg.find("<polygon"), std::string::npos);
  EXPECT_NE(svg.find("circle</text>"), std::string::npos);
  EXPECT_EQ(format_short(1.0 / 3.0), "0.333333");
}

TEST(Commands, SimulateIsReproducible) {
  const auto cfg = parse_config(disk_config());
  RunOptions opt;
  opt.quiet = true;
  const fs::path first = scratch("a"), second = scratch("b");
  opt.out = first;
  ASSERT_EQ(run_command("simulate", cfg, opt), exit_ok);
  opt.out = second;
  ASSERT_EQ(run_command("simulate", cfg, opt), exit_ok);
  for (const char* f : {"boundary.csv", "events.json", "probes.csv", "report.json", "trajectory.svg", "manifest.json"})
    EXPECT_EQ(read_file(first / f), read_file(second / f)) << f;
  const auto events = json::parse(read_file(opt.out / "events.json"));
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0]["kind"], "disappearance");
}

TEST(Commands, ExitCodes) {
  const auto cfg = parse_config(disk_config());
  RunOptions opt;
  opt.quiet = true;
  opt.out = scratch("c");
  EXPECT_EQ(run_command("region", cfg, opt), exit_validation);
  const auto manifest = json::parse(read_file(opt.out / "manifest.json"));
  EXPECT_EQ(manifest["exit_code"], exit_validation);
  EXPECT_TRUE(manifest["partial"].get<bool>());
  EXPECT_EQ(run_command("nonsense", cfg, opt), exit_validation);
  opt.stride = 0;
  EXPECT_EQ(run_command("simulate", cfg, opt), exit_validation);
}

TEST(Commands, CheckSuitesPass) {
  auto doc = disk_config();
  doc["check"] = {{"systems", 20}, {"probes", 5}};
  const auto cfg = parse_config(doc);
  RunOptions opt;
  opt.quiet = true;
  opt.out = scratch("d");
  EXPECT_EQ(run_command("check", cfg, opt), exit_ok);
  EXPECT_TRUE(json::parse(read_file(opt.out / "check.json"))["pass"].get<bool>());
}

}  // namespace
