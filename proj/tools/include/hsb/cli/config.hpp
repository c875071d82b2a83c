#pragma once

// Scenario files: one JSON document with sections domains, mode, rate,
// strategy, probes, numerics, outputs, seed and per-command sections.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hsb/evolution.hpp"
#include "hsb/geometry.hpp"

namespace hsb::cli {

using nlohmann::json;

struct OutputSelection {
  bool boundary = true;
  bool events = true;
  bool probes = true;
  bool reports = true;
  bool svg = true;
};

struct DomainSpec {
  std::string type;
  geometry::BoundaryCurve curve;
  json source;  // the parsed entry, echoed into reports
};

struct ScenarioConfig {
  std::vector<DomainSpec> domains;
  enum class Mode { free, regulated } mode = Mode::free;
  double rate = 1.0;
  std::optional<double> t_end;
  std::optional<evolution::Strategy> strategy;
  std::vector<geometry::Point> probes;
  evolution::Numerics numerics;
  OutputSelection outputs;
  std::uint64_t seed = 0;
  json sections = json::object();  // potential, exact, region, sync, asymptotics, sweep, check

  geometry::BubbleSystem system() const;
  // Command section (empty object when absent).
  const json& section(const std::string& name) const;
};

// Relative polyline paths resolve against `base_dir`. Errors are validation
// errors whose message starts with the offending field path.
ScenarioConfig parse_config(const json& document, const std::filesystem::path& base_dir = {});
ScenarioConfig load_config(const std::filesystem::path& path);

// Field-path accessors shared with the command sections.
double number_at(const json& object, const std::string& key, const std::string& path);
double number_or(const json& object, const std::string& key, const std::string& path, double fallback);
int integer_or(const json& object, const std::string& key, const std::string& path, int fallback);
geometry::Point point_at(const json& value, const std::string& path);
std::vector<geometry::Point> points_at(const json& value, const std::string& path);

}  // namespace hsb::cli
