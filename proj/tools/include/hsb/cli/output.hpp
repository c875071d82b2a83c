#pragma once

// Deterministic CSV/JSON emission and atomic file commits.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "hsb/analysis.hpp"
#include "hsb/evolution.hpp"
#include "hsb/geometry.hpp"

namespace hsb::cli {

using nlohmann::json;

// Shortest round-trip decimal form ("%.17g").
std::string format_number(double v);
// Six significant digits for annotations.
std::string format_short(double v);

// t,bubble,idx,x,y; every `stride`-th snapshot plus the last one.
std::string boundary_csv(const std::vector<geometry::BubbleSystem>& snapshots, int stride = 1);
std::vector<geometry::BubbleSystem> parse_boundary_csv(const std::string& text);
std::string probes_csv(const evolution::Trajectory& trajectory);
std::string region_csv(const analysis::RegionMap& region);

json to_json(const evolution::Event& event);
json to_json(const evolution::Trajectory& trajectory);  // summary and events, no boundaries
json to_json(const evolution::Strategy& strategy);
json to_json(const analysis::FitReport& report);
json to_json(const analysis::ContractionPoint& point);
json to_json(const potential::CriticalPoint& point);
json to_json(const analysis::SyncReport& report);
json to_json(const analysis::FamilySweepReport& report);
std::string dump(const json& value);  // two-space indent, trailing newline

// Collects outputs and commits each through a temporary file and rename.
// A manifest lists what was written; on failure the manifest records the
// error and the partial results.
class OutputWriter {
 public:
  explicit OutputWriter(std::filesystem::path directory);

  void add(const std::string& name, const std::string& contents);
  const std::vector<std::string>& written() const { return written_; }
  void write_manifest(const std::string& command, int exit_code, const std::string& error = {});

 private:
  std::filesystem::path dir_;
  std::vector<std::string> written_;
};

void write_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace hsb::cli
