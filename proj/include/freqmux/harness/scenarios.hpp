#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "freqmux/harness/config.hpp"

namespace freqmux::harness {

struct SummaryCheck {
  std::string name;
  double value;
  double lo;
  double hi;
  bool passed;
};

struct ScenarioSummary {
  std::string scenario;
  std::string config_hash;
  std::vector<std::pair<std::string, std::string>> values;
  std::vector<SummaryCheck> checks;
  std::vector<std::string> files;  // relative to the output directory
  double wall_time_s = 0.0;

  bool all_passed() const;
  void write(std::ostream& out) const;
};

// Runs the configured scenario, writing its data files, summary.txt and
// manifest.json into cfg.output_dir.
ScenarioSummary run_scenario(const ScenarioConfig& cfg, std::ostream* log = nullptr);

// Configuration echoed in a manifest written by run_scenario.
ScenarioConfig config_from_manifest(const std::string& path);

// FNV-1a 64 of a file's bytes, as 16 hex digits.
std::string file_hash(const std::string& path);

}  // namespace freqmux::harness
