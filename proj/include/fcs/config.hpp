#pragma once

// Scenario configuration: JSON document -> validated ScenarioConfig. Every
// check that can be made without computing runs here, and failures carry the
// dotted path of the offending field (e.g. "state.beta").

#include <string>
#include <vector>

#include "fcs/diagnostics.hpp"
#include "json.hpp"

namespace fcs {

struct ScanSpec {
  enum class Kind { length, depth, variance };
  std::string name;
  Kind kind = Kind::length;
  std::vector<double> values;
};

std::string to_string(ScanSpec::Kind kind);

struct ScenarioConfig {
  enum class ModelKind { two_lead, chiral };

  std::string name;
  ModelKind model = ModelKind::two_lead;
  LatticeScenarioSpec lattice;  // two_lead
  ChiralModel chiral;           // chiral
  AnalysisOptions analysis;     // threads is set by the caller
  Index noncompact_steps = -1;  // chiral only; < 0 skips the demo
  std::vector<ScanSpec> scans;

  Index dimension() const;
  Scenario build() const;
  const ScanSpec* find_scan(const std::string& name) const;
};

/// Throws ConfigError (path + message) on the first invalid field.
ScenarioConfig parse_config(const nlohmann::json& doc);

/// Reads and parses a file; unreadable or malformed JSON is a ConfigError.
ScenarioConfig load_config(const std::string& path);

/// Normalized echo with every default filled in; parse_config(to_json(c))
/// reproduces c.
nlohmann::json to_json(const ScenarioConfig& config);

}  // namespace fcs
