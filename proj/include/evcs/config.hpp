#pragma once

#include <cstdint>
#include <string>

#include "evcs/trainer.hpp"

namespace evcs {

// Thrown for malformed configs and bad CLI usage; maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a required input artifact (weights, request file) is missing;
// maps to exit code 3.
struct MissingArtifact : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  ScenarioSpec scenario;
  TrainConfig train;

  // Stable 64-bit digest of the fully resolved config; stamped into weight
  // files and output CSVs so artifacts can be traced to their settings. The
  // episode count is excluded: run length is a schedule knob, not experiment
  // identity, and it is recorded separately in each weight file's metadata.
  uint64_t fingerprint() const;
  std::string canonical_json() const;
};

// Parses a JSON config. Absent fields keep defaults ("pattern.name" selects
// the builtin arrival tables); unknown keys are rejected so typos surface.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

ExperimentConfig default_config();

}  // namespace evcs
