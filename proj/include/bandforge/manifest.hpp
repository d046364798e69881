#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace bandforge {

inline constexpr int kManifestSchemaVersion = 1;
inline constexpr const char* kToolVersion = "bandforge 0.1.0";

// Reproducibility record written next to every output: the subcommand, the
// full effective configuration (every knob after defaulting), the seed, and
// wall-clock timings. Same manifest + same binary => bit-identical outputs.
struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  std::vector<std::pair<std::string, double>> stage_seconds;

  nlohmann::json to_json() const;
};

void write_manifest(const std::string& path, const RunManifest& manifest);

}  // namespace bandforge
