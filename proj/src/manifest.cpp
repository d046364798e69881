#include "bandforge/manifest.hpp"

#include <fstream>

#include "bandforge/errors.hpp"

namespace bandforge {

nlohmann::json RunManifest::to_json() const {
  nlohmann::json stages = nlohmann::json::object();
  for (const auto& [name, secs] : stage_seconds) stages[name] = secs;
  return nlohmann::json{{"schema_version", kManifestSchemaVersion},
                        {"tool", kToolVersion},
                        {"command", command},
                        {"config", config},
                        {"seed", seed},
                        {"wall_seconds", wall_seconds},
                        {"stage_seconds", stages}};
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot create manifest file '" + path + "'");
  out << manifest.to_json().dump(2) << '\n';
  if (!out) throw InputError("write failed for '" + path + "'");
}

}  // namespace bandforge
