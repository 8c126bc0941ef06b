#pragma once

// Figure presets are JSON files shipped with the tool:
//   {"description": "...", "command": "sweep", "runs": [{settings}, ...]}
// Each run is a set of RunConfig keys layered over the defaults.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace tpa::cli {

struct Preset {
  std::string name;
  std::string description;
  std::string command;
  std::vector<nlohmann::json> runs;
};

// Directories searched in order: `dir` when given, $TPA_PRESET_DIR, the
// share directory next to the running binary, the configured install
// directory, then the source tree.
std::vector<std::string> preset_dirs(const std::optional<std::string>& dir);
std::string find_preset(const std::string& name, const std::optional<std::string>& dir);
Preset load_preset(const std::string& path);

}  // namespace tpa::cli
