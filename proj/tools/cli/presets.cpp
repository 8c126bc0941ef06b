#include "cli/presets.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "tpa/model.hpp"

namespace tpa::cli {

std::vector<std::string> preset_dirs(const std::optional<std::string>& dir) {
  std::vector<std::string> out;
  if (dir) out.push_back(*dir);
  if (const char* env = std::getenv("TPA_PRESET_DIR"); env && *env) out.emplace_back(env);
#ifdef TPA_PRESET_RELATIVE_DIR
  // Installed layout relative to the running binary, for relocated installs.
  std::error_code ec;
  const auto exe = std::filesystem::read_symlink("/proc/self/exe", ec);
  if (!ec) out.push_back((exe.parent_path() / ".." / TPA_PRESET_RELATIVE_DIR).lexically_normal().string());
#endif
#ifdef TPA_PRESET_INSTALL_DIR
  out.emplace_back(TPA_PRESET_INSTALL_DIR);
#endif
#ifdef TPA_PRESET_SOURCE_DIR
  out.emplace_back(TPA_PRESET_SOURCE_DIR);
#endif
  return out;
}

std::string find_preset(const std::string& name, const std::optional<std::string>& dir) {
  namespace fs = std::filesystem;
  if (fs::path(name).extension() == ".json" && fs::exists(name)) return name;
  for (const auto& d : preset_dirs(dir)) {
    const fs::path p = fs::path(d) / (name + ".json");
    if (fs::exists(p)) return p.string();
  }
  throw Error(Errc::invalid_config, "preset '" + name + "' not found");
}

Preset load_preset(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::io_failure, "cannot read " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::invalid_config, path + ": " + e.what());
  }
  Preset p;
  p.name = std::filesystem::path(path).stem().string();
  p.description = j.value("description", "");
  p.command = j.value("command", "");
  if (p.command.empty()) throw Error(Errc::invalid_config, path + ": missing 'command'");
  if (!j.contains("runs") || !j.at("runs").is_array() || j.at("runs").empty())
    throw Error(Errc::invalid_config, path + ": 'runs' must be a nonempty array");
  for (const auto& r : j.at("runs")) {
    if (!r.is_object()) throw Error(Errc::invalid_config, path + ": every run must be an object");
    p.runs.push_back(r);
  }
  return p;
}

}  // namespace tpa::cli
