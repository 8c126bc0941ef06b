// tpa: two-photon absorption curves, optimizations, sweeps and reference data.

#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "cli/presets.hpp"
#include "cli/run_config.hpp"
#include "tpa/model.hpp"

namespace {

std::string kebab(std::string key) {
  for (char& c : key)
    if (c == '_') c = '-';
  return key;
}

int exit_code(tpa::Errc code) {
  switch (code) {
    case tpa::Errc::invalid_config:
    case tpa::Errc::unsupported_family:
    case tpa::Errc::invalid_rate:
    case tpa::Errc::invalid_window:
    case tpa::Errc::negative_horizon:
    case tpa::Errc::not_resonant:
      return 2;
    case tpa::Errc::io_failure:
      return 4;
    default:
      return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace tpa::cli;
  CLI::App app{"Two-photon absorption by a three-level ladder atom"};
  app.set_version_flag("--version", std::string("tpa ") + TPA_VERSION);
  app.require_subcommand(1, 1);

  const std::vector<std::pair<std::string, std::string>> commands{
      {"curve", "P_f(t) with the input photon densities, or the density matrix for coherent drives"},
      {"optimize", "maximize the peak excitation probability over pulse parameters"},
      {"sweep", "ratio sweeps, parameter limits, entropy, sensitivity and detuning maps, joint densities"},
      {"reference", "closed-form quantities of the perfectly exciting state"},
      {"coherent", "density-matrix evolution under coherent pulses"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  std::optional<std::string> config_path, preset_dir;
  bool dump = false;
  app.add_option("--config", config_path, "key = value or JSON settings file; flags override it");
  app.add_option("--preset-dir", preset_dir, "directory searched first for presets");
  app.add_flag("--dump-config", dump, "print the effective settings and exit");

  std::map<std::string, std::string> values;
  std::map<std::string, bool> flags;
  std::vector<std::pair<std::string, CLI::Option*>> bound;
  for (const auto& f : fields()) {
    if (f.key == "command") continue;
    std::string names = "--" + kebab(f.key);
    if (f.key == "gamma_ratio") names += ",--ratio";
    if (f.is_flag) {
      if (f.key == "mu_free") names += ",!--mu-zero";
      bound.emplace_back(f.key, app.add_flag(names, flags[f.key], f.help));
    } else {
      bound.emplace_back(f.key, app.add_option(names, values[f.key], f.help));
    }
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    // Settings from the config file and the command line, applied over a
    // preset run (or the defaults).
    auto layer = [&](RunConfig& cfg) {
      if (config_path) apply_file(cfg, *config_path);
      for (const auto& [key, opt] : bound) {
        if (opt->count() == 0) continue;
        set_value(cfg, key, field(key).is_flag ? (flags[key] ? "true" : "false") : values[key]);
      }
      cfg.command = command;
    };
    RunConfig probe;
    layer(probe);

    std::vector<nlohmann::json> runs{nlohmann::json::object()};
    if (!probe.preset.empty()) {
      const Preset p = load_preset(find_preset(probe.preset, preset_dir));
      if (p.command != command)
        throw tpa::Error(tpa::Errc::invalid_config,
                         "preset '" + p.name + "' runs '" + p.command + "', not '" + command + "'");
      runs = p.runs;
    }

    for (const auto& run_settings : runs) {
      RunConfig cfg;
      apply_json(cfg, run_settings);
      layer(cfg);

      if (dump) {
        std::cout << to_text(cfg) << "\n";
        continue;
      }
      const Outcome out = run(cfg);
      for (const auto& path : out.files) std::cout << "wrote " << path << "\n";
      if (!out.summary.empty()) std::cout << out.summary << "\n";
    }
  } catch (const tpa::Error& e) {
    std::cerr << "error (" << tpa::to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
