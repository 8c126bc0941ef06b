#pragma once

// Settings of one tool invocation. Every field is reachable from a command
// line flag, a key = value line and a JSON key through one shared table, so
// the three representations cannot drift apart.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace tpa::cli {

struct RunConfig {
  std::string command = "curve";  // curve, optimize, sweep, reference, coherent
  std::string family = "gaussian-product";

  // Atom, in Γf units.
  double gamma_ratio = 1.0;
  double delta1 = 0.0;
  double delta2 = 0.0;

  // State or drive; unset widths and delays are optimized where needed.
  bool mu_free = true;
  std::optional<double> omega1, omega2, mu;
  std::optional<double> omega_plus, omega_minus;
  std::optional<double> t_shift;
  double t_star = 0.0;
  std::optional<double> t0;
  double n1 = 1.0, n2 = 1.0;

  // Sampling window for curves and densities; unset means automatic.
  std::optional<double> t_min, t_max;
  int samples = 400;

  // Sweeps.
  std::string kind = "ratio";  // ratio, comparison, asymptotic, entropy, sensitivity, detuning, densities
  std::vector<double> ratios;  // empty: 13 log-spaced points over [0.01, 100]
  std::string policy = "reoptimize";
  int grid = 0;  // points per map axis; 0 picks the kind's default
  std::optional<double> axis1_min, axis1_max, axis2_min, axis2_max;
  bool fast = false;

  // Run control.
  std::string out = "out";
  std::string name;  // output file stem; empty uses the command name
  int jobs = 1;
  unsigned long long seed = 0;
  std::string preset;
  std::optional<double> tol;
  int schmidt_max_grid = 1600;
};

struct Field {
  std::string key;   // snake_case; flags use the kebab-case spelling
  std::string help;
  bool is_flag;      // boolean, settable without a value on the command line
  bool in_hash;      // false for settings that cannot change results
  std::function<std::optional<std::string>(const RunConfig&)> get;  // nullopt when unset
  std::function<void(RunConfig&, const std::string&)> set;
};

const std::vector<Field>& fields();
const Field& field(std::string_view key);

// Lowercases, maps '-' to '_' and resolves aliases such as
// gamma_e_over_gamma_f. Throws invalid_config for unknown keys.
std::string canonical_key(std::string_view key);

void set_value(RunConfig& cfg, std::string_view key, const std::string& value);

// Applies a file body: a JSON object, or key = value lines with '#'
// comments. Later keys win.
void apply_text(RunConfig& cfg, const std::string& text);
void apply_json(RunConfig& cfg, const nlohmann::json& j);
void apply_file(RunConfig& cfg, const std::string& path);

// Key = value lines for every set field, in table order.
std::string to_text(const RunConfig& cfg);
nlohmann::json to_json(const RunConfig& cfg);

// Fields that affect results, as compact JSON with sorted keys.
std::string canonical_json(const RunConfig& cfg);
std::string config_hash(const RunConfig& cfg);

}  // namespace tpa::cli
