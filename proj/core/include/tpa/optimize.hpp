#pragma once

// Multistart simplex maximization of the peak excitation probability over
// pulse parameters.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tpa/absorption.hpp"
#include "tpa/coherent.hpp"
#include "tpa/model.hpp"
#include "tpa/states.hpp"

namespace tpa {

enum class Target { gaussian_product, entangled_gaussian, rising_exp, decaying_exp, coherent };

std::string_view target_name(Target t) noexcept;
Target parse_target(std::string_view name);

// Parameter names in vector order, e.g. {"omega1", "omega2", "mu"}.
std::vector<std::string> parameter_names(Target t);
// Index of the delay parameter (mu or t_shift), if the target has one.
std::optional<std::size_t> delay_index(Target t);

struct Bound {
  double lo, hi;
  bool log_scale;  // widths are searched in log coordinates
};
// Widths in [1e-3, 1e3]·Γf; delays in ±50/min(Γe, Γf).
std::vector<Bound> parameter_bounds(Target t, const Atom& atom);

struct OptimizationProblem {
  Atom atom;
  Target target = Target::gaussian_product;
  bool delay_free = true;           // false freezes mu or t_shift at 0
  bool tie_widths = false;          // second width follows the first
  std::vector<std::optional<double>> frozen;  // per parameter; empty means none
  std::vector<std::vector<double>> extra_starts;
  bool default_starts = true;
  unsigned long long seed = 0;      // 0: no jitter of the start points
  int max_evals_per_start = 2000;
  double initial_step = 0.3;        // starting simplex edge in search coordinates
  double n1 = 1.0, n2 = 1.0;        // coherent target only
  PfOptions pf;
  CoherentOptions coherent;
};

struct StartRecord {
  std::vector<double> start;
  std::vector<double> best;
  double p_max = 0.0;
  int evaluations = 0;
  bool converged = false;
};

struct OptimizationResult {
  Target target = Target::gaussian_product;
  std::vector<std::string> names;
  std::vector<double> params;
  double p_max = 0.0;
  double t_at_max = 0.0;
  int evaluations = 0;           // distinct objective evaluations
  bool converged = false;        // at least one start met the tolerances
  double simplex_diameter = 0.0;
  std::vector<StartRecord> starts;
};

// Peak probability and its time for one full parameter vector.
Peak evaluate_target(const OptimizationProblem& problem, const std::vector<double>& params);

// Heuristic start points: Ω1 ∈ {Γe/2, Γe, Γe+Γf, 2(Γe+Γf)} combined with
// Ω2 ∈ {Γe+Γf, 2(Γe+Γf)}, delays at 1/Γe.
std::vector<std::vector<double>> default_starts(Target t, const Atom& atom);

// A start that exhausts its budget is still reported; `converged` is false
// only when no start met the tolerances.
OptimizationResult optimize_pulse(const OptimizationProblem& problem);

struct AsymptoticRow {
  double ratio = 0.0;
  OptimizationResult result;
  std::vector<std::pair<std::string, double>> normalized;
  std::optional<double> entropy_bits;
  std::string error;  // nonempty when the row failed
};

// Normalized parameter columns: Ω1/Γe, Ω2/(Γe+Γf), μΓe for the product
// families, Ω+/Γf, Ω−/(Γf+2Γe), μΓe for the entangled one.
std::vector<std::pair<std::string, double>> normalized_parameters(Target t, const Atom& atom,
                                                                  const std::vector<double>& params);

std::vector<AsymptoticRow> asymptotic_checks(Target t, const std::vector<double>& ratios, bool delay_free = true);
// Same, with `base` supplying everything but the rates.
std::vector<AsymptoticRow> asymptotic_checks(const OptimizationProblem& base, const std::vector<double>& ratios);
std::string asymptotic_csv(const std::vector<AsymptoticRow>& rows, const Metadata& meta);

void to_json(nlohmann::json& j, const OptimizationProblem& p);
void from_json(const nlohmann::json& j, OptimizationProblem& p);
void to_json(nlohmann::json& j, const OptimizationResult& r);

}  // namespace tpa
