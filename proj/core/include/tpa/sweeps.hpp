#pragma once

// Figure datasets: ratio sweeps, sensitivity maps and detuning maps.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tpa/optimize.hpp"
#include "tpa/report.hpp"

namespace tpa {

struct SweepAxis {
  std::string name;
  double min = 0.0;
  double max = 1.0;
  int n_points = 2;
  bool log_scale = false;
  std::vector<double> explicit_values;  // overrides the range when nonempty

  std::vector<double> values() const;
};

void validate(const SweepAxis& axis);

struct GridCell {
  std::vector<double> values;  // one per GridResult::columns entry
  std::vector<double> params;  // optimized parameters behind the first value
  bool converged = true;
  std::string error;
};

// Cells are stored row-major with the first axis slowest.
struct GridResult {
  std::vector<SweepAxis> axes;
  std::vector<std::string> columns;
  std::vector<std::string> param_names;
  std::vector<GridCell> cells;

  const GridCell& at(std::size_t i, std::size_t j = 0) const;

  // Long format: axis values, value columns, converged flag.
  std::string csv(const Metadata& meta) const;
  nlohmann::json json(const Metadata& meta) const;
};

// One optimization per ratio; families with a delay get a second column
// with the delay frozen at zero. `base` supplies everything but the rates.
GridResult ratio_sweep(const OptimizationProblem& base, const std::vector<double>& ratios, int jobs = 1);
GridResult ratio_sweep(Target target, const std::vector<double>& ratios, int jobs = 1);

enum class DelayPolicy {
  reoptimize,  // μ re-optimized in every cell
  frozen,      // μ held at the global optimum
};

struct SensitivitySpec {
  OptimizationProblem problem;  // gaussian-product or entangled-gaussian target
  SweepAxis first;                            // Ω1 or Ω+
  SweepAxis second;                           // Ω2 or Ω−
  DelayPolicy policy = DelayPolicy::reoptimize;
  int jobs = 1;
};

struct SensitivityMap {
  GridResult grid;
  OptimizationResult global;
};

SensitivityMap sensitivity_map(const SensitivitySpec& spec);

struct DetuningSpec {
  OptimizationProblem problem;  // atom detunings are replaced per cell
  SweepAxis delta1;             // in Γf units
  SweepAxis delta2;
  int jobs = 1;
};

struct DetuningMap {
  GridResult grid;
  OptimizationResult resonant;
};

// Every cell is re-optimized from two starts: the optimum of its parent
// (the neighbour one step closer to the grid centre) and the resonant
// optimum. Cells are evaluated level by level outward, so results do not
// depend on evaluation order or worker count.
DetuningMap detuning_map(const DetuningSpec& spec);

// Mean |P(i, j) − P(j, i)| over a square map, relative to its maximum.
double symmetry_defect(const GridResult& grid);

}  // namespace tpa
