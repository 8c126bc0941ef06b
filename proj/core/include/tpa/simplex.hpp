#pragma once

// Nelder-Mead minimization with standard coefficients.

#include <functional>
#include <vector>

namespace tpa {

struct SimplexOptions {
  double x_tol = 1e-5;        // simplex diameter relative to max(1, |x_best|)
  double f_tol = 1e-9;        // spread of objective values over the simplex
  int max_evals = 2000;
  double initial_step = 0.3;  // edge length of the starting simplex
};

struct SimplexResult {
  std::vector<double> x;
  double f = 0.0;
  int evals = 0;
  bool converged = false;
  double diameter = 0.0;
};

using Objective = std::function<double(const std::vector<double>&)>;

SimplexResult nelder_mead(const Objective& f, std::vector<double> x0, const SimplexOptions& opt = {});

}  // namespace tpa
