#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tpa {

enum class Errc {
  invalid_rate,
  invalid_window,
  window_too_small,
  quadrature_nonconvergent,
  grid_too_coarse,
  unsupported_family,
  not_resonant,
  negative_horizon,
  step_size_underflow,
  tolerance_unreachable,
  no_convergence,
  invalid_config,
  io_failure,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Ladder atom g -> e -> f. Rates are inverse lifetimes; detunings are the
// carrier offsets from the lower and upper transitions.
struct Atom {
  double gamma_e = 1.0;
  double gamma_f = 1.0;
  double delta1 = 0.0;
  double delta2 = 0.0;

  bool resonant() const noexcept { return delta1 == 0.0 && delta2 == 0.0; }
  double ratio() const noexcept { return gamma_e / gamma_f; }
};

void validate(const Atom& atom);

// Rescales to gamma_f = 1.
Atom dimensionless(const Atom& atom);

// Atom in gamma_f units from the CLI-facing ratios.
Atom atom_from_ratio(double gamma_ratio, double delta1 = 0.0, double delta2 = 0.0);

struct TimeWindow {
  double t_start = 0.0;
  double t_end = 1.0;
  int n_samples = 2;
  bool open_start = false;  // t_start stands in for -infinity
};

void validate(const TimeWindow& window);

// Uniform grid including both end points.
std::vector<double> sample_times(const TimeWindow& window);

}  // namespace tpa
