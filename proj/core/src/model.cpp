#include "tpa/model.hpp"

#include <cmath>

namespace tpa {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_rate: return "invalid-rate";
    case Errc::invalid_window: return "invalid-window";
    case Errc::window_too_small: return "window-too-small";
    case Errc::quadrature_nonconvergent: return "quadrature-nonconvergent";
    case Errc::grid_too_coarse: return "grid-too-coarse";
    case Errc::unsupported_family: return "unsupported-family";
    case Errc::not_resonant: return "not-resonant";
    case Errc::negative_horizon: return "negative-horizon";
    case Errc::step_size_underflow: return "step-size-underflow";
    case Errc::tolerance_unreachable: return "tolerance-unreachable";
    case Errc::no_convergence: return "no-convergence";
    case Errc::invalid_config: return "invalid-config";
    case Errc::io_failure: return "io-failure";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void validate(const Atom& atom) {
  if (!(atom.gamma_e > 0.0) || !std::isfinite(atom.gamma_e))
    throw Error(Errc::invalid_rate, "gamma_e must be positive and finite");
  if (!(atom.gamma_f > 0.0) || !std::isfinite(atom.gamma_f))
    throw Error(Errc::invalid_rate, "gamma_f must be positive and finite");
  if (!std::isfinite(atom.delta1) || !std::isfinite(atom.delta2))
    throw Error(Errc::invalid_rate, "detunings must be finite");
}

Atom dimensionless(const Atom& atom) {
  validate(atom);
  const double s = atom.gamma_f;
  return {atom.gamma_e / s, 1.0, atom.delta1 / s, atom.delta2 / s};
}

Atom atom_from_ratio(double gamma_ratio, double delta1, double delta2) {
  Atom atom{gamma_ratio, 1.0, delta1, delta2};
  validate(atom);
  return atom;
}

void validate(const TimeWindow& window) {
  if (!(window.t_start < window.t_end))
    throw Error(Errc::invalid_window, "t_start must precede t_end");
  if (window.n_samples < 2) throw Error(Errc::invalid_window, "need at least two samples");
}

std::vector<double> sample_times(const TimeWindow& window) {
  validate(window);
  std::vector<double> t(static_cast<std::size_t>(window.n_samples));
  const double h = (window.t_end - window.t_start) / (window.n_samples - 1);
  for (int k = 0; k < window.n_samples; ++k) t[k] = window.t_start + k * h;
  t.back() = window.t_end;
  return t;
}

}  // namespace tpa
