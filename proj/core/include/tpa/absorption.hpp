#pragma once

// Probability P_f(t) that the atom is in its upper level at time t.

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "tpa/model.hpp"
#include "tpa/states.hpp"

namespace tpa {

enum class InnerMethod {
  quadrature,   // adaptive Gauss-Kronrod for every inner integral
  closed_form,  // complex error function for Gaussian families; quadrature otherwise
};

struct PfOptions {
  double rel_tol = 1e-9;
  int max_intervals = 10000;
  InnerMethod inner = InnerMethod::closed_form;
  // Exponential families: evaluate the analytic P_f(t) instead of quadrature.
  bool exponential_closed_forms = true;
};

inline PfOptions reference_options() {
  return {1e-9, 10000, InnerMethod::quadrature, false};
}

struct ExcitationCurve {
  std::vector<double> times;
  std::vector<double> probabilities;
  double t_at_max = 0.0;
  double p_max = 0.0;
};

struct Peak {
  double t_at_max = 0.0;
  double p_max = 0.0;
};

// Coupling kernel whose overlap with Ψ gives the probability amplitude at t.
struct Kernel {
  Atom atom;
  double t = 0.0;
  std::optional<double> t0;

  std::complex<double> operator()(double t2, double t1) const;
};

// Stable nested-integral evaluation (every exponent <= 0 on the domain).
double pf_at(const Atom& atom, const TwoPhotonState& state, double t, std::optional<double> t0 = std::nullopt,
             const PfOptions& opt = reference_options());

// The same quantity written with e^{-Γf t} outside growing exponentials.
// Valid only while Γ·|t| stays well inside the double range.
double pf_at_compact(const Atom& atom, const TwoPhotonState& state, double t,
                     std::optional<double> t0 = std::nullopt);

// |<Kernel, Ψ>|^2 at resonance, integrating in the opposite order to pf_at.
double pf_inner_product(const Atom& atom, const TwoPhotonState& state, double t_star);

// P_f on a sorted time grid by propagating the outer integral across it.
ExcitationCurve excitation_curve(const Atom& atom, const TwoPhotonState& state, const std::vector<double>& times,
                                 std::optional<double> t0 = std::nullopt, const PfOptions& opt = {});

// Coarse 200-point scan plus golden refinement; support edges are candidates.
Peak pf_max_over_t(const Atom& atom, const TwoPhotonState& state, std::optional<double> t0 = std::nullopt,
                   const PfOptions& opt = {});

// Scan window [first time P_f can be nonzero, end of support + 10/Γf].
std::pair<double, double> scan_window(const Atom& atom, const TwoPhotonState& state,
                                      std::optional<double> t0 = std::nullopt);

double pf_rising_closed_form(const Atom& atom, double omega1, double omega2, double t);

struct RisingOptimum {
  double omega1;
  double omega2;
  double p_max;
};
// Resonant optimum of the rising pair; detunings are ignored.
RisingOptimum pf_max_rising(const Atom& atom);

double pf_decaying_closed_form(const Atom& atom, double omega1, double omega2, double t_shift, double t);

// ∫ P_f dt, support by quadrature and the free decay after it analytically.
double residence_time(const Atom& atom, const TwoPhotonState& state, const PfOptions& opt = {});

// Analytic bound on the P_f error caused by truncating infinite tails.
double truncation_error_bound(const TwoPhotonState& state);

void write_curve_csv(const std::string& path, const ExcitationCurve& curve, const std::vector<std::string>& header);

}  // namespace tpa
