#pragma once

// Closed-form reference quantities for the perfectly exciting two-photon state.
// Frequencies are detunings from the respective transitions.

#include <optional>

#include "tpa/model.hpp"

namespace tpa {

// Below this |Γe − Γf| / Γf every (Γf − Γe) quotient uses its series branch.
inline constexpr double kEqualRateThreshold = 1e-9;

// (e^{-a τ} − e^{-b τ}) / (b − a), continuous through a = b.
double exp_difference_quotient(double a, double b, double tau);

// Largest excitation probability reachable within `horizon` = t* − t0.
double pmax_bound(const Atom& atom, double horizon);

// 1 − pmax_bound, computed without cancellation for long horizons.
double pmax_complement(const Atom& atom, double horizon);

// Lorentzian density with the given full width at half maximum.
double lorentzian(double x, double fwhm, double center = 0.0);

struct Lorentz {
  double fwhm;
  double center = 0.0;
  double operator()(double x) const { return lorentzian(x, fwhm, center); }
};

Lorentz spectral_marginal_1(const Atom& atom);
Lorentz spectral_marginal_2(const Atom& atom);
Lorentz conditional_2_given_1(const Atom& atom, double delta1);

// Joint spectral density p(δ2, δ1).
double joint_spectral_density(const Atom& atom, double delta2, double delta1);

struct SumDiffDensities {
  Lorentz sum;         // over δ1 + δ2
  Lorentz difference;  // over δ2 − δ1
};
SumDiffDensities sum_diff_densities(const Atom& atom);

// Arrival-time densities for the state ending at t_star; t0 = nullopt is -inf.
struct ArrivalDensities {
  Atom atom;
  double t_star = 0.0;
  std::optional<double> t0;

  double joint(double t2, double t1) const;
  double first(double t1) const;
  double second(double t2) const;
};
ArrivalDensities arrival_densities(const Atom& atom, double t_star,
                                   std::optional<double> t0 = std::nullopt);

struct ArrivalExpectations {
  double first;
  double second;
};
ArrivalExpectations arrival_expectations(const Atom& atom, double t_star);

// Normalization factor N of the unnormalized optimal amplitude
// e^{Γf t2/2} e^{-Γe (t2 − t1)/2} on t0 < t1 < t2 < t*.
double optimal_normalization(const Atom& atom, double t_star,
                             std::optional<double> t0 = std::nullopt);

}  // namespace tpa
