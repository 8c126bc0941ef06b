#include "tpa/optimal.hpp"

#include <cmath>
#include <utility>
#include <numbers>

namespace tpa {
namespace {

bool equal_rates(const Atom& atom) {
  return std::abs(atom.gamma_e - atom.gamma_f) < kEqualRateThreshold * atom.gamma_f;
}

void require_resonant(const Atom& atom) {
  validate(atom);
  if (!atom.resonant()) throw Error(Errc::not_resonant, "reference densities are defined at resonance");
}

}  // namespace

double exp_difference_quotient(double a, double b, double tau) {
  // Symmetric in (a, b); ordering them keeps expm1 bounded.
  if (b < a) std::swap(a, b);
  const double d = b - a;
  if (std::abs(d) < kEqualRateThreshold * std::max(std::abs(a), std::abs(b)))
    return tau * std::exp(-a * tau) * (1.0 - 0.5 * d * tau);
  return std::exp(-a * tau) * (-std::expm1(-d * tau)) / d;
}

double pmax_bound(const Atom& atom, double horizon) {
  validate(atom);
  if (horizon < 0.0) throw Error(Errc::negative_horizon, "horizon must be nonnegative");
  if (std::isinf(horizon)) return 1.0;
  const double ge = atom.gamma_e;
  const double gf = atom.gamma_f;
  // 1 − [Γf e^{-Γe h} − Γe e^{-Γf h}]/(Γf − Γe), regrouped for accuracy.
  double q;
  if (equal_rates(atom))
    q = horizon * std::exp(-ge * horizon);
  else
    q = exp_difference_quotient(ge, gf, horizon);
  return -std::expm1(-ge * horizon) - ge * q;
}

double pmax_complement(const Atom& atom, double horizon) {
  validate(atom);
  if (horizon < 0.0) throw Error(Errc::negative_horizon, "horizon must be nonnegative");
  if (std::isinf(horizon)) return 0.0;
  const double ge = atom.gamma_e;
  const double q = equal_rates(atom) ? horizon * std::exp(-ge * horizon)
                                     : exp_difference_quotient(ge, atom.gamma_f, horizon);
  return std::exp(-ge * horizon) + ge * q;
}

double lorentzian(double x, double fwhm, double center) {
  const double hw = 0.5 * fwhm;
  const double u = x - center;
  return hw / (std::numbers::pi * (u * u + hw * hw));
}

Lorentz spectral_marginal_1(const Atom& atom) {
  require_resonant(atom);
  return {atom.gamma_e};
}

Lorentz spectral_marginal_2(const Atom& atom) {
  require_resonant(atom);
  return {atom.gamma_e + atom.gamma_f};
}

Lorentz conditional_2_given_1(const Atom& atom, double delta1) {
  require_resonant(atom);
  return {atom.gamma_f, -delta1};
}

double joint_spectral_density(const Atom& atom, double delta2, double delta1) {
  return spectral_marginal_1(atom)(delta1) * conditional_2_given_1(atom, delta1)(delta2);
}

SumDiffDensities sum_diff_densities(const Atom& atom) {
  require_resonant(atom);
  return {{atom.gamma_f}, {atom.gamma_f + 2.0 * atom.gamma_e}};
}

ArrivalDensities arrival_densities(const Atom& atom, double t_star, std::optional<double> t0) {
  require_resonant(atom);
  if (t0 && !(*t0 < t_star)) throw Error(Errc::invalid_window, "t0 must precede t_star");
  return {atom, t_star, t0};
}

double ArrivalDensities::joint(double t2, double t1) const {
  if (!(t1 < t2) || t2 > t_star || (t0 && t1 < *t0)) return 0.0;
  const double norm = t0 ? pmax_bound(atom, t_star - *t0) : 1.0;
  return atom.gamma_e * atom.gamma_f *
         std::exp(-atom.gamma_f * (t_star - t2) - atom.gamma_e * (t2 - t1)) / norm;
}

double ArrivalDensities::first(double t1) const {
  if (t1 > t_star || (t0 && t1 < *t0)) return 0.0;
  const double norm = t0 ? pmax_bound(atom, t_star - *t0) : 1.0;
  return atom.gamma_e * atom.gamma_f *
         exp_difference_quotient(atom.gamma_e, atom.gamma_f, t_star - t1) / norm;
}

double ArrivalDensities::second(double t2) const {
  if (t2 > t_star || (t0 && t2 < *t0)) return 0.0;
  const double tail = t0 ? -std::expm1(-atom.gamma_e * (t2 - *t0)) : 1.0;
  const double norm = t0 ? pmax_bound(atom, t_star - *t0) : 1.0;
  return atom.gamma_f * std::exp(-atom.gamma_f * (t_star - t2)) * tail / norm;
}

ArrivalExpectations arrival_expectations(const Atom& atom, double t_star) {
  require_resonant(atom);
  return {t_star - 1.0 / atom.gamma_e - 1.0 / atom.gamma_f, t_star - 1.0 / atom.gamma_f};
}

double optimal_normalization(const Atom& atom, double t_star, std::optional<double> t0) {
  validate(atom);
  const double horizon = t0 ? t_star - *t0 : INFINITY;
  if (!(horizon > 0.0)) throw Error(Errc::invalid_window, "t0 must precede t_star");
  return std::exp(atom.gamma_f * t_star) * pmax_bound(atom, horizon) /
         (atom.gamma_e * atom.gamma_f);
}

}  // namespace tpa
