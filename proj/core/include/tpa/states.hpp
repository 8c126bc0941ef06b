#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tpa/model.hpp"

namespace tpa {

// Product of Gaussian single-photon pulses; the second peaks at mu.
struct GaussianProduct {
  double omega1 = 1.0;
  double omega2 = 1.0;
  double mu = 0.0;
};

// Gaussian biphoton; omega_plus/omega_minus set the widths of the frequency
// sum and difference. omega_plus == omega_minus is a product state.
struct EntangledGaussian {
  double omega_plus = 1.0;
  double omega_minus = 1.0;
  double mu = 0.0;
};

// Exponentially rising pulses that switch off at t = 0.
struct RisingExpProduct {
  double omega1 = 1.0;
  double omega2 = 1.0;
};

// Exponentially decaying pulses switched on at 0 and t_shift.
struct DecayingExpProduct {
  double omega1 = 1.0;
  double omega2 = 1.0;
  double t_shift = 0.0;
};

// The state that excites `atom` with certainty at t_star (t0 = nullopt means
// it starts at -infinity; a finite t0 gives the truncated, renormalized state).
struct OptimalState {
  Atom atom;
  double t_star = 0.0;
  std::optional<double> t0;
};

using TwoPhotonState =
    std::variant<GaussianProduct, EntangledGaussian, RisingExpProduct, DecayingExpProduct, OptimalState>;

enum class Family { gaussian_product, entangled_gaussian, rising_exp, decaying_exp, optimal };

Family family_of(const TwoPhotonState& state) noexcept;
std::string_view family_name(Family family) noexcept;
Family parse_family(std::string_view name);

void validate(const TwoPhotonState& state);

// Joint temporal amplitude Ψ(t2, t1); zero outside the support.
std::complex<double> amplitude(const TwoPhotonState& state, double t2, double t1);

// Rectangle outside which the amplitude is below 1e-12 of its peak, plus the
// lines where it has kinks or jumps.
struct Support {
  double t1_lo, t1_hi;
  double t2_lo, t2_hi;
  bool ordered = false;  // nonzero only for t1 < t2
  std::vector<double> t1_breaks;
  std::vector<double> t2_breaks;
};
Support support(const TwoPhotonState& state);

// Limit of Ψ(t, t1) as t1 -> t from below, for ordered states (0 otherwise).
double diagonal_limit(const TwoPhotonState& state, double t);

// Analytic upper bound on the probability mass outside the rectangle
// [t1_lo, t1_hi] x [t2_lo, t2_hi], or outside the square [a, b]^2.
double tail_mass_outside(const TwoPhotonState& state, double t1_lo, double t1_hi, double t2_lo,
                         double t2_hi);
double tail_mass_outside(const TwoPhotonState& state, double a, double b);

// Arrival-time densities of the first and second photon at time t.
struct TimeDensities {
  double first;
  double second;
};
TimeDensities time_densities(const TwoPhotonState& state, double t);

double norm_check(const TwoPhotonState& state, const TimeWindow& window);

struct SchmidtResult {
  std::vector<double> coefficients;  // u_n, nonincreasing
  double entropy_bits = 0.0;
  double truncation_error = 0.0;
  int grid_points = 0;  // per axis, numeric path only
};

SchmidtResult schmidt_analytic(const EntangledGaussian& state, int n_max);

struct SchmidtOptions {
  int grid_points = 400;      // per axis; multiple of 8
  int max_grid_points = 1600;
  double entropy_tol = 1e-4;  // allowed change under grid doubling
};
SchmidtResult schmidt_numeric(const TwoPhotonState& state, const SchmidtOptions& opt = {});

// Single discretization without the doubling check.
SchmidtResult schmidt_numeric_fixed(const TwoPhotonState& state, int grid_points);

// Entropy in bits of a list of squared Schmidt coefficients.
double entropy_bits(const std::vector<double>& weights);

// Normalized Hermite function ψ_n(x), built by the three-term recurrence.
double hermite_function(int n, double x);

// Schmidt mode n of the entangled Gaussian for the second (axis = 2) or first
// (axis = 1) photon, in the photon's own time coordinate.
double entangled_mode(const EntangledGaussian& state, int n, int axis, double t);

struct SpectralDensities {
  std::function<double(double)> marginal1;   // over δ1
  std::function<double(double)> marginal2;   // over δ2
  std::function<double(double)> sum;         // over δ1 + δ2
  std::function<double(double)> difference;  // over δ2 − δ1
};
SpectralDensities spectral_densities(const TwoPhotonState& state);

// Entangled-Gaussian second moments in time and frequency.
double time_variance(const EntangledGaussian& state);
double frequency_variance(const EntangledGaussian& state);

void to_json(nlohmann::json& j, const TwoPhotonState& state);
void from_json(const nlohmann::json& j, TwoPhotonState& state);
void to_json(nlohmann::json& j, const Atom& atom);
void from_json(const nlohmann::json& j, Atom& atom);

}  // namespace tpa
