#include "tpa/states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "tpa/optimal.hpp"
#include "tpa/quadrature.hpp"

namespace tpa {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kGaussianReach = 9.0 * std::numbers::sqrt2;  // in units of 1/Ω
constexpr double kExpReach = 60.0;                             // in units of 1/Ω

double gaussian_profile(double omega, double t) {
  return std::pow(omega * omega / (2.0 * std::numbers::pi), 0.25) * std::exp(-omega * omega * t * t / 4.0);
}

double normal_pdf(double x, double mean, double var) {
  const double u = x - mean;
  return std::exp(-u * u / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

// Mass of N(mean, sd^2) outside [a, b].
double normal_outside(double mean, double sd, double a, double b) {
  const double s = sd * std::numbers::sqrt2;
  return 0.5 * std::erfc((mean - a) / s) + 0.5 * std::erfc((b - mean) / s);
}

// Mass of the density rate·e^{rate (t − edge)}, t <= edge, outside [a, b].
double rising_outside(double rate, double edge, double a, double b) {
  double m = std::exp(rate * (std::min(a, edge) - edge));
  if (b < edge) m += -std::expm1(rate * (b - edge));
  return std::min(1.0, m);
}

// Mass of the density rate·e^{-rate (t − edge)}, t >= edge, outside [a, b].
double decaying_outside(double rate, double edge, double a, double b) {
  double m = std::exp(-rate * (std::max(b, edge) - edge));
  if (a > edge) m += -std::expm1(-rate * (a - edge));
  return std::min(1.0, m);
}

double optimal_prefactor(const OptimalState& s) {
  const double mass = s.t0 ? pmax_bound(s.atom, s.t_star - *s.t0) : 1.0;
  return std::sqrt(s.atom.gamma_e * s.atom.gamma_f / mass);
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw Error(Errc::invalid_config, std::string(what) + " must be positive");
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(Errc::invalid_config, std::string(what) + " must be finite");
}

}  // namespace

Family family_of(const TwoPhotonState& state) noexcept {
  return static_cast<Family>(state.index());
}

std::string_view family_name(Family family) noexcept {
  switch (family) {
    case Family::gaussian_product: return "gaussian-product";
    case Family::entangled_gaussian: return "entangled-gaussian";
    case Family::rising_exp: return "rising-exp";
    case Family::decaying_exp: return "decaying-exp";
    case Family::optimal: return "optimal";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::gaussian_product, Family::entangled_gaussian, Family::rising_exp,
                   Family::decaying_exp, Family::optimal})
    if (family_name(f) == name) return f;
  throw Error(Errc::invalid_config, "unknown state family '" + std::string(name) + "'");
}

void validate(const TwoPhotonState& state) {
  std::visit(overloaded{
                 [](const GaussianProduct& s) {
                   require_positive(s.omega1, "omega1");
                   require_positive(s.omega2, "omega2");
                   require_finite(s.mu, "mu");
                 },
                 [](const EntangledGaussian& s) {
                   require_positive(s.omega_plus, "omega_plus");
                   require_positive(s.omega_minus, "omega_minus");
                   require_finite(s.mu, "mu");
                 },
                 [](const RisingExpProduct& s) {
                   require_positive(s.omega1, "omega1");
                   require_positive(s.omega2, "omega2");
                 },
                 [](const DecayingExpProduct& s) {
                   require_positive(s.omega1, "omega1");
                   require_positive(s.omega2, "omega2");
                   require_finite(s.t_shift, "t_shift");
                 },
                 [](const OptimalState& s) {
                   validate(s.atom);
                   require_finite(s.t_star, "t_star");
                   if (s.t0 && !(*s.t0 < s.t_star))
                     throw Error(Errc::invalid_config, "t0 must precede t_star");
                 },
             },
             state);
}

std::complex<double> amplitude(const TwoPhotonState& state, double t2, double t1) {
  return std::visit(
      overloaded{
          [&](const GaussianProduct& s) {
            return gaussian_profile(s.omega1, t1) * gaussian_profile(s.omega2, t2 - s.mu);
          },
          [&](const EntangledGaussian& s) {
            const double x = t2 - s.mu;
            const double p = s.omega_plus * (x + t1);
            const double m = s.omega_minus * (x - t1);
            return std::sqrt(s.omega_plus * s.omega_minus / (2.0 * std::numbers::pi)) *
                   std::exp(-(p * p + m * m) / 8.0);
          },
          [&](const RisingExpProduct& s) {
            if (t1 > 0.0 || t2 > 0.0) return 0.0;
            return std::sqrt(s.omega1 * s.omega2) * std::exp(0.5 * (s.omega1 * t1 + s.omega2 * t2));
          },
          [&](const DecayingExpProduct& s) {
            if (t1 < 0.0 || t2 < s.t_shift) return 0.0;
            return std::sqrt(s.omega1 * s.omega2) *
                   std::exp(-0.5 * (s.omega1 * t1 + s.omega2 * (t2 - s.t_shift)));
          },
          [&](const OptimalState& s) {
            if (!(t1 < t2) || t2 > s.t_star || (s.t0 && t1 < *s.t0)) return 0.0;
            return optimal_prefactor(s) *
                   std::exp(0.5 * (s.atom.gamma_f * (t2 - s.t_star) - s.atom.gamma_e * (t2 - t1)));
          },
      },
      state);
}

Support support(const TwoPhotonState& state) {
  return std::visit(
      overloaded{
          [](const GaussianProduct& s) {
            const double w1 = kGaussianReach / s.omega1;
            const double w2 = kGaussianReach / s.omega2;
            return Support{-w1, w1, s.mu - w2, s.mu + w2, false, {0.0}, {s.mu}};
          },
          [](const EntangledGaussian& s) {
            const double w = kGaussianReach * std::sqrt(time_variance(s));
            return Support{-w, w, s.mu - w, s.mu + w, false, {0.0}, {s.mu}};
          },
          [](const RisingExpProduct& s) {
            return Support{-kExpReach / s.omega1, 0.0, -kExpReach / s.omega2, 0.0, false, {}, {}};
          },
          [](const DecayingExpProduct& s) {
            return Support{0.0, kExpReach / s.omega1, s.t_shift, s.t_shift + kExpReach / s.omega2,
                           false, {}, {}};
          },
          [](const OptimalState& s) {
            const double ge = s.atom.gamma_e;
            const double gf = s.atom.gamma_f;
            double t2_lo = s.t_star - kExpReach / gf;
            double t1_lo = t2_lo - kExpReach / ge;
            if (s.t0) {
              t1_lo = std::max(t1_lo, *s.t0);
              t2_lo = std::max(t2_lo, *s.t0);
            }
            return Support{t1_lo, s.t_star, t2_lo, s.t_star, true, {}, {}};
          },
      },
      state);
}

double diagonal_limit(const TwoPhotonState& state, double t) {
  const auto* s = std::get_if<OptimalState>(&state);
  if (!s || t > s->t_star || (s->t0 && t < *s->t0)) return 0.0;
  return optimal_prefactor(*s) * std::exp(0.5 * s->atom.gamma_f * (t - s->t_star));
}

double tail_mass_outside(const TwoPhotonState& state, double t1_lo, double t1_hi, double t2_lo,
                         double t2_hi) {
  const double m = std::visit(
      overloaded{
          [&](const GaussianProduct& s) {
            return normal_outside(0.0, 1.0 / s.omega1, t1_lo, t1_hi) +
                   normal_outside(s.mu, 1.0 / s.omega2, t2_lo, t2_hi);
          },
          [&](const EntangledGaussian& s) {
            const double sd = std::sqrt(time_variance(s));
            return normal_outside(0.0, sd, t1_lo, t1_hi) + normal_outside(s.mu, sd, t2_lo, t2_hi);
          },
          [&](const RisingExpProduct& s) {
            return rising_outside(s.omega1, 0.0, t1_lo, t1_hi) + rising_outside(s.omega2, 0.0, t2_lo, t2_hi);
          },
          [&](const DecayingExpProduct& s) {
            return decaying_outside(s.omega1, 0.0, t1_lo, t1_hi) +
                   decaying_outside(s.omega2, s.t_shift, t2_lo, t2_hi);
          },
          [&](const OptimalState& s) {
            if (t1_hi < s.t_star || t2_hi < s.t_star) return 1.0;
            if (std::max(t1_lo, t2_lo) >= s.t_star) return 1.0;
            const double lo = s.t0.value_or(-INFINITY);
            const double full = s.t0 ? pmax_bound(s.atom, s.t_star - lo) : 1.0;
            // Union bound over the two cuts; the t2 term drops the t1 < t2 factor.
            double outside = 0.0;
            if (t1_lo > lo)
              outside += s.t0 ? full - pmax_bound(s.atom, s.t_star - t1_lo)
                              : pmax_complement(s.atom, s.t_star - t1_lo);
            if (t2_lo > lo) {
              const double gf = s.atom.gamma_f;
              outside += std::exp(-gf * (s.t_star - t2_lo)) - (s.t0 ? std::exp(-gf * (s.t_star - lo)) : 0.0);
            }
            return std::max(0.0, outside) / full;
          },
      },
      state);
  return std::min(1.0, m);
}

double tail_mass_outside(const TwoPhotonState& state, double a, double b) {
  return tail_mass_outside(state, a, b, a, b);
}

TimeDensities time_densities(const TwoPhotonState& state, double t) {
  return std::visit(
      overloaded{
          [&](const GaussianProduct& s) {
            return TimeDensities{normal_pdf(t, 0.0, 1.0 / (s.omega1 * s.omega1)),
                                 normal_pdf(t, s.mu, 1.0 / (s.omega2 * s.omega2))};
          },
          [&](const EntangledGaussian& s) {
            const double var = time_variance(s);
            return TimeDensities{normal_pdf(t, 0.0, var), normal_pdf(t, s.mu, var)};
          },
          [&](const RisingExpProduct& s) {
            if (t > 0.0) return TimeDensities{0.0, 0.0};
            return TimeDensities{s.omega1 * std::exp(s.omega1 * t), s.omega2 * std::exp(s.omega2 * t)};
          },
          [&](const DecayingExpProduct& s) {
            const double first = t < 0.0 ? 0.0 : s.omega1 * std::exp(-s.omega1 * t);
            const double second = t < s.t_shift ? 0.0 : s.omega2 * std::exp(-s.omega2 * (t - s.t_shift));
            return TimeDensities{first, second};
          },
          [&](const OptimalState& s) {
            const ArrivalDensities d{s.atom, s.t_star, s.t0};
            return TimeDensities{d.first(t), d.second(t)};
          },
      },
      state);
}

double norm_check(const TwoPhotonState& state, const TimeWindow& window) {
  validate(state);
  validate(window);
  const double a = window.t_start;
  const double b = window.t_end;
  const double tail = tail_mass_outside(state, a, b);
  if (tail > 1e-10)
    throw Error(Errc::window_too_small, "estimated mass outside the window is " + std::to_string(tail));
  const Support sup = support(state);
  const double lo2 = std::max(a, sup.t2_lo);
  const double hi2 = std::min(b, sup.t2_hi);
  const double lo1 = std::max(a, sup.t1_lo);
  const double hi1 = std::min(b, sup.t1_hi);
  const quad::Options inner_opt{1e-12, 1e-16, 10000};
  bool ok = true;
  auto inner = [&](double t2) {
    const double top = sup.ordered ? std::min(hi1, t2) : hi1;
    const auto r = quad::integrate([&](double t1) { return std::norm(amplitude(state, t2, t1)); }, lo1, top,
                                   sup.t1_breaks, inner_opt);
    ok = ok && r.converged;
    return r.value;
  };
  std::vector<double> breaks = sup.t2_breaks;
  if (sup.ordered) breaks.push_back(hi1);
  const auto outer = quad::integrate(inner, lo2, hi2, breaks, {1e-11, 1e-15, 10000});
  if (!ok || !outer.converged)
    throw Error(Errc::quadrature_nonconvergent, "normalization integral did not converge");
  return outer.value;
}

double time_variance(const EntangledGaussian& s) {
  const double p2 = s.omega_plus * s.omega_plus;
  const double m2 = s.omega_minus * s.omega_minus;
  return (p2 + m2) / (2.0 * p2 * m2);
}

double frequency_variance(const EntangledGaussian& s) {
  return (s.omega_plus * s.omega_plus + s.omega_minus * s.omega_minus) / 8.0;
}

SpectralDensities spectral_densities(const TwoPhotonState& state) {
  validate(state);
  return std::visit(
      overloaded{
          [](const GaussianProduct& s) {
            const double v1 = s.omega1 * s.omega1 / 4.0;
            const double v2 = s.omega2 * s.omega2 / 4.0;
            return SpectralDensities{[=](double x) { return normal_pdf(x, 0.0, v1); },
                                     [=](double x) { return normal_pdf(x, 0.0, v2); },
                                     [=](double x) { return normal_pdf(x, 0.0, v1 + v2); },
                                     [=](double x) { return normal_pdf(x, 0.0, v1 + v2); }};
          },
          [](const EntangledGaussian& s) {
            const double vm = frequency_variance(s);
            const double vs = s.omega_plus * s.omega_plus / 2.0;
            const double vd = s.omega_minus * s.omega_minus / 2.0;
            return SpectralDensities{[=](double x) { return normal_pdf(x, 0.0, vm); },
                                     [=](double x) { return normal_pdf(x, 0.0, vm); },
                                     [=](double x) { return normal_pdf(x, 0.0, vs); },
                                     [=](double x) { return normal_pdf(x, 0.0, vd); }};
          },
          [](const RisingExpProduct&) -> SpectralDensities {
            throw Error(Errc::unsupported_family, "no spectral densities for exponential pulses");
          },
          [](const DecayingExpProduct&) -> SpectralDensities {
            throw Error(Errc::unsupported_family, "no spectral densities for exponential pulses");
          },
          [](const OptimalState& s) {
            const Atom a{s.atom.gamma_e, s.atom.gamma_f, 0.0, 0.0};
            const auto sd = sum_diff_densities(a);
            return SpectralDensities{spectral_marginal_1(a), spectral_marginal_2(a), sd.sum, sd.difference};
          },
      },
      state);
}

void to_json(nlohmann::json& j, const Atom& atom) {
  j = {{"gamma_e", atom.gamma_e}, {"gamma_f", atom.gamma_f}, {"delta1", atom.delta1}, {"delta2", atom.delta2}};
}

void from_json(const nlohmann::json& j, Atom& atom) {
  atom.gamma_e = j.at("gamma_e").get<double>();
  atom.gamma_f = j.value("gamma_f", 1.0);
  atom.delta1 = j.value("delta1", 0.0);
  atom.delta2 = j.value("delta2", 0.0);
}

void to_json(nlohmann::json& j, const TwoPhotonState& state) {
  j = nlohmann::json::object();
  j["family"] = family_name(family_of(state));
  std::visit(overloaded{
                 [&](const GaussianProduct& s) {
                   j["omega1"] = s.omega1;
                   j["omega2"] = s.omega2;
                   j["mu"] = s.mu;
                 },
                 [&](const EntangledGaussian& s) {
                   j["omega_plus"] = s.omega_plus;
                   j["omega_minus"] = s.omega_minus;
                   j["mu"] = s.mu;
                 },
                 [&](const RisingExpProduct& s) {
                   j["omega1"] = s.omega1;
                   j["omega2"] = s.omega2;
                 },
                 [&](const DecayingExpProduct& s) {
                   j["omega1"] = s.omega1;
                   j["omega2"] = s.omega2;
                   j["t_shift"] = s.t_shift;
                 },
                 [&](const OptimalState& s) {
                   j["atom"] = s.atom;
                   j["t_star"] = s.t_star;
                   j["t0"] = s.t0 ? nlohmann::json(*s.t0) : nlohmann::json(nullptr);
                 },
             },
             state);
}

void from_json(const nlohmann::json& j, TwoPhotonState& state) {
  try {
    switch (parse_family(j.at("family").get<std::string>())) {
      case Family::gaussian_product:
        state = GaussianProduct{j.at("omega1").get<double>(), j.at("omega2").get<double>(), j.value("mu", 0.0)};
        break;
      case Family::entangled_gaussian:
        state = EntangledGaussian{j.at("omega_plus").get<double>(), j.at("omega_minus").get<double>(),
                                  j.value("mu", 0.0)};
        break;
      case Family::rising_exp:
        state = RisingExpProduct{j.at("omega1").get<double>(), j.at("omega2").get<double>()};
        break;
      case Family::decaying_exp:
        state = DecayingExpProduct{j.at("omega1").get<double>(), j.at("omega2").get<double>(),
                                   j.value("t_shift", 0.0)};
        break;
      case Family::optimal: {
        OptimalState s{j.at("atom").get<Atom>(), j.value("t_star", 0.0), std::nullopt};
        if (j.contains("t0") && !j["t0"].is_null()) s.t0 = j["t0"].get<double>();
        state = s;
        break;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::invalid_config, std::string("bad state description: ") + e.what());
  }
  validate(state);
}

}  // namespace tpa
