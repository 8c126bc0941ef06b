#include "tpa/absorption.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tpa/faddeeva.hpp"
#include "tpa/quadrature.hpp"
#include "tpa/report.hpp"

namespace tpa {
namespace {

using cplx = std::complex<double>;

constexpr int kScanPoints = 200;
constexpr double kScanTail = 10.0;         // in units of 1/Γf
constexpr double kGoldenTol = 1e-6;        // in units of 1/Γf
constexpr double kAcceptRelTol = 1e-8;     // quadrature-nonconvergent threshold
constexpr double kInnerAbsTol = 1e-15;

cplx expm1(cplx z) {
  const double x = z.real(), y = z.imag();
  const double s = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

// (e^w − 1)/w.
cplx phi1(cplx w) {
  if (std::abs(w) < 1e-8) return 1.0 + 0.5 * w;
  return expm1(w) / w;
}

// ∫_{lo}^{hi} exp(z s + beta) ds, expanded from whichever end is larger.
cplx exp_integral(cplx z, cplx beta, double lo, double hi) {
  const double h = hi - lo;
  if (!(h > 0.0)) return 0.0;
  if (z.real() >= 0.0) return std::exp(z * hi + beta) * h * phi1(-z * h);
  return std::exp(z * lo + beta) * h * phi1(z * h);
}

void check(const quad::Options& opt, double value_abs, double error, const char* what) {
  if (error > std::max(opt.abs_tol, kAcceptRelTol * value_abs))
    throw Error(Errc::quadrature_nonconvergent, what);
}

bool is_exponential(const TwoPhotonState& s) {
  const Family f = family_of(s);
  return f == Family::rising_exp || f == Family::decaying_exp;
}

bool is_gaussian(const TwoPhotonState& s) {
  const Family f = family_of(s);
  return f == Family::gaussian_product || f == Family::entangled_gaussian;
}

std::vector<double> unique_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Carries the probability amplitude A(t), with P_f(t) = ΓeΓf |A(t)|^2 and
// A(t) = ∫ e^{-(iΔ2 + Γf/2)(t − t2)} B(t2) dt2,
// B(t2) = ∫ e^{iΔ1 t1 − Γe (t2 − t1)/2} Ψ(t2, t1) dt1.
class Evaluator {
 public:
  Evaluator(const Atom& atom, const TwoPhotonState& state, std::optional<double> t0, const PfOptions& opt)
      : atom_(atom), state_(state), sup_(support(state)), opt_(opt) {
    validate(atom);
    validate(state);
    const double bound = truncation_error_bound(state);
    if (bound > 1e-10) throw Error(Errc::window_too_small, "support truncation error exceeds 1e-10");
    kappa_ = {atom.gamma_f / 2.0, atom.delta2};
    lo1_ = sup_.t1_lo;
    if (t0 && *t0 > lo1_) {
      lo1_ = *t0;
      finite_lower_ = true;
    }
    start_ = std::max({lo1_, sup_.t2_lo, t0.value_or(-INFINITY)});
    end_ = sup_.t2_hi;
    outer_breaks_ = sup_.t2_breaks;
    for (double b : {sup_.t1_hi, lo1_, sup_.t2_lo}) outer_breaks_.push_back(b);
    outer_breaks_ = unique_sorted(outer_breaks_);
    closed_inner_ = opt.inner == InnerMethod::closed_form && is_gaussian(state);
    const double scale = std::sqrt(atom.gamma_e * atom.gamma_f);
    outer_opt_ = {opt.rel_tol, 1e-14 / scale, opt.max_intervals};
    inner_opt_ = {0.1 * opt.rel_tol, kInnerAbsTol, opt.max_intervals};
  }

  double start() const { return start_; }
  double end() const { return end_; }
  const std::vector<double>& breaks() const { return outer_breaks_; }
  double probability(cplx amp) const { return atom_.gamma_e * atom_.gamma_f * std::norm(amp); }

  cplx inner(double t2) const {
    if (closed_inner_) return inner_closed(t2);
    const double hi = std::min(t2, sup_.t1_hi);
    if (!(hi > lo1_)) return 0.0;
    const double d1 = atom_.delta1, ge = atom_.gamma_e;
    const auto r = quad::integrate(
        [&](double t1) {
          return std::exp(cplx{-0.5 * ge * (t2 - t1), d1 * t1}) * amplitude(state_, t2, t1);
        },
        lo1_, hi, sup_.t1_breaks, inner_opt_);
    check(inner_opt_, std::abs(r.value), r.error, "inner integral did not converge");
    return r.value;
  }

  // A(tb) from A(ta), ta <= tb.
  cplx advance(cplx amp, double ta, double tb) const {
    cplx out = std::exp(-kappa_ * (tb - ta)) * amp;
    const double a = std::max(ta, start_);
    const double m = std::min(tb, end_);
    if (m > a) {
      const auto r = quad::integrate([&](double t2) { return std::exp(-kappa_ * (m - t2)) * inner(t2); }, a, m,
                                     outer_breaks_, outer_opt_);
      check(outer_opt_, std::abs(r.value), r.error, "outer integral did not converge");
      out += std::exp(-kappa_ * (tb - m)) * r.value;
    }
    return out;
  }

 private:
  cplx inner_closed(double t2) const {
    const double ge = atom_.gamma_e;
    const cplx q0{ge / 2.0, atom_.delta1};
    double p;
    cplx q, r;
    if (const auto* g = std::get_if<GaussianProduct>(&state_)) {
      const double x = t2 - g->mu;
      p = g->omega1 * g->omega1 / 4.0;
      q = q0;
      r = 0.25 * std::log(g->omega1 * g->omega1 * g->omega2 * g->omega2 / (4.0 * std::numbers::pi * std::numbers::pi)) -
          g->omega2 * g->omega2 * x * x / 4.0 - ge * t2 / 2.0;
    } else {
      const auto& e = std::get<EntangledGaussian>(state_);
      const double x = t2 - e.mu;
      const double sp = e.omega_plus * e.omega_plus, sm = e.omega_minus * e.omega_minus;
      p = (sp + sm) / 8.0;
      q = q0 - (sp - sm) * x / 4.0;
      r = 0.5 * std::log(e.omega_plus * e.omega_minus / (2.0 * std::numbers::pi)) - p * x * x - ge * t2 / 2.0;
    }
    cplx v = gaussian_tail_integral(p, q, r, t2);
    if (finite_lower_) v -= gaussian_tail_integral(p, q, r, lo1_);
    return v;
  }

  Atom atom_;
  TwoPhotonState state_;
  Support sup_;
  PfOptions opt_;
  cplx kappa_;
  double lo1_ = 0.0;
  bool finite_lower_ = false;
  double start_ = 0.0, end_ = 0.0;
  std::vector<double> outer_breaks_;
  bool closed_inner_ = false;
  quad::Options outer_opt_, inner_opt_;
};

bool use_exponential_closed_form(const TwoPhotonState& state, std::optional<double> t0, const PfOptions& opt) {
  return opt.exponential_closed_forms && is_exponential(state) && !t0;
}

double closed_form_pf(const Atom& atom, const TwoPhotonState& state, double t) {
  if (const auto* r = std::get_if<RisingExpProduct>(&state))
    return pf_rising_closed_form(atom, r->omega1, r->omega2, t);
  const auto& d = std::get<DecayingExpProduct>(state);
  return pf_decaying_closed_form(atom, d.omega1, d.omega2, d.t_shift, t);
}

std::vector<double> probabilities_on(const Atom& atom, const TwoPhotonState& state,
                                     const std::vector<double>& times, std::optional<double> t0,
                                     const PfOptions& opt) {
  std::vector<double> p(times.size(), 0.0);
  if (use_exponential_closed_form(state, t0, opt)) {
    for (std::size_t k = 0; k < times.size(); ++k) p[k] = closed_form_pf(atom, state, times[k]);
    return p;
  }
  const Evaluator ev(atom, state, t0, opt);
  cplx amp = 0.0;
  double pos = ev.start();
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (k > 0 && times[k] < times[k - 1]) throw Error(Errc::invalid_window, "curve times must be sorted");
    if (times[k] <= ev.start()) continue;
    amp = ev.advance(amp, pos, times[k]);
    pos = times[k];
    p[k] = ev.probability(amp);
  }
  return p;
}

}  // namespace

std::complex<double> Kernel::operator()(double t2, double t1) const {
  if (!(t1 < t2) || t2 > t || (t0 && t1 < *t0)) return 0.0;
  const cplx kappa{atom.gamma_f / 2.0, atom.delta2};
  return std::sqrt(atom.gamma_e * atom.gamma_f) * std::exp(-kappa * (t - t2)) *
         std::exp(cplx{-0.5 * atom.gamma_e * (t2 - t1), atom.delta1 * t1});
}

double truncation_error_bound(const TwoPhotonState& state) {
  const Support s = support(state);
  const double tail = tail_mass_outside(state, s.t1_lo, s.t1_hi, s.t2_lo, s.t2_hi);
  return 2.0 * std::sqrt(tail) + tail;
}

double pf_at(const Atom& atom, const TwoPhotonState& state, double t, std::optional<double> t0,
             const PfOptions& opt) {
  if (t0 && t < *t0) throw Error(Errc::invalid_window, "t must not precede t0");
  if (use_exponential_closed_form(state, t0, opt)) return closed_form_pf(atom, state, t);
  const Evaluator ev(atom, state, t0, opt);
  if (t <= ev.start()) return 0.0;
  return ev.probability(ev.advance(0.0, ev.start(), t));
}

double pf_at_compact(const Atom& atom, const TwoPhotonState& state, double t, std::optional<double> t0) {
  validate(atom);
  validate(state);
  const Support sup = support(state);
  const double lo1 = std::max(sup.t1_lo, t0.value_or(-INFINITY));
  const double lo2 = std::max({sup.t2_lo, lo1});
  const double hi2 = std::min(t, sup.t2_hi);
  if (!(hi2 > lo2)) return 0.0;
  const double ge = atom.gamma_e, gf = atom.gamma_f;
  const cplx c1{ge / 2.0, atom.delta1};
  const cplx c2{(gf - ge) / 2.0, atom.delta2};
  const quad::Options inner_opt{1e-11, 0.0, 10000};
  auto g = [&](double t2) {
    const double hi = std::min(t2, sup.t1_hi);
    if (!(hi > lo1)) return cplx{};
    return quad::integrate([&](double t1) { return std::exp(c1 * t1) * amplitude(state, t2, t1); }, lo1, hi,
                           sup.t1_breaks, inner_opt)
        .value;
  };
  std::vector<double> breaks = sup.t2_breaks;
  breaks.push_back(sup.t1_hi);
  breaks.push_back(lo1);
  const auto outer = quad::integrate([&](double t2) { return std::exp(c2 * t2) * g(t2); }, lo2, hi2, breaks,
                                     {1e-10, 0.0, 10000});
  return ge * gf * std::exp(-gf * t) * std::norm(outer.value);
}

double pf_inner_product(const Atom& atom, const TwoPhotonState& state, double t_star) {
  validate(atom);
  validate(state);
  if (!atom.resonant()) throw Error(Errc::not_resonant, "the inner-product form needs zero detunings");
  const Support sup = support(state);
  const Kernel kernel{atom, t_star, std::nullopt};
  const double hi1 = std::min(t_star, sup.t1_hi);
  const double scale = std::sqrt(atom.gamma_e * atom.gamma_f);
  const quad::Options inner_opt{1e-11, kInnerAbsTol, 10000};
  const quad::Options outer_opt{1e-10, 1e-14 / scale, 10000};
  auto over_t2 = [&](double t1) {
    const double lo = std::max(t1, sup.t2_lo);
    const double hi = std::min(t_star, sup.t2_hi);
    if (!(hi > lo)) return cplx{};
    const auto r = quad::integrate([&](double t2) { return kernel(t2, t1) * amplitude(state, t2, t1); }, lo, hi,
                                   sup.t2_breaks, inner_opt);
    check(inner_opt, std::abs(r.value), r.error, "inner-product inner integral did not converge");
    return r.value;
  };
  std::vector<double> breaks = sup.t1_breaks;
  breaks.push_back(sup.t2_lo);
  breaks.push_back(sup.t2_hi);
  const auto r = quad::integrate(over_t2, sup.t1_lo, hi1, breaks, outer_opt);
  check(outer_opt, std::abs(r.value), r.error, "inner-product outer integral did not converge");
  return std::norm(r.value);
}

ExcitationCurve excitation_curve(const Atom& atom, const TwoPhotonState& state, const std::vector<double>& times,
                                 std::optional<double> t0, const PfOptions& opt) {
  ExcitationCurve c;
  c.times = times;
  c.probabilities = probabilities_on(atom, state, times, t0, opt);
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (c.probabilities[k] > c.p_max || k == 0) {
      c.p_max = c.probabilities[k];
      c.t_at_max = times[k];
    }
  }
  return c;
}

std::pair<double, double> scan_window(const Atom& atom, const TwoPhotonState& state, std::optional<double> t0) {
  const Support sup = support(state);
  double lo = std::max({sup.t1_lo, sup.t2_lo, t0.value_or(-INFINITY)});
  return {lo, sup.t2_hi + kScanTail / atom.gamma_f};
}

Peak pf_max_over_t(const Atom& atom, const TwoPhotonState& state, std::optional<double> t0, const PfOptions& opt) {
  validate(atom);
  validate(state);
  const auto [lo, hi] = scan_window(atom, state, t0);
  std::vector<double> grid(kScanPoints);
  for (int k = 0; k < kScanPoints; ++k) grid[k] = lo + (hi - lo) * k / (kScanPoints - 1);
  grid.back() = hi;

  const bool closed = use_exponential_closed_form(state, t0, opt);
  std::optional<Evaluator> ev;
  std::vector<cplx> amps(grid.size(), 0.0);
  std::vector<double> probs(grid.size(), 0.0);
  if (closed) {
    for (std::size_t k = 0; k < grid.size(); ++k) probs[k] = closed_form_pf(atom, state, grid[k]);
  } else {
    ev.emplace(atom, state, t0, opt);
    for (std::size_t k = 1; k < grid.size(); ++k) {
      amps[k] = ev->advance(amps[k - 1], grid[k - 1], grid[k]);
      probs[k] = ev->probability(amps[k]);
    }
  }
  // P_f at t, starting from the nearest grid point at or below t.
  auto p_at = [&](double t) {
    if (closed) return closed_form_pf(atom, state, t);
    auto it = std::upper_bound(grid.begin(), grid.end(), t);
    const std::size_t k = it == grid.begin() ? 0 : std::size_t(it - grid.begin()) - 1;
    return ev->probability(ev->advance(amps[k], grid[k], t));
  };

  std::size_t best = 0;
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (probs[k] > probs[best]) best = k;

  std::vector<std::pair<double, double>> cand{{grid[best], probs[best]}};
  double a = grid[best > 0 ? best - 1 : 0];
  double b = grid[std::min(best + 1, grid.size() - 1)];
  const double tol = kGoldenTol / atom.gamma_f;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = p_at(x1), f2 = p_at(x2);
  while (b - a > tol) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = p_at(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = p_at(x2);
    }
  }
  cand.emplace_back(f1 >= f2 ? x1 : x2, std::max(f1, f2));
  const Support sup = support(state);
  std::vector<double> edges = sup.t2_breaks;
  for (double e : {sup.t1_hi, sup.t2_hi, sup.t2_lo}) edges.push_back(e);
  for (double e : edges)
    if (e > lo && e < hi) cand.emplace_back(e, p_at(e));
  std::sort(cand.begin(), cand.end());
  Peak peak{cand.front().first, cand.front().second};
  for (const auto& [t, p] : cand)
    if (p > peak.p_max) peak = {t, p};
  return peak;
}

double pf_rising_closed_form(const Atom& atom, double omega1, double omega2, double t) {
  validate(atom);
  if (!(omega1 > 0.0) || !(omega2 > 0.0)) throw Error(Errc::invalid_config, "widths must be positive");
  const double ge = atom.gamma_e, gf = atom.gamma_f;
  const double lower = 4.0 * atom.delta1 * atom.delta1 + (omega1 + ge) * (omega1 + ge);
  const double dsum = atom.delta1 + atom.delta2;
  const double upper = 4.0 * dsum * dsum + (omega1 + omega2 + gf) * (omega1 + omega2 + gf);
  const double at_zero = 16.0 * ge * gf * omega1 * omega2 / (lower * upper);
  if (t <= 0.0) return at_zero * std::exp((omega1 + omega2) * t);
  return at_zero * std::exp(-gf * t);
}

RisingOptimum pf_max_rising(const Atom& atom) {
  validate(atom);
  const double ge = atom.gamma_e, gf = atom.gamma_f;
  const double o1 = (std::sqrt(gf * gf + 8.0 * ge * gf) - gf) / 4.0;
  const double o2 = o1 + gf;
  const Atom resonant{ge, gf, 0.0, 0.0};
  return {o1, o2, pf_rising_closed_form(resonant, o1, o2, 0.0)};
}

double pf_decaying_closed_form(const Atom& atom, double omega1, double omega2, double t_shift, double t) {
  validate(atom);
  if (!(omega1 > 0.0) || !(omega2 > 0.0)) throw Error(Errc::invalid_config, "widths must be positive");
  const double ge = atom.gamma_e, gf = atom.gamma_f;
  const double s0 = std::max(t_shift, 0.0);
  if (!(t > s0)) return 0.0;
  const cplx kappa{gf / 2.0, atom.delta2};
  const cplx a{(ge - omega1) / 2.0, atom.delta1};
  const cplx b{(gf - ge - omega2) / 2.0, atom.delta2};
  const cplx c = a + b;
  // Shared exponent so that every integrand exponent is <= 0 on [s0, t].
  const cplx beta = -kappa * t + omega2 * t_shift / 2.0;
  cplx diff;
  if (std::abs(a) * std::max(std::abs(s0), std::abs(t)) < 1e-3) {
    // Near a = 0 the difference quotient (E(c) − E(b))/a is evaluated as the
    // limit integral ∫ s φ(a s) e^{b s} ds, with φ(w) = (e^w − 1)/w.
    const auto r = quad::integrate([&](double s) { return std::exp(b * s + beta) * s * phi1(a * s); }, s0, t, {},
                                   {1e-13, 0.0, 2000});
    diff = r.value;
  } else {
    diff = (exp_integral(c, beta, s0, t) - exp_integral(b, beta, s0, t)) / a;
  }
  return ge * gf * omega1 * omega2 * std::norm(diff);
}

double residence_time(const Atom& atom, const TwoPhotonState& state, const PfOptions& opt) {
  validate(atom);
  validate(state);
  const Support sup = support(state);
  const double lo = std::max(sup.t1_lo, sup.t2_lo);
  const double hi = sup.t2_hi;
  constexpr int panels = 400;
  std::vector<double> edges;
  for (int k = 0; k <= panels; ++k) edges.push_back(lo + (hi - lo) * k / panels);
  for (double e : sup.t2_breaks) edges.push_back(e);
  edges.push_back(sup.t1_hi);
  std::vector<double> kept;
  for (double e : unique_sorted(edges))
    if (e >= lo && e <= hi) kept.push_back(e);
  // 8-point Gauss-Legendre per panel.
  static const double gx[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363};
  static const double gw[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
  std::vector<double> nodes, weights;
  for (std::size_t p = 0; p + 1 < kept.size(); ++p) {
    const double c = 0.5 * (kept[p] + kept[p + 1]), r = 0.5 * (kept[p + 1] - kept[p]);
    for (int s = 3; s >= 0; --s) {
      nodes.push_back(c - r * gx[s]);
      weights.push_back(r * gw[s]);
    }
    for (int s = 0; s < 4; ++s) {
      nodes.push_back(c + r * gx[s]);
      weights.push_back(r * gw[s]);
    }
  }
  nodes.push_back(hi);
  const auto p = probabilities_on(atom, state, nodes, std::nullopt, opt);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) total += weights[k] * p[k];
  // After the support the amplitude only decays: P_f(t) = P_f(hi) e^{-Γf (t − hi)}.
  return total + p.back() / atom.gamma_f;
}

void write_curve_csv(const std::string& path, const ExcitationCurve& curve, const std::vector<std::string>& header) {
  CsvTable table{{"t*gamma_f", "P_f"}, {}};
  for (std::size_t k = 0; k < curve.times.size(); ++k)
    table.add_row({fmt_num(curve.times[k]), fmt_num(curve.probabilities[k])});
  Metadata meta;
  for (const auto& h : header) meta.emplace_back("note", h);
  write_file(path, table.render(meta));
}

}  // namespace tpa
