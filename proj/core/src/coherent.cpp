#include "tpa/coherent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/numeric/odeint.hpp>

namespace tpa {
namespace {

namespace ode = boost::numeric::odeint;
using State = std::array<double, 9>;  // gg, ee, ff, Re/Im ge, Re/Im gf, Re/Im ef

constexpr double kReach = 9.0 * std::numbers::sqrt2;
constexpr double kTail = 10.0;  // in units of 1/Γf
constexpr double kGoldenTol = 1e-6;

struct Rhs {
  Atom atom;
  CoherentDrive drive;
  double c1, c2;  // √(Γe n1), √(Γf n2)

  Rhs(const Atom& a, const CoherentDrive& d)
      : atom(a), drive(d), c1(std::sqrt(a.gamma_e * d.n1)), c2(std::sqrt(a.gamma_f * d.n2)) {}

  void operator()(const State& x, State& dx, double t) const {
    const double a1 = c1 * gaussian_envelope(drive.omega1, 0.0, t);
    const double a2 = c2 * gaussian_envelope(drive.omega2, drive.mu, t);
    const double ge_e = atom.gamma_e, gf_r = atom.gamma_f;
    const double d1 = atom.delta1, d2 = atom.delta2;
    const double gg = x[0], ee = x[1], ff = x[2];
    const std::complex<double> ge{x[3], x[4]}, gf{x[5], x[6]}, ef{x[7], x[8]};
    const std::complex<double> i{0.0, 1.0};

    const double dff = -2.0 * a2 * ef.real() - gf_r * ff;
    const std::complex<double> def = i * d2 * ef - a1 * gf + a2 * (ff - ee) - 0.5 * (ge_e + gf_r) * ef;
    const std::complex<double> dgf = i * (d1 + d2) * gf + a1 * ef - a2 * ge - 0.5 * gf_r * gf;
    const double dee = -2.0 * a1 * ge.real() + 2.0 * a2 * ef.real() - ge_e * ee + gf_r * ff;
    const std::complex<double> dge = i * d1 * ge + a2 * gf + a1 * (ee - gg) - 0.5 * ge_e * ge;
    const double dgg = 2.0 * a1 * ge.real() + ge_e * ee;

    dx = {dgg, dee, dff, dge.real(), dge.imag(), dgf.real(), dgf.imag(), def.real(), def.imag()};
  }
};

DensityMatrix unpack(const State& x) {
  return {x[0], x[1], x[2], {x[3], x[4]}, {x[5], x[6]}, {x[7], x[8]}};
}

State ground() { return {1.0, 0, 0, 0, 0, 0, 0, 0, 0}; }

// Integrates from (t0, x0) and reports the state at each sorted time in
// `times` (all >= t0) through `sink(k, state)`.
template <class Sink>
void integrate_to(const Rhs& rhs, double t0, State x0, const std::vector<double>& times, const CoherentOptions& opt,
                  Sink&& sink) {
  if (times.empty()) return;
  auto stepper = ode::make_dense_output(opt.abs_tol, opt.rel_tol, ode::runge_kutta_dopri5<State>());
  const double scale = 1.0 / std::max({rhs.atom.gamma_e, rhs.atom.gamma_f, rhs.drive.omega1, rhs.drive.omega2});
  const double min_dt = 1e-12 * scale;
  stepper.initialize(x0, t0, 1e-3 * scale);
  std::size_t k = 0;
  while (k < times.size() && times[k] <= t0) sink(k++, x0);
  long steps = 0;
  State x;
  while (k < times.size()) {
    stepper.do_step(rhs);
    if (++steps > opt.max_steps)
      throw Error(Errc::tolerance_unreachable, "coherent evolution exceeded its step budget");
    if (stepper.current_time_step() < min_dt)
      throw Error(Errc::step_size_underflow, "coherent evolution step size underflow");
    while (k < times.size() && times[k] <= stepper.current_time()) {
      stepper.calc_state(times[k], x);
      sink(k++, x);
    }
  }
}

}  // namespace

void validate(const CoherentDrive& d) {
  if (!(d.n1 >= 0.0) || !(d.n2 >= 0.0) || !std::isfinite(d.n1) || !std::isfinite(d.n2))
    throw Error(Errc::invalid_config, "mean photon numbers must be finite and nonnegative");
  if (!(d.omega1 > 0.0) || !(d.omega2 > 0.0) || !std::isfinite(d.omega1) || !std::isfinite(d.omega2))
    throw Error(Errc::invalid_config, "pulse widths must be positive");
  if (!std::isfinite(d.mu)) throw Error(Errc::invalid_config, "delay must be finite");
}

double gaussian_envelope(double omega, double center, double t) {
  const double x = t - center;
  return std::pow(omega * omega / (2.0 * std::numbers::pi), 0.25) * std::exp(-omega * omega * x * x / 4.0);
}

std::array<std::complex<double>, 9> DensityMatrix::full() const {
  return {gg, ge, gf, std::conj(ge), ee, ef, std::conj(gf), std::conj(ef), ff};
}

TimeWindow coherent_window(const Atom& atom, const CoherentDrive& drive, int n_samples) {
  validate(atom);
  validate(drive);
  const double start = std::min(-kReach / drive.omega1, drive.mu - kReach / drive.omega2);
  const double end = std::max(kReach / drive.omega1, drive.mu + kReach / drive.omega2) + kTail / atom.gamma_f;
  return {start, end, n_samples, true};
}

DensityTrajectory evolve(const Atom& atom, const CoherentDrive& drive, const TimeWindow& window,
                         const CoherentOptions& opt) {
  validate(atom);
  validate(drive);
  validate(window);
  const Rhs rhs(atom, drive);
  // Drive area missing before the start bounds how far ρ_gg could have moved.
  auto missing = [&](double c, double omega, double center) {
    const double reach = center - window.t_start;
    if (reach <= 0.0) return double(INFINITY);
    const double area = std::pow(omega * omega / (2.0 * std::numbers::pi), 0.25) * std::sqrt(std::numbers::pi) /
                        (omega / 2.0) * 0.5 * std::erfc(omega * reach / 2.0);
    return c * c * area * area;
  };
  if (drive.n1 > 0.0 && missing(rhs.c1, drive.omega1, 0.0) > 1e-10)
    throw Error(Errc::window_too_small, "window starts inside the first pulse");
  if (drive.n2 > 0.0 && missing(rhs.c2, drive.omega2, drive.mu) > 1e-10)
    throw Error(Errc::window_too_small, "window starts inside the second pulse");

  DensityTrajectory traj;
  traj.times = sample_times(window);
  traj.states.resize(traj.times.size());
  integrate_to(rhs, window.t_start, ground(), traj.times, opt,
               [&](std::size_t k, const State& x) { traj.states[k] = unpack(x); });
  return traj;
}

Peak pf_max_coherent(const Atom& atom, const CoherentDrive& drive, const CoherentOptions& opt) {
  const TimeWindow window = coherent_window(atom, drive);
  const Rhs rhs(atom, drive);
  const std::vector<double> times = sample_times(window);
  std::vector<State> states(times.size());
  integrate_to(rhs, window.t_start, ground(), times, opt, [&](std::size_t k, const State& x) { states[k] = x; });

  std::size_t best = 0;
  for (std::size_t k = 1; k < times.size(); ++k)
    if (states[k][2] > states[best][2]) best = k;
  Peak peak{times[best], states[best][2]};
  if (best == 0 || best + 1 == times.size()) return peak;

  // ρ_ff at t, re-integrated from the stored sample just below t.
  auto at = [&](double t) {
    const std::size_t k = std::size_t(std::upper_bound(times.begin(), times.end(), t) - times.begin()) - 1;
    double out = states[k][2];
    integrate_to(rhs, times[k], states[k], {t}, opt, [&](std::size_t, const State& x) { out = x[2]; });
    return out;
  };
  double a = times[best - 1], b = times[best + 1];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = at(x1), f2 = at(x2);
  while (b - a > kGoldenTol / atom.gamma_f) {
    if (f1 >= f2) {
      b = x2, x2 = x1, f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = at(x1);
    } else {
      a = x1, x1 = x2, f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = at(x2);
    }
  }
  const double t = f1 >= f2 ? x1 : x2;
  const double p = std::max(f1, f2);
  if (p > peak.p_max) peak = {t, p};
  return peak;
}

void write_trajectory_csv(const std::string& path, const DensityTrajectory& traj, const Metadata& meta) {
  CsvTable table{{"t*gamma_f", "rho_gg", "rho_ee", "rho_ff", "re_rho_ge", "im_rho_ge", "re_rho_gf", "im_rho_gf",
                  "re_rho_ef", "im_rho_ef"},
                 {}};
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const DensityMatrix& r = traj.states[k];
    table.add_row({fmt_num(traj.times[k]), fmt_num(r.gg), fmt_num(r.ee), fmt_num(r.ff), fmt_num(r.ge.real()),
                   fmt_num(r.ge.imag()), fmt_num(r.gf.real()), fmt_num(r.gf.imag()), fmt_num(r.ef.real()),
                   fmt_num(r.ef.imag())});
  }
  write_file(path, table.render(meta));
}

}  // namespace tpa
