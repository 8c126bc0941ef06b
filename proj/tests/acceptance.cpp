// Acceptance checks, one per criterion. Prints one PASS/FAIL line per
// criterion; `--criterion N` runs a single one. Exit status is nonzero when
// any selected criterion fails.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "support.hpp"
#include "tpa/absorption.hpp"
#include "tpa/coherent.hpp"
#include "tpa/optimal.hpp"
#include "tpa/optimize.hpp"
#include "tpa/states.hpp"
#include "tpa/sweeps.hpp"

namespace fs = std::filesystem;
using namespace tpa;
namespace tt = tpa::testing;

namespace {

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  // Records a named sub-check and folds it into the verdict.
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!ok || notes.size() < 6) notes.push_back((ok ? "" : "FAILED ") + what);
  }
  void note(const std::string& what) { notes.push_back(what); }
};

std::string num(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

std::string triple(const std::vector<double>& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + num(p[i]);
  return s + ")";
}

bool within_rel(double got, double want, double rel) { return std::abs(got - want) <= rel * std::abs(want); }

OptimizationResult optimum(Target t, double ratio, bool delay_free = true) {
  OptimizationProblem p;
  p.atom = atom_from_ratio(ratio);
  p.target = t;
  p.delay_free = delay_free;
  return optimize_pulse(p);
}

Verdict perfect_excitation() {
  Verdict v;
  for (double r : {0.2, 1.0, 5.0}) {
    const Atom a = atom_from_ratio(r);
    const double p = pf_at(a, OptimalState{a, 0.0, std::nullopt}, 0.0, std::nullopt, reference_options());
    v.check(std::abs(p - 1.0) <= 1e-3, "ratio " + num(r) + ": P_f(t*) = " + num(p, 12));
  }
  return v;
}

Verdict bound_saturation() {
  Verdict v;
  tt::Rng rng(2024);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double gf = tt::log_uniform(rng, 0.5, 2.0);
    const double ge = k % 5 == 0 ? gf : gf * tt::log_uniform(rng, 0.1, 10.0);
    const Atom a{ge, gf, 0.0, 0.0};
    const double t_star = tt::uniform(rng, -1.0, 2.0);
    const double horizon = tt::log_uniform(rng, 0.2, 8.0) / gf;
    const double t0 = t_star - horizon;
    const Peak p = pf_max_over_t(a, OptimalState{a, t_star, t0}, t0);
    const double err = std::abs(p.p_max - pmax_bound(a, horizon));
    worst = std::max(worst, err);
    if (err > 1e-4) v.check(false, "draw " + std::to_string(k) + ": error " + num(err));
  }
  v.check(worst <= 1e-4, "20 draws, 4 at equal rates, max error " + num(worst));
  return v;
}

Verdict gaussian_product_equal_rates() {
  Verdict v;
  const OptimizationResult free = optimum(Target::gaussian_product, 1.0, true);
  const OptimizationResult zero = optimum(Target::gaussian_product, 1.0, false);
  const std::vector<double> want_free{0.75, 1.53, 1.19}, want_zero{1.11, 1.95};
  bool ok_free = true, ok_zero = true, swapped = true;
  for (int i = 0; i < 3; ++i) ok_free = ok_free && within_rel(free.params[i], want_free[i], 0.05);
  for (int i = 0; i < 2; ++i) ok_zero = ok_zero && within_rel(zero.params[i], want_zero[i], 0.05);
  v.check(ok_free, "mu free: got " + triple(free.params) + " p=" + num(free.p_max) + ", want " + triple(want_free));
  v.check(ok_zero, "mu zero: got " + triple({zero.params[0], zero.params[1]}) + " p=" + num(zero.p_max) +
                       ", want " + triple(want_zero));
  // The expected pairs appear exchanged between the two cases.
  for (int i = 0; i < 2; ++i)
    swapped = swapped && within_rel(free.params[i], want_zero[i], 0.01) && within_rel(zero.params[i], want_free[i], 0.01);
  swapped = swapped && within_rel(free.params[2], want_free[2], 0.01);
  if (swapped) v.note("diagnostic: the two expected width pairs match within 1% when exchanged");
  return v;
}

Verdict entangled_optima() {
  Verdict v;
  const std::map<double, std::vector<double>> want{{0.5, {0.79, 1.38, 1.62}}, {5.0, {1.03, 10.82, 0.19}}};
  for (const auto& [r, w] : want) {
    const OptimizationResult res = optimum(Target::entangled_gaussian, r);
    bool ok = true;
    for (int i = 0; i < 3; ++i) ok = ok && within_rel(res.params[i], w[i], 0.05);
    v.check(ok, "ratio " + num(r) + ": got " + triple(res.params) + ", want " + triple(w));
  }
  return v;
}

Verdict product_limits() {
  Verdict v;
  const OptimizationResult small = optimum(Target::gaussian_product, 0.01);
  const OptimizationResult large = optimum(Target::gaussian_product, 100.0);
  const double ge = 0.01;
  const double w1 = small.params[0] / ge, w2 = small.params[1] / (ge + 1.0);
  v.check(std::abs(small.p_max - 0.64) <= 0.02, "ratio 0.01: p_max " + num(small.p_max));
  v.check(std::abs(w1 - 1.46) <= 0.05, "ratio 0.01: omega1/gamma_e " + num(w1));
  v.check(std::abs(w2 - 1.46) <= 0.05, "ratio 0.01: omega2/(gamma_e+gamma_f) " + num(w2));
  v.check(std::abs(small.params[2] * ge - 1.0) <= 0.1, "ratio 0.01: mu*gamma_e " + num(small.params[2] * ge));
  v.check(std::abs(large.params[2] * 100.0 - 2.0) <= 0.2, "ratio 100: mu*gamma_e " + num(large.params[2] * 100.0));
  return v;
}

Verdict rising_exponential() {
  Verdict v;
  for (double r : {0.1, 1.0, 10.0}) {
    const OptimizationResult num_opt = optimum(Target::rising_exp, r);
    const RisingOptimum ref = pf_max_rising(atom_from_ratio(r));
    const bool ok = within_rel(num_opt.params[0], ref.omega1, 1e-3) && within_rel(num_opt.params[1], ref.omega2, 1e-3) &&
                    std::abs(num_opt.p_max - ref.p_max) <= 1e-3;
    v.check(ok, "ratio " + num(r) + ": numeric " + triple({num_opt.params[0], num_opt.params[1], num_opt.p_max}) +
                    " closed form " + triple({ref.omega1, ref.omega2, ref.p_max}));
  }
  const OptimizationResult tiny = optimum(Target::rising_exp, 1e-3);
  v.check(tiny.p_max > 0.99, "ratio 1e-3: p_max " + num(tiny.p_max, 6));
  const double eq = pf_rising_closed_form(atom_from_ratio(1.0), 0.5, 1.5, 0.0);
  v.check(std::abs(eq - 128.0 / 216.0) <= 1e-9, "equal rates: closed form " + num(eq, 12));
  return v;
}

Verdict decaying_exponential() {
  Verdict v;
  const double ge = 0.01;
  const OptimizationResult res = optimum(Target::decaying_exp, ge);
  v.check(std::abs(res.p_max - 0.29) <= 0.01, "ratio 0.01: p_max " + num(res.p_max));
  const double w1 = res.params[0], w2 = res.params[1], ts = res.params[2];
  const double predicted = 1.0 / w2 + 1.0 / ge - 1.0 / w1;
  v.check(within_rel(ts, predicted, 0.15), "t_shift " + num(ts) + ", predicted 1/O2 + 1/Ge - 1/O1 = " + num(predicted));
  v.note("diagnostic: 1/O1 + 1/Ge - 1/O2 = " + num(1.0 / w1 + 1.0 / ge - 1.0 / w2));
  return v;
}

Eigen::Matrix3cd as_matrix(const DensityMatrix& d) {
  const auto f = d.full();
  Eigen::Matrix3cd m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = f[3 * r + c];
  return m;
}

Verdict coherent_drive() {
  Verdict v;
  const double ge = 0.01;
  const OptimizationResult res = optimum(Target::coherent, ge);
  const double a = res.params[0] / ge, b = res.params[1], c = res.params[2] * ge;
  v.check(std::abs(res.p_max - 0.23) <= 0.01, "ratio 0.01: p_max " + num(res.p_max));
  v.check(within_rel(a, 2.4, 0.1) && within_rel(b, 2.4, 0.1) && within_rel(c, 0.60, 0.1),
          "omega1/gamma_e, omega2/gamma_f, mu*gamma_e = " + triple({a, b, c}) + ", want (2.4, 2.4, 0.6)");
  tt::Rng rng(808);
  double trace_err = 0.0, min_eig = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Atom atom = tt::random_atom(rng, k % 2 == 1);
    const CoherentDrive d{tt::uniform(rng, 0.0, 4.0), tt::uniform(rng, 0.0, 4.0), tt::log_uniform(rng, 0.2, 4.0),
                          tt::log_uniform(rng, 0.2, 4.0), tt::uniform(rng, -2.0, 3.0)};
    for (const auto& s : evolve(atom, d, coherent_window(atom, d, 100)).states) {
      trace_err = std::max(trace_err, std::abs(s.trace() - 1.0));
      const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(as_matrix(s), Eigen::EigenvaluesOnly);
      min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    }
  }
  v.check(trace_err <= 1e-8, "100 random drives: max trace error " + num(trace_err));
  v.check(min_eig >= -1e-7, "100 random drives: min eigenvalue " + num(min_eig));
  return v;
}

Verdict residence() {
  Verdict v;
  for (double r : {0.2, 1.0, 5.0}) {
    const Atom a = atom_from_ratio(r);
    const double tau = residence_time(a, OptimalState{a, 0.0, std::nullopt});
    v.check(std::abs(tau - 2.0) <= 1e-3, "optimal state, ratio " + num(r) + ": " + num(tau, 8));
  }
  tt::Rng rng(909);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Atom a = tt::random_atom(rng, k % 3 == 2);
    const TwoPhotonState s = tt::random_state(rng, k);
    const double tau = residence_time(a, s) * a.gamma_f;
    worst = std::max(worst, tau);
    if (tau > 2.0 + 1e-3)
      v.check(false, "random state " + std::to_string(k) + ": gamma_f*tau " + num(tau, 7) + " for " +
                         nlohmann::json(s).dump() + " at gamma_e " + num(a.gamma_e, 7));
  }
  v.check(worst <= 2.0 + 1e-3, "50 random states: largest gamma_f*tau " + num(worst));
  return v;
}

Verdict entropy() {
  Verdict v;
  tt::Rng rng(1010);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const EntangledGaussian s{tt::log_uniform(rng, 0.3, 4.0), tt::log_uniform(rng, 0.3, 4.0), tt::uniform(rng, -1.0, 1.0)};
    worst = std::max(worst, std::abs(schmidt_numeric(s).entropy_bits - schmidt_analytic(s, 400).entropy_bits));
  }
  v.check(worst <= 1e-4, "50 entangled Gaussians: max |numeric - analytic| " + num(worst) + " bits");
  const EntangledGaussian flat{1.4, 1.4, 0.3};
  const double s_num = schmidt_numeric(flat).entropy_bits, s_an = schmidt_analytic(flat, 50).entropy_bits;
  v.check(s_num < 1e-6 && s_an < 1e-6, "equal widths: S = " + num(s_num) + " (numeric), " + num(s_an) + " (analytic)");
  double last = -1.0;
  bool monotone = true;
  std::string trace;
  for (int i = 0; i <= 10; ++i) {
    const double r = 0.01 * std::pow(2000.0, i / 10.0);
    const double s = schmidt_numeric(OptimalState{atom_from_ratio(r), 0.0, std::nullopt}).entropy_bits;
    monotone = monotone && s >= last;
    last = s;
    if (i % 5 == 0) trace += " S(" + num(r, 3) + ")=" + num(s);
  }
  v.check(monotone, "optimal state entropy nondecreasing over 11 ratios in [0.01, 20]:" + trace);
  return v;
}

Verdict oracle_equivalence() {
  Verdict v;
  tt::Rng rng(1111);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Atom a = tt::random_atom(rng);
    const TwoPhotonState s = tt::random_state(rng, k);
    const double t = tt::uniform(rng, -0.5, 3.0);
    worst = std::max(worst, std::abs(pf_inner_product(a, s, t) - pf_at(a, s, t, std::nullopt, reference_options())));
  }
  v.check(worst <= 1e-8, "50 inner-product draws: max difference " + num(worst));
  worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Atom a = tt::random_atom(rng);
    const TwoPhotonState s = tt::random_state(rng, 2 + k % 2);
    const double t = tt::uniform(rng, -1.0, 4.0);
    double closed;
    if (const auto* r = std::get_if<RisingExpProduct>(&s))
      closed = pf_rising_closed_form(a, r->omega1, r->omega2, t);
    else {
      const auto& d = std::get<DecayingExpProduct>(s);
      closed = pf_decaying_closed_form(a, d.omega1, d.omega2, d.t_shift, t);
    }
    worst = std::max(worst, std::abs(closed - pf_at(a, s, t, std::nullopt, reference_options())));
  }
  v.check(worst <= 1e-8, "100 closed-form draws: max difference " + num(worst));
  return v;
}

Verdict bounds() {
  Verdict v;
  tt::Rng rng(1212);
  double lo = 1.0, hi = 0.0, excess = -1.0;
  for (int k = 0; k < 40; ++k) {
    const Atom a = tt::random_atom(rng, k % 2 == 1);
    const TwoPhotonState s = tt::random_state(rng, k);
    const auto [t_lo, t_hi] = scan_window(a, s);
    std::vector<double> ts;
    for (int i = 0; i <= 80; ++i) ts.push_back(t_lo + (t_hi - t_lo) * i / 80.0);
    const ExcitationCurve c = excitation_curve(a, s, ts);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double p = c.probabilities[i];
      lo = std::min(lo, p);
      hi = std::max(hi, p);
      if (const auto* d = std::get_if<DecayingExpProduct>(&s)) {
        const double t0 = std::min(0.0, d->t_shift);
        const double cap = ts[i] <= t0 ? 0.0 : -std::expm1(-a.gamma_f * (ts[i] - t0));
        excess = std::max(excess, p - cap);
      }
    }
  }
  v.check(lo >= 0.0 && hi <= 1.0, "40 random curves: P_f within [" + num(lo) + ", " + num(hi) + "]");
  v.check(excess <= 1e-9, "decaying family: max of P_f - (1 - exp(-gamma_f (t - t0))) = " + num(excess));
  return v;
}

Verdict detuning() {
  Verdict v;
  DetuningSpec spec;
  spec.problem.atom = atom_from_ratio(5.0);
  spec.problem.target = Target::entangled_gaussian;
  spec.delta1 = {"delta1", -2.0, 2.0, 5, false, {}};
  spec.delta2 = {"delta2", -2.0, 2.0, 5, false, {}};
  const DetuningMap m = detuning_map(spec);
  const double centre = m.grid.at(2, 2).values[0];
  v.check(std::abs(centre - m.resonant.p_max) <= 1e-6,
          "resonant cell " + num(centre, 10) + " vs resonant optimum " + num(m.resonant.p_max, 10));
  double worst = 1.0;
  for (std::size_t i = 0; i < 5; ++i) worst = std::min(worst, m.grid.at(i, 4 - i).values[0] / m.resonant.p_max);
  v.check(worst >= 0.9, "entangled ratio 5, delta1 + delta2 = 0, |delta1| <= 2: lowest retained fraction " + num(worst));
  return v;
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(TPA_TOOL_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream f(e.path());
    std::string line, kept;
    while (std::getline(f, line))
      if (line.find("timestamp") == std::string::npos) kept += line + "\n";
    out[e.path().filename().string()] = kept;
  }
  return out;
}

Verdict determinism() {
  Verdict v;
  const fs::path root = fs::temp_directory_path() / "tpa_acceptance_determinism";
  const std::vector<std::string> commands{
      "sweep --kind sensitivity --family entangled-gaussian --grid 3 --axis1-min 0.7 --axis1-max 1.1 "
      "--axis2-min 1.2 --axis2-max 1.6 --ratio 0.5",
      "sweep --kind ratio --ratios 0.5,2",
      "curve --family decaying-exp --ratio 0.5 --samples 60",
  };
  for (std::size_t k = 0; k < commands.size(); ++k) {
    std::vector<std::map<std::string, std::string>> snaps;
    for (const char* extra : {"", "", " --jobs 2"}) {
      const fs::path dir = root / (std::to_string(k) + "_" + std::to_string(snaps.size()));
      fs::remove_all(dir);
      const int status = run_tool(commands[k] + extra + " --out " + dir.string());
      if (status != 0) {
        v.check(false, "`" + commands[k] + "` exited with " + std::to_string(status));
        break;
      }
      snaps.push_back(snapshot(dir));
    }
    if (snaps.size() == 3)
      v.check(!snaps[0].empty() && snaps[0] == snaps[1] && snaps[0] == snaps[2],
              "`tpa " + commands[k].substr(0, commands[k].find(" --", 8)) + "`: " + std::to_string(snaps[0].size()) +
                  " files identical across 2 reruns and --jobs 2");
  }
  fs::remove_all(root);
  return v;
}

const std::vector<std::pair<std::string, std::function<Verdict()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Verdict()>>> list{
      {"perfect excitation", perfect_excitation},
      {"bound saturation", bound_saturation},
      {"Gaussian product optimum at equal rates", gaussian_product_equal_rates},
      {"entangled Gaussian optima", entangled_optima},
      {"Gaussian product limits", product_limits},
      {"rising exponential", rising_exponential},
      {"decaying exponential", decaying_exponential},
      {"coherent drive", coherent_drive},
      {"residence time", residence},
      {"entanglement entropy", entropy},
      {"oracle equivalence", oracle_equivalence},
      {"probability bounds", bounds},
      {"detuning maps", detuning},
      {"determinism", determinism},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--criterion N]...\n";
      return 2;
    }
  }
  const auto& list = criteria();
  if (selected.empty())
    for (std::size_t k = 1; k <= list.size(); ++k) selected.push_back(int(k));
  bool all = true;
  for (int n : selected) {
    if (n < 1 || n > int(list.size())) {
      std::cerr << "no criterion " << n << "\n";
      return 2;
    }
    const auto& [title, fn] = list[n - 1];
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    all = all && v.pass;
    std::cout << "criterion " << n << " " << (v.pass ? "PASS" : "FAIL") << ": " << title << "\n";
    for (const auto& s : v.notes) std::cout << "    " << s << "\n";
    std::cout.flush();
  }
  return all ? 0 : 1;
}
