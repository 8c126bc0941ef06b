#include "cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <optional>

#include <nlohmann/json.hpp>

#include "tpa/absorption.hpp"
#include "tpa/coherent.hpp"
#include "tpa/optimal.hpp"
#include "tpa/optimize.hpp"
#include "tpa/simplex.hpp"
#include "tpa/states.hpp"
#include "tpa/sweeps.hpp"

namespace tpa::cli {
namespace {

using nlohmann::json;

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Atom atom_of(const RunConfig& cfg) { return atom_from_ratio(cfg.gamma_ratio, cfg.delta1, cfg.delta2); }

PfOptions pf_options(const RunConfig& cfg) {
  PfOptions o;
  if (cfg.tol) o.rel_tol = *cfg.tol;
  return o;
}

CoherentOptions coherent_options(const RunConfig& cfg) {
  CoherentOptions o;
  if (cfg.tol) {
    o.rel_tol = *cfg.tol;
    o.abs_tol = *cfg.tol * 1e-2;
  }
  return o;
}

Target target_of(const RunConfig& cfg) {
  if (cfg.family == "optimal") throw Error(Errc::unsupported_family, "the optimal state has no pulse parameters");
  return parse_target(cfg.family);
}

OptimizationProblem base_problem(const RunConfig& cfg, Target t) {
  OptimizationProblem p;
  p.atom = atom_of(cfg);
  p.target = t;
  p.delay_free = cfg.mu_free;
  p.seed = cfg.seed;
  p.n1 = cfg.n1;
  p.n2 = cfg.n2;
  p.pf = pf_options(cfg);
  p.coherent = coherent_options(cfg);
  return p;
}

std::vector<std::optional<double>> given_params(const RunConfig& cfg, Target t) {
  switch (t) {
    case Target::gaussian_product:
    case Target::coherent:
      return {cfg.omega1, cfg.omega2, cfg.mu};
    case Target::entangled_gaussian:
      return {cfg.omega_plus, cfg.omega_minus, cfg.mu};
    case Target::rising_exp:
      return {cfg.omega1, cfg.omega2};
    case Target::decaying_exp:
      return {cfg.omega1, cfg.omega2, cfg.t_shift};
  }
  return {};
}

std::string params_text(const std::vector<std::string>& names, const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + names[i] + "=" + fmt_num(v[i]);
  return s;
}

std::string bounds_text(Target t, const Atom& atom) {
  const auto names = parameter_names(t);
  const auto bounds = parameter_bounds(t, atom);
  std::string s;
  for (std::size_t i = 0; i < bounds.size(); ++i)
    s += (i ? " " : "") + names[i] + "=[" + fmt_num(bounds[i].lo) + "," + fmt_num(bounds[i].hi) + "]" +
         (bounds[i].log_scale ? "log" : "");
  return s;
}

struct Resolved {
  std::vector<double> params;
  std::optional<OptimizationResult> search;  // set when any parameter was optimized
};

// Parameters given in the config are kept; missing ones are optimized.
Resolved resolve(const RunConfig& cfg, Target t) {
  const auto given = given_params(cfg, t);
  const auto delay = delay_index(t);
  bool complete = true;
  for (std::size_t i = 0; i < given.size(); ++i)
    if (!given[i] && !(delay && *delay == i && !cfg.mu_free)) complete = false;
  if (complete) {
    Resolved r;
    for (std::size_t i = 0; i < given.size(); ++i) r.params.push_back(given[i].value_or(0.0));
    return r;
  }
  OptimizationProblem p = base_problem(cfg, t);
  p.frozen = given;
  OptimizationResult res = optimize_pulse(p);
  return {res.params, std::move(res)};
}

TwoPhotonState make_state(Target t, const std::vector<double>& p) {
  switch (t) {
    case Target::gaussian_product:
      return GaussianProduct{p[0], p[1], p[2]};
    case Target::entangled_gaussian:
      return EntangledGaussian{p[0], p[1], p[2]};
    case Target::rising_exp:
      return RisingExpProduct{p[0], p[1]};
    case Target::decaying_exp:
      return DecayingExpProduct{p[0], p[1], p[2]};
    case Target::coherent:
      break;
  }
  throw Error(Errc::unsupported_family, "coherent drives are not two-photon states");
}

std::string out_path(const RunConfig& cfg, const std::string& fallback, const std::string& suffix) {
  const std::string stem = cfg.name.empty() ? fallback : cfg.name;
  return (std::filesystem::path(cfg.out) / (stem + suffix)).string();
}

json meta_json(const Metadata& meta) {
  json m = json::object();
  for (const auto& [k, v] : meta) m[k] = v;
  return m;
}

void write_json(const std::string& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

std::vector<double> ratios_of(const RunConfig& cfg) {
  if (!cfg.ratios.empty()) return cfg.ratios;
  std::vector<double> r;
  for (int k = 0; k <= 12; ++k) r.push_back(std::pow(10.0, -2.0 + k / 3.0));
  return r;
}

std::vector<double> linspace(double a, double b, int n) {
  if (n < 2) throw Error(Errc::invalid_config, "need at least 2 samples");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) v[k] = a + (b - a) * k / (n - 1);
  v.back() = b;
  return v;
}

std::pair<double, double> window_of(const RunConfig& cfg, double lo, double hi) {
  const double a = cfg.t_min.value_or(lo), b = cfg.t_max.value_or(hi);
  if (!(b > a)) throw Error(Errc::invalid_window, "t_max must exceed t_min");
  return {a, b};
}

CsvTable trajectory_table(const DensityTrajectory& traj, const CoherentDrive& d) {
  CsvTable table{{"t*gamma_f", "rho_gg", "rho_ee", "rho_ff", "re_rho_ge", "im_rho_ge", "re_rho_gf", "im_rho_gf",
                  "re_rho_ef", "im_rho_ef", "input1", "input2"},
                 {}};
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double t = traj.times[k];
    const DensityMatrix& r = traj.states[k];
    const double g1 = gaussian_envelope(d.omega1, 0.0, t), g2 = gaussian_envelope(d.omega2, d.mu, t);
    table.add_row({fmt_num(t), fmt_num(r.gg), fmt_num(r.ee), fmt_num(r.ff), fmt_num(r.ge.real()),
                   fmt_num(r.ge.imag()), fmt_num(r.gf.real()), fmt_num(r.gf.imag()), fmt_num(r.ef.real()),
                   fmt_num(r.ef.imag()), fmt_num(d.n1 * g1 * g1), fmt_num(d.n2 * g2 * g2)});
  }
  return table;
}

json optimum_json(const OptimizationResult& r, const Atom& atom) {
  json j = r;
  json norm = json::object();
  for (const auto& [k, v] : normalized_parameters(r.target, atom, r.params)) norm[k] = v;
  j["normalized"] = norm;
  return j;
}

SweepAxis axis(const std::string& name, std::optional<double> lo, std::optional<double> hi, double dlo, double dhi,
               int n) {
  SweepAxis a;
  a.name = name;
  a.min = lo.value_or(dlo);
  a.max = hi.value_or(dhi);
  a.n_points = n;
  return a;
}

void add_grid_files(Outcome& out, const RunConfig& cfg, const std::string& stem, const GridResult& g,
                    const Metadata& meta, const std::string& optimum_key, const json& optimum) {
  const std::string csv = out_path(cfg, stem, ".csv"), js = out_path(cfg, stem, ".json");
  write_file(csv, g.csv(meta));
  json j = g.json(meta);
  if (!optimum.is_null()) j[optimum_key] = optimum;
  write_json(js, j);
  out.files.insert(out.files.end(), {csv, js});
}

Outcome sweep_ratio(const RunConfig& cfg, Metadata meta) {
  const Target t = target_of(cfg);
  OptimizationProblem base = base_problem(cfg, t);
  meta.emplace_back("search_bounds", bounds_text(t, base.atom));
  const GridResult g = ratio_sweep(base, ratios_of(cfg), cfg.jobs);
  Outcome out;
  add_grid_files(out, cfg, "sweep_ratio", g, meta, "", json());
  out.summary = std::to_string(g.cells.size()) + " ratios";
  return out;
}

// Product and entangled Gaussian optima side by side, with and without delay.
Outcome sweep_comparison(const RunConfig& cfg, Metadata meta) {
  const auto ratios = ratios_of(cfg);
  const GridResult prod = ratio_sweep(base_problem(cfg, Target::gaussian_product), ratios, cfg.jobs);
  const GridResult ent = ratio_sweep(base_problem(cfg, Target::entangled_gaussian), ratios, cfg.jobs);
  CsvTable table{{"ratio", "product_p_max", "product_p_max_no_delay", "entangled_p_max", "entangled_p_max_no_delay",
                  "gain", "gain_no_delay", "converged"},
                 {}};
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    const auto& p = prod.cells[k].values;
    const auto& e = ent.cells[k].values;
    const bool ok = prod.cells[k].converged && ent.cells[k].converged;
    table.add_row({fmt_num(ratios[k]), fmt_num(p[0]), fmt_num(p[1]), fmt_num(e[0]), fmt_num(e[1]),
                   fmt_num(e[0] - p[0]), fmt_num(e[1] - p[1]), ok ? "1" : "0"});
  }
  meta.emplace_back("search_bounds", bounds_text(Target::entangled_gaussian, atom_of(cfg)));
  Outcome out;
  const std::string path = out_path(cfg, "sweep_comparison", ".csv");
  write_file(path, table.render(meta));
  out.files.push_back(path);
  out.summary = std::to_string(ratios.size()) + " ratios";
  return out;
}

Outcome sweep_asymptotic(const RunConfig& cfg, Metadata meta) {
  const Target t = target_of(cfg);
  const auto rows = asymptotic_checks(base_problem(cfg, t), ratios_of(cfg));
  Outcome out;
  const std::string path = out_path(cfg, "sweep_asymptotic", ".csv");
  write_file(path, asymptotic_csv(rows, meta));
  out.files.push_back(path);
  out.summary = std::to_string(rows.size()) + " ratios";
  return out;
}

Outcome sweep_entropy(const RunConfig& cfg, const Metadata& meta) {
  RunConfig c = cfg;
  c.family = "entangled-gaussian";
  const auto ratios = ratios_of(c);
  OptimizationProblem base = base_problem(c, Target::entangled_gaussian);
  base.delay_free = true;
  const auto free_rows = asymptotic_checks(base, ratios);
  base.delay_free = false;
  const auto zero_rows = asymptotic_checks(base, ratios);
  CsvTable table{{"ratio", "entropy_bits_mu_free", "entropy_bits_mu_zero", "p_max_mu_free", "p_max_mu_zero"}, {}};
  auto cell = [](const AsymptoticRow& r, bool entropy) {
    if (!r.error.empty()) return std::string("nan");
    return fmt_num(entropy ? r.entropy_bits.value_or(NAN) : r.result.p_max);
  };
  for (std::size_t k = 0; k < ratios.size(); ++k)
    table.add_row({fmt_num(ratios[k]), cell(free_rows[k], true), cell(zero_rows[k], true), cell(free_rows[k], false),
                   cell(zero_rows[k], false)});
  Outcome out;
  const std::string path = out_path(cfg, "sweep_entropy", ".csv");
  write_file(path, table.render(meta));
  out.files.push_back(path);
  out.summary = std::to_string(ratios.size()) + " ratios";
  return out;
}

Outcome sweep_sensitivity(const RunConfig& cfg, Metadata meta) {
  const Target t = target_of(cfg);
  if (cfg.policy != "reoptimize" && cfg.policy != "frozen")
    throw Error(Errc::invalid_config, "policy must be reoptimize or frozen");
  const int n = cfg.grid > 0 ? cfg.grid : (cfg.fast ? 11 : 21);
  const auto names = parameter_names(t);
  const double wide = 2.0 * (1.0 + 2.0 * cfg.gamma_ratio) + 2.0;
  SensitivitySpec spec;
  spec.problem = base_problem(cfg, t);
  spec.first = axis(names[0], cfg.axis1_min, cfg.axis1_max, 0.1, 4.0, n);
  spec.second = axis(names[1], cfg.axis2_min, cfg.axis2_max, 0.1, wide, n);
  spec.policy = cfg.policy == "frozen" ? DelayPolicy::frozen : DelayPolicy::reoptimize;
  spec.jobs = cfg.jobs;
  meta.emplace_back("delay_policy", cfg.policy);
  const SensitivityMap m = sensitivity_map(spec);
  meta.emplace_back("global_optimum", params_text(m.global.names, m.global.params) + " p_max=" +
                                          fmt_num(m.global.p_max));
  Outcome out;
  add_grid_files(out, cfg, "sweep_sensitivity", m.grid, meta, "global", optimum_json(m.global, spec.problem.atom));
  out.summary = "global p_max=" + fmt_num(m.global.p_max);
  return out;
}

Outcome sweep_detuning(const RunConfig& cfg, Metadata meta) {
  const Target t = target_of(cfg);
  const int n = cfg.grid > 0 ? cfg.grid : (cfg.fast ? 21 : 41);
  DetuningSpec spec;
  spec.problem = base_problem(cfg, t);
  spec.delta1 = axis("delta1", cfg.axis1_min, cfg.axis1_max, -4.0, 4.0, n);
  spec.delta2 = axis("delta2", cfg.axis2_min, cfg.axis2_max, -4.0, 4.0, n);
  spec.jobs = cfg.jobs;
  meta.emplace_back("search_bounds", bounds_text(t, spec.problem.atom));
  const DetuningMap m = detuning_map(spec);
  meta.emplace_back("resonant_optimum", params_text(m.resonant.names, m.resonant.params) + " p_max=" +
                                            fmt_num(m.resonant.p_max));
  Outcome out;
  add_grid_files(out, cfg, "sweep_detuning", m.grid, meta, "resonant",
                 optimum_json(m.resonant, atom_from_ratio(cfg.gamma_ratio)));
  out.summary = "resonant p_max=" + fmt_num(m.resonant.p_max);
  return out;
}

// Joint time and frequency densities on samples × samples grids.
Outcome sweep_densities(const RunConfig& cfg, Metadata meta) {
  const Atom atom = atom_of(cfg);
  TwoPhotonState state;
  std::function<double(double, double)> spectral;  // (δ1, δ2)
  if (cfg.family == "optimal") {
    state = OptimalState{atom, cfg.t_star, cfg.t0};
    spectral = [atom](double d1, double d2) { return joint_spectral_density(atom, d2, d1); };
  } else {
    const Target t = target_of(cfg);
    const Resolved r = resolve(cfg, t);
    meta.emplace_back("parameters", params_text(parameter_names(t), r.params));
    state = make_state(t, r.params);
    const SpectralDensities sd = spectral_densities(state);
    if (t == Target::entangled_gaussian)
      spectral = [sd](double d1, double d2) { return 2.0 * sd.sum(d1 + d2) * sd.difference(d2 - d1); };
    else
      spectral = [sd](double d1, double d2) { return sd.marginal1(d1) * sd.marginal2(d2); };
  }
  const Support sup = support(state);
  const auto [lo, hi] = window_of(cfg, std::min(sup.t1_lo, sup.t2_lo), std::max(sup.t1_hi, sup.t2_hi));
  const double reach = 4.0 * (1.0 + 2.0 * cfg.gamma_ratio);
  const double f_lo = cfg.axis1_min.value_or(-reach), f_hi = cfg.axis1_max.value_or(reach);
  const auto ts = linspace(lo, hi, cfg.samples), fs = linspace(f_lo, f_hi, cfg.samples);

  CsvTable time_table{{"t1*gamma_f", "t2*gamma_f", "density"}, {}};
  for (double t1 : ts)
    for (double t2 : ts) time_table.add_row({fmt_num(t1), fmt_num(t2), fmt_num(std::norm(amplitude(state, t2, t1)))});
  CsvTable freq_table{{"(w1-w_eg)/gamma_f", "(w2-w_fe)/gamma_f", "density"}, {}};
  for (double d1 : fs)
    for (double d2 : fs) freq_table.add_row({fmt_num(d1), fmt_num(d2), fmt_num(spectral(d1, d2))});

  Outcome out;
  const std::string tp = out_path(cfg, "densities", "_time.csv"), fp = out_path(cfg, "densities", "_frequency.csv");
  write_file(tp, time_table.render(meta));
  write_file(fp, freq_table.render(meta));
  out.files = {tp, fp};
  out.summary = std::to_string(ts.size()) + "x" + std::to_string(ts.size()) + " density grids";
  return out;
}

}  // namespace

Metadata run_metadata(const RunConfig& cfg) {
  const PfOptions pf = pf_options(cfg);
  const CoherentOptions co = coherent_options(cfg);
  const SimplexOptions sx;
  return {
      {"tool", std::string("tpa ") + TPA_VERSION},
      {"command", cfg.command},
      {"config_hash", config_hash(cfg)},
      {"config", canonical_json(cfg)},
      {"tolerances", "pf_rel_tol=" + fmt_num(pf.rel_tol) + " coherent_rel_tol=" + fmt_num(co.rel_tol) +
                         " coherent_abs_tol=" + fmt_num(co.abs_tol) + " simplex_x_tol=" + fmt_num(sx.x_tol) +
                         " simplex_f_tol=" + fmt_num(sx.f_tol)},
      {"units", "times in 1/gamma_f; rates, widths and detunings in gamma_f"},
      {"timestamp", utc_now()},
  };
}

Outcome cmd_curve(const RunConfig& cfg) {
  if (cfg.family == "coherent") return cmd_coherent(cfg);
  Metadata meta = run_metadata(cfg);
  const Atom atom = atom_of(cfg);
  const PfOptions pf = pf_options(cfg);
  TwoPhotonState state;
  std::optional<double> t0;
  if (cfg.family == "optimal") {
    state = OptimalState{atom, cfg.t_star, cfg.t0};
    t0 = cfg.t0;
  } else {
    const Target t = target_of(cfg);
    const Resolved r = resolve(cfg, t);
    meta.emplace_back("parameters", params_text(parameter_names(t), r.params));
    meta.emplace_back("parameters_source", r.search ? "optimized" : "given");
    state = make_state(t, r.params);
  }
  const auto [lo, hi] = scan_window(atom, state, t0);
  const auto [a, b] = window_of(cfg, lo, hi);
  const auto times = linspace(a, b, cfg.samples);
  const ExcitationCurve curve = excitation_curve(atom, state, times, t0, pf);
  const Peak peak = pf_max_over_t(atom, state, t0, pf);
  meta.emplace_back("p_max", fmt_num(peak.p_max));
  meta.emplace_back("t_at_max", fmt_num(peak.t_at_max));

  CsvTable table{{"t*gamma_f", "P_f", "input1", "input2"}, {}};
  for (std::size_t k = 0; k < times.size(); ++k) {
    const TimeDensities d = time_densities(state, times[k]);
    table.add_row({fmt_num(times[k]), fmt_num(curve.probabilities[k]), fmt_num(d.first), fmt_num(d.second)});
  }
  Outcome out;
  const std::string path = out_path(cfg, "curve", ".csv");
  write_file(path, table.render(meta));
  out.files.push_back(path);
  out.summary = "p_max=" + fmt_num(peak.p_max) + " t_at_max=" + fmt_num(peak.t_at_max);
  return out;
}

Outcome cmd_optimize(const RunConfig& cfg) {
  Metadata meta = run_metadata(cfg);
  const Target t = target_of(cfg);
  OptimizationProblem p = base_problem(cfg, t);
  p.frozen = given_params(cfg, t);
  bool any_free = false;
  for (std::size_t i = 0; i < p.frozen.size(); ++i)
    if (!p.frozen[i] && !(delay_index(t) == i && !p.delay_free)) any_free = true;
  if (!any_free) throw Error(Errc::invalid_config, "every parameter is fixed; nothing to optimize");
  meta.emplace_back("search_bounds", bounds_text(t, p.atom));
  const OptimizationResult r = optimize_pulse(p);
  json j{{"metadata", meta_json(meta)}, {"problem", p}, {"result", optimum_json(r, p.atom)}};
  Outcome out;
  const std::string path = out_path(cfg, "optimize", ".json");
  write_json(path, j);
  out.files.push_back(path);
  out.summary = params_text(r.names, r.params) + " p_max=" + fmt_num(r.p_max) +
                (r.converged ? "" : " (not converged)");
  return out;
}

Outcome cmd_sweep(const RunConfig& cfg) {
  Metadata meta = run_metadata(cfg);
  if (cfg.kind == "ratio") return sweep_ratio(cfg, meta);
  if (cfg.kind == "comparison") return sweep_comparison(cfg, meta);
  if (cfg.kind == "asymptotic") return sweep_asymptotic(cfg, meta);
  if (cfg.kind == "entropy") return sweep_entropy(cfg, meta);
  if (cfg.kind == "sensitivity") return sweep_sensitivity(cfg, meta);
  if (cfg.kind == "detuning") return sweep_detuning(cfg, meta);
  if (cfg.kind == "densities") return sweep_densities(cfg, meta);
  throw Error(Errc::invalid_config, "unknown sweep kind '" + cfg.kind + "'");
}

Outcome cmd_reference(const RunConfig& cfg) {
  const Metadata meta = run_metadata(cfg);
  const Atom atom = atom_of(cfg);
  if (!atom.resonant()) throw Error(Errc::not_resonant, "reference quantities assume resonant driving");
  const OptimalState state{atom, cfg.t_star, std::nullopt};

  json j{{"metadata", meta_json(meta)}, {"atom", atom}, {"t_star", cfg.t_star}};
  const ArrivalExpectations arr = arrival_expectations(atom, cfg.t_star);
  j["arrival_expectations"] = {{"first", arr.first}, {"second", arr.second}};
  j["residence_time"] = {{"bound", 2.0 / atom.gamma_f}, {"optimal_state", residence_time(atom, state, pf_options(cfg))}};
  const SumDiffDensities sdd = sum_diff_densities(atom);
  j["spectral_fwhm"] = {{"marginal1", spectral_marginal_1(atom).fwhm},
                        {"marginal2", spectral_marginal_2(atom).fwhm},
                        {"sum", sdd.sum.fwhm},
                        {"difference", sdd.difference.fwhm}};

  std::vector<double> horizons{0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
  if (cfg.t0) horizons.push_back(cfg.t_star - *cfg.t0);
  json bounds = json::array();
  for (double h : horizons)
    bounds.push_back({{"horizon", h}, {"pmax_bound", pmax_bound(atom, h)}, {"complement", pmax_complement(atom, h)}});
  j["pmax_bound"] = bounds;

  SchmidtOptions so;
  so.max_grid_points = cfg.schmidt_max_grid;
  json entropy = json::array();
  for (double r : cfg.ratios.empty() ? std::vector<double>{cfg.gamma_ratio} : cfg.ratios) {
    json row{{"ratio", r}};
    try {
      const SchmidtResult s = schmidt_numeric(OptimalState{atom_from_ratio(r), 0.0, std::nullopt}, so);
      row["entropy_bits"] = s.entropy_bits;
      row["truncation_error"] = s.truncation_error;
      row["grid_points"] = s.grid_points;
    } catch (const Error& e) {
      row["error"] = e.what();
    }
    entropy.push_back(row);
  }
  j["optimal_state_entropy"] = entropy;

  const Support sup = support(state);
  const auto [lo, hi] = window_of(cfg, std::max(sup.t1_lo, cfg.t_star - 12.0 / std::min(atom.gamma_e, atom.gamma_f)),
                                  cfg.t_star);
  CsvTable times{{"t*gamma_f", "first", "second"}, {}};
  const ArrivalDensities ad = arrival_densities(atom, cfg.t_star);
  for (double t : linspace(lo, hi, cfg.samples)) times.add_row({fmt_num(t), fmt_num(ad.first(t)), fmt_num(ad.second(t))});
  const double reach = 4.0 * (1.0 + 2.0 * atom.gamma_e);
  CsvTable spectra{{"detuning/gamma_f", "marginal1", "marginal2", "sum", "difference"}, {}};
  const Lorentz m1 = spectral_marginal_1(atom), m2 = spectral_marginal_2(atom);
  for (double d : linspace(-reach, reach, cfg.samples))
    spectra.add_row({fmt_num(d), fmt_num(m1(d)), fmt_num(m2(d)), fmt_num(sdd.sum(d)), fmt_num(sdd.difference(d))});

  Outcome out;
  const std::string jp = out_path(cfg, "reference", ".json"), tp = out_path(cfg, "reference", "_times.csv"),
                    sp = out_path(cfg, "reference", "_spectra.csv");
  write_json(jp, j);
  write_file(tp, times.render(meta));
  write_file(sp, spectra.render(meta));
  out.files = {jp, tp, sp};
  out.summary = "residence_time=" + fmt_num(j["residence_time"]["optimal_state"].get<double>()) +
                " first=" + fmt_num(arr.first) + " second=" + fmt_num(arr.second);
  return out;
}

Outcome cmd_coherent(const RunConfig& cfg) {
  Metadata meta = run_metadata(cfg);
  const Atom atom = atom_of(cfg);
  const CoherentOptions co = coherent_options(cfg);
  RunConfig c = cfg;
  c.family = "coherent";
  const Resolved r = resolve(c, Target::coherent);
  const CoherentDrive drive{cfg.n1, cfg.n2, r.params[0], r.params[1], r.params[2]};
  validate(drive);
  meta.emplace_back("parameters", params_text(parameter_names(Target::coherent), r.params));
  meta.emplace_back("parameters_source", r.search ? "optimized" : "given");
  meta.emplace_back("search_bounds", bounds_text(Target::coherent, atom));
  TimeWindow w = coherent_window(atom, drive, cfg.samples);
  if (cfg.t_min) w.t_start = *cfg.t_min;
  if (cfg.t_max) w.t_end = *cfg.t_max;
  const DensityTrajectory traj = evolve(atom, drive, w, co);
  const Peak peak = pf_max_coherent(atom, drive, co);
  meta.emplace_back("p_max", fmt_num(peak.p_max));
  meta.emplace_back("t_at_max", fmt_num(peak.t_at_max));

  Outcome out;
  const std::string fallback = cfg.command == "curve" ? "curve" : "coherent";
  const std::string path = out_path(cfg, fallback, ".csv");
  write_file(path, trajectory_table(traj, drive).render(meta));
  out.files.push_back(path);
  if (cfg.command == "coherent") {
    json j{{"metadata", meta_json(meta)},
           {"drive", {{"n1", drive.n1}, {"n2", drive.n2}, {"omega1", drive.omega1}, {"omega2", drive.omega2},
                      {"mu", drive.mu}}},
           {"p_max", peak.p_max},
           {"t_at_max", peak.t_at_max}};
    if (r.search) j["optimization"] = optimum_json(*r.search, atom);
    const std::string jp = out_path(cfg, fallback, ".json");
    write_json(jp, j);
    out.files.push_back(jp);
  }
  out.summary = params_text(parameter_names(Target::coherent), r.params) + " p_max=" + fmt_num(peak.p_max);
  return out;
}

Outcome run(const RunConfig& cfg) {
  if (cfg.command == "curve") return cmd_curve(cfg);
  if (cfg.command == "optimize") return cmd_optimize(cfg);
  if (cfg.command == "sweep") return cmd_sweep(cfg);
  if (cfg.command == "reference") return cmd_reference(cfg);
  if (cfg.command == "coherent") return cmd_coherent(cfg);
  throw Error(Errc::invalid_config, "unknown command '" + cfg.command + "'");
}

}  // namespace tpa::cli
