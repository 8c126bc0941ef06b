#include "tpa/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <nlohmann/json.hpp>

#include "tpa/simplex.hpp"

namespace tpa {
namespace {

constexpr double kTieTol = 1e-9;
constexpr double kPenalty = 1e-3;  // per unit of search coordinate outside the bounds

struct Search {
  const OptimizationProblem& problem;
  std::vector<Bound> bounds;
  std::vector<std::size_t> free;  // indices of searched parameters
  std::size_t size;

  explicit Search(const OptimizationProblem& p) : problem(p), bounds(parameter_bounds(p.target, p.atom)) {
    size = bounds.size();
    const auto delay = delay_index(p.target);
    for (std::size_t i = 0; i < size; ++i) {
      if (!p.frozen.empty() && p.frozen.at(i)) continue;
      if (delay && *delay == i && !p.delay_free) continue;
      if (p.tie_widths && i == 1) continue;
      free.push_back(i);
    }
  }

  // Delays are scaled by Γe so that the natural scale 1/Γe maps to 1.
  double to_coord(std::size_t i, double v) const {
    return bounds[i].log_scale ? std::log(v) : v * problem.atom.gamma_e;
  }
  double from_coord(std::size_t i, double z) const {
    return bounds[i].log_scale ? std::exp(z) : z / problem.atom.gamma_e;
  }

  // Full parameter vector from search coordinates, clamped to the bounds;
  // `excess` is the coordinate distance that the clamp removed.
  std::vector<double> full(const std::vector<double>& z, const std::vector<double>& base, double* excess) const {
    std::vector<double> p = base;
    double out = 0.0;
    for (std::size_t k = 0; k < free.size(); ++k) {
      const std::size_t i = free[k];
      const double lo = to_coord(i, bounds[i].lo), hi = to_coord(i, bounds[i].hi);
      const double zc = std::clamp(z[k], lo, hi);
      out += std::abs(z[k] - zc);
      p[i] = from_coord(i, zc);
    }
    apply_constraints(p);
    if (excess) *excess = out;
    return p;
  }

  void apply_constraints(std::vector<double>& p) const {
    const auto delay = delay_index(problem.target);
    if (delay && !problem.delay_free) p[*delay] = 0.0;
    if (!problem.frozen.empty())
      for (std::size_t i = 0; i < size; ++i)
        if (problem.frozen.at(i)) p[i] = *problem.frozen.at(i);
    if (problem.tie_widths) p[1] = p[0];
  }

  std::vector<double> coords(const std::vector<double>& p) const {
    std::vector<double> z;
    for (std::size_t i : free) z.push_back(to_coord(i, std::clamp(p[i], bounds[i].lo, bounds[i].hi)));
    return z;
  }
};

// Deterministic uniform in [0, 1) independent of the standard library.
double unit(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

struct StartOutcome {
  StartRecord record;
  double t_at_max = 0.0;
  double diameter = 0.0;
  int distinct = 0;
};

StartOutcome run_start(const Search& search, const std::vector<double>& start) {
  std::map<std::vector<double>, Peak> cache;
  auto peak_of = [&](const std::vector<double>& p) {
    auto it = cache.find(p);
    if (it != cache.end()) return it->second;
    Peak pk;
    try {
      pk = evaluate_target(search.problem, p);
    } catch (const Error&) {
      pk = {0.0, 0.0};  // parameters the evaluator rejects score as no excitation
    }
    cache.emplace(p, pk);
    return pk;
  };
  auto objective = [&](const std::vector<double>& z) {
    double excess = 0.0;
    const std::vector<double> p = search.full(z, start, &excess);
    return -peak_of(p).p_max + kPenalty * excess;
  };

  StartOutcome out;
  out.record.start = start;
  if (search.free.empty()) {
    const Peak pk = peak_of(start);
    out.record = {start, start, pk.p_max, 1, true};
    out.t_at_max = pk.t_at_max;
    out.distinct = 1;
    return out;
  }
  SimplexOptions opt;
  opt.max_evals = search.problem.max_evals_per_start;
  opt.initial_step = search.problem.initial_step;
  SimplexResult r = nelder_mead(objective, search.coords(start), opt);
  int used = r.evals;
  const int left = search.problem.max_evals_per_start - used;
  if (left > int(search.free.size()) + 1) {
    // One fresh simplex at the best point guards against a collapsed simplex.
    opt.max_evals = left;
    opt.initial_step = std::min(0.1, search.problem.initial_step);
    SimplexResult again = nelder_mead(objective, r.x, opt);
    used += again.evals;
    if (again.f <= r.f) r = again;
    else r.converged = again.converged;
  }
  const std::vector<double> p = search.full(r.x, start, nullptr);
  const Peak pk = peak_of(p);
  out.record.best = p;
  out.record.p_max = pk.p_max;
  out.record.evaluations = used;
  out.record.converged = r.converged;
  out.t_at_max = pk.t_at_max;
  out.diameter = r.diameter;
  out.distinct = int(cache.size());
  return out;
}

}  // namespace

std::string_view target_name(Target t) noexcept {
  switch (t) {
    case Target::gaussian_product: return "gaussian-product";
    case Target::entangled_gaussian: return "entangled-gaussian";
    case Target::rising_exp: return "rising-exp";
    case Target::decaying_exp: return "decaying-exp";
    case Target::coherent: return "coherent";
  }
  return "";
}

Target parse_target(std::string_view name) {
  for (Target t : {Target::gaussian_product, Target::entangled_gaussian, Target::rising_exp, Target::decaying_exp,
                   Target::coherent})
    if (target_name(t) == name) return t;
  throw Error(Errc::unsupported_family, "no optimizable family named '" + std::string(name) + "'");
}

std::vector<std::string> parameter_names(Target t) {
  switch (t) {
    case Target::gaussian_product:
    case Target::coherent: return {"omega1", "omega2", "mu"};
    case Target::entangled_gaussian: return {"omega_plus", "omega_minus", "mu"};
    case Target::rising_exp: return {"omega1", "omega2"};
    case Target::decaying_exp: return {"omega1", "omega2", "t_shift"};
  }
  return {};
}

std::optional<std::size_t> delay_index(Target t) {
  if (t == Target::rising_exp) return std::nullopt;
  return 2;
}

std::vector<Bound> parameter_bounds(Target t, const Atom& atom) {
  validate(atom);
  const Bound width{1e-3 * atom.gamma_f, 1e3 * atom.gamma_f, true};
  const double reach = 50.0 / std::min(atom.gamma_e, atom.gamma_f);
  std::vector<Bound> b{width, width};
  if (delay_index(t)) b.push_back({-reach, reach, false});
  return b;
}

Peak evaluate_target(const OptimizationProblem& problem, const std::vector<double>& p) {
  const Atom& atom = problem.atom;
  switch (problem.target) {
    case Target::gaussian_product:
      return pf_max_over_t(atom, GaussianProduct{p.at(0), p.at(1), p.at(2)}, std::nullopt, problem.pf);
    case Target::entangled_gaussian:
      return pf_max_over_t(atom, EntangledGaussian{p.at(0), p.at(1), p.at(2)}, std::nullopt, problem.pf);
    case Target::rising_exp:
      return pf_max_over_t(atom, RisingExpProduct{p.at(0), p.at(1)}, std::nullopt, problem.pf);
    case Target::decaying_exp:
      return pf_max_over_t(atom, DecayingExpProduct{p.at(0), p.at(1), p.at(2)}, std::nullopt, problem.pf);
    case Target::coherent:
      return pf_max_coherent(atom, CoherentDrive{problem.n1, problem.n2, p.at(0), p.at(1), p.at(2)},
                             problem.coherent);
  }
  throw Error(Errc::unsupported_family, "unknown target");
}

std::vector<std::vector<double>> default_starts(Target t, const Atom& atom) {
  const double ge = atom.gamma_e, gf = atom.gamma_f;
  const std::vector<double> first{ge / 2.0, ge, ge + gf, 2.0 * (ge + gf)};
  const std::vector<double> second{ge + gf, 2.0 * (ge + gf)};
  std::vector<std::vector<double>> out;
  for (double w1 : first)
    for (double w2 : second) {
      std::vector<double> p{w1, w2};
      if (delay_index(t)) p.push_back(1.0 / ge);
      out.push_back(p);
    }
  return out;
}

OptimizationResult optimize_pulse(const OptimizationProblem& problem) {
  validate(problem.atom);
  if (!problem.frozen.empty() && problem.frozen.size() != parameter_names(problem.target).size())
    throw Error(Errc::invalid_config, "frozen list must have one entry per parameter");
  const Search search(problem);

  std::vector<std::vector<double>> starts;
  if (problem.default_starts) starts = default_starts(problem.target, problem.atom);
  for (const auto& s : problem.extra_starts) {
    if (s.size() != search.size) throw Error(Errc::invalid_config, "start point has the wrong number of parameters");
    starts.push_back(s);
  }
  if (starts.empty()) throw Error(Errc::invalid_config, "no start points");
  std::mt19937_64 rng(problem.seed);
  for (auto& s : starts) {
    if (problem.seed != 0) {
      for (std::size_t i : search.free) {
        const double z = search.to_coord(i, s[i]) + 0.2 * (unit(rng) - 0.5);
        s[i] = search.from_coord(i, z);
      }
    }
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::clamp(s[i], search.bounds[i].lo, search.bounds[i].hi);
    search.apply_constraints(s);
  }
  std::sort(starts.begin(), starts.end(), lex_less);
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());

  std::vector<StartOutcome> outcomes(starts.size());
  for (std::size_t k = 0; k < starts.size(); ++k) outcomes[k] = run_start(search, starts[k]);

  OptimizationResult res;
  res.target = problem.target;
  res.names = parameter_names(problem.target);
  double top = -1.0;
  for (const auto& o : outcomes) top = std::max(top, o.record.p_max);
  const StartOutcome* pick = nullptr;
  for (const auto& o : outcomes) {
    if (o.record.p_max < top - kTieTol) continue;
    if (!pick || lex_less(o.record.best, pick->record.best)) pick = &o;
  }
  res.params = pick->record.best;
  res.p_max = pick->record.p_max;
  res.t_at_max = pick->t_at_max;
  res.simplex_diameter = pick->diameter;
  for (const auto& o : outcomes) {
    res.starts.push_back(o.record);
    res.evaluations += o.distinct;
    res.converged = res.converged || o.record.converged;
  }
  return res;
}

std::vector<std::pair<std::string, double>> normalized_parameters(Target t, const Atom& atom,
                                                                  const std::vector<double>& p) {
  const double ge = atom.gamma_e, gf = atom.gamma_f;
  switch (t) {
    case Target::gaussian_product:
    case Target::coherent:
      return {{"omega1/gamma_e", p[0] / ge}, {"omega2/(gamma_e+gamma_f)", p[1] / (ge + gf)}, {"mu*gamma_e", p[2] * ge}};
    case Target::entangled_gaussian:
      return {{"omega_plus/gamma_f", p[0] / gf},
              {"omega_minus/(gamma_f+2gamma_e)", p[1] / (gf + 2.0 * ge)},
              {"mu*gamma_e", p[2] * ge}};
    case Target::rising_exp: return {{"omega1/gamma_f", p[0] / gf}, {"omega2/gamma_f", p[1] / gf}};
    case Target::decaying_exp:
      return {{"omega1/gamma_f", p[0] / gf}, {"omega2/gamma_f", p[1] / gf}, {"t_shift*gamma_f", p[2] * gf}};
  }
  return {};
}

std::vector<AsymptoticRow> asymptotic_checks(Target t, const std::vector<double>& ratios, bool delay_free) {
  OptimizationProblem base;
  base.target = t;
  base.delay_free = delay_free;
  return asymptotic_checks(base, ratios);
}

std::vector<AsymptoticRow> asymptotic_checks(const OptimizationProblem& base, const std::vector<double>& ratios) {
  const Target t = base.target;
  std::vector<AsymptoticRow> rows;
  for (double r : ratios) {
    AsymptoticRow row;
    row.ratio = r;
    try {
      OptimizationProblem prob = base;
      prob.atom = atom_from_ratio(r, base.atom.delta1, base.atom.delta2);
      row.result = optimize_pulse(prob);
      row.normalized = normalized_parameters(t, prob.atom, row.result.params);
      if (t == Target::entangled_gaussian) {
        const EntangledGaussian s{row.result.params[0], row.result.params[1], row.result.params[2]};
        row.entropy_bits = schmidt_analytic(s, 400).entropy_bits;
      }
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string asymptotic_csv(const std::vector<AsymptoticRow>& rows, const Metadata& meta) {
  CsvTable table;
  table.columns = {"ratio"};
  std::vector<std::string> norm_names;
  Target target = Target::gaussian_product;
  for (const auto& r : rows)
    if (r.error.empty()) {
      target = r.result.target;
      for (const auto& [k, v] : r.normalized) norm_names.push_back(k);
      break;
    }
  for (const auto& n : parameter_names(target)) table.columns.push_back(n);
  for (const auto& n : norm_names) table.columns.push_back(n);
  table.columns.insert(table.columns.end(), {"p_max", "t_at_max", "entropy_bits", "converged", "error"});
  for (const auto& r : rows) {
    std::vector<std::string> row{fmt_num(r.ratio)};
    const std::size_t width = table.columns.size() - 6;
    if (r.error.empty()) {
      for (double v : r.result.params) row.push_back(fmt_num(v));
      for (const auto& [k, v] : r.normalized) row.push_back(fmt_num(v));
      row.push_back(fmt_num(r.result.p_max));
      row.push_back(fmt_num(r.result.t_at_max));
      row.push_back(r.entropy_bits ? fmt_num(*r.entropy_bits) : "");
      row.push_back(r.result.converged ? "1" : "0");
      row.push_back("");
    } else {
      row.resize(1 + width + 3, "");
      row.push_back("0");
      row.push_back(r.error);
    }
    table.add_row(std::move(row));
  }
  return table.render(meta);
}

void to_json(nlohmann::json& j, const OptimizationProblem& p) {
  nlohmann::json frozen = nlohmann::json::array();
  for (const auto& f : p.frozen) frozen.push_back(f ? nlohmann::json(*f) : nlohmann::json(nullptr));
  j = {{"atom", p.atom},
       {"target", std::string(target_name(p.target))},
       {"delay_free", p.delay_free},
       {"tie_widths", p.tie_widths},
       {"frozen", frozen},
       {"extra_starts", p.extra_starts},
       {"default_starts", p.default_starts},
       {"seed", p.seed},
       {"max_evals_per_start", p.max_evals_per_start},
       {"initial_step", p.initial_step},
       {"n1", p.n1},
       {"n2", p.n2},
       {"rel_tol", p.pf.rel_tol}};
}

void from_json(const nlohmann::json& j, OptimizationProblem& p) {
  p = OptimizationProblem{};
  if (j.contains("atom")) p.atom = j.at("atom").get<Atom>();
  p.target = parse_target(j.value("target", std::string("gaussian-product")));
  p.delay_free = j.value("delay_free", true);
  p.tie_widths = j.value("tie_widths", false);
  if (j.contains("frozen"))
    for (const auto& f : j.at("frozen")) p.frozen.push_back(f.is_null() ? std::nullopt : std::optional(f.get<double>()));
  if (j.contains("extra_starts")) p.extra_starts = j.at("extra_starts").get<std::vector<std::vector<double>>>();
  p.default_starts = j.value("default_starts", true);
  p.seed = j.value("seed", 0ULL);
  p.max_evals_per_start = j.value("max_evals_per_start", 2000);
  p.initial_step = j.value("initial_step", 0.3);
  p.n1 = j.value("n1", 1.0);
  p.n2 = j.value("n2", 1.0);
  p.pf.rel_tol = j.value("rel_tol", p.pf.rel_tol);
}

void to_json(nlohmann::json& j, const OptimizationResult& r) {
  nlohmann::json params = nlohmann::json::object();
  for (std::size_t i = 0; i < r.names.size(); ++i) params[r.names[i]] = r.params[i];
  nlohmann::json starts = nlohmann::json::array();
  for (const auto& s : r.starts)
    starts.push_back({{"start", s.start},
                      {"best", s.best},
                      {"p_max", s.p_max},
                      {"evaluations", s.evaluations},
                      {"converged", s.converged}});
  j = {{"target", std::string(target_name(r.target))},
       {"params", params},
       {"p_max", r.p_max},
       {"t_at_max", r.t_at_max},
       {"evaluations", r.evaluations},
       {"converged", r.converged},
       {"simplex_diameter", r.simplex_diameter},
       {"starts", starts}};
}

}  // namespace tpa
