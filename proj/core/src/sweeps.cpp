#include "tpa/sweeps.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include <nlohmann/json.hpp>

namespace tpa {
namespace {

// Runs fn(k) for k in [0, n) on up to `jobs` threads.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), n);
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < n; k = next++) fn(k);
    });
  for (auto& t : pool) t.join();
}

GridCell cell_from(const OptimizationResult& r) {
  return {{r.p_max}, r.params, r.converged, ""};
}

GridCell failed_cell(const Error& e, std::size_t columns) {
  return {std::vector<double>(columns, NAN), {}, false, e.what()};
}

// Simplex edge for warm-started cells, in search coordinates.
constexpr double kWarmStep = 0.15;

int sign(long v) { return (v > 0) - (v < 0); }

}  // namespace

std::vector<double> SweepAxis::values() const {
  validate(*this);
  if (!explicit_values.empty()) return explicit_values;
  std::vector<double> v(static_cast<std::size_t>(n_points));
  for (int k = 0; k < n_points; ++k) {
    const double f = double(k) / (n_points - 1);
    v[k] = log_scale ? std::exp(std::log(min) + f * (std::log(max) - std::log(min))) : min + f * (max - min);
  }
  v.front() = min;
  v.back() = max;
  return v;
}

void validate(const SweepAxis& a) {
  if (!a.explicit_values.empty()) {
    if (a.explicit_values.size() < 2) throw Error(Errc::invalid_config, "axis '" + a.name + "' needs at least 2 points");
    if (int(a.explicit_values.size()) != a.n_points)
      throw Error(Errc::invalid_config, "axis '" + a.name + "' point count does not match its values");
    return;
  }
  if (a.n_points < 2) throw Error(Errc::invalid_config, "axis '" + a.name + "' needs at least 2 points");
  if (!(a.max > a.min)) throw Error(Errc::invalid_config, "axis '" + a.name + "' needs max > min");
  if (a.log_scale && !(a.min > 0.0)) throw Error(Errc::invalid_config, "log axis '" + a.name + "' must be positive");
}

const GridCell& GridResult::at(std::size_t i, std::size_t j) const {
  const std::size_t cols = axes.size() > 1 ? std::size_t(axes[1].n_points) : 1;
  return cells.at(i * cols + j);
}

std::string GridResult::csv(const Metadata& meta) const {
  CsvTable table;
  for (const auto& a : axes) table.columns.push_back(a.name);
  for (const auto& c : columns) table.columns.push_back(c);
  for (const auto& p : param_names) table.columns.push_back(p);
  table.columns.push_back("converged");
  std::vector<std::vector<double>> vals;
  for (const auto& a : axes) vals.push_back(a.values());
  const std::size_t cols = axes.size() > 1 ? vals[1].size() : 1;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    std::vector<std::string> row{fmt_num(vals[0][k / cols])};
    if (axes.size() > 1) row.push_back(fmt_num(vals[1][k % cols]));
    for (double v : cells[k].values) row.push_back(fmt_num(v));
    for (std::size_t p = 0; p < param_names.size(); ++p)
      row.push_back(p < cells[k].params.size() ? fmt_num(cells[k].params[p]) : "");
    row.push_back(cells[k].converged ? "1" : "0");
    table.add_row(std::move(row));
  }
  return table.render(meta);
}

nlohmann::json GridResult::json(const Metadata& meta) const {
  nlohmann::json j;
  nlohmann::json m = nlohmann::json::object();
  for (const auto& [k, v] : meta) m[k] = v;
  j["metadata"] = m;
  j["axes"] = nlohmann::json::array();
  for (const auto& a : axes)
    j["axes"].push_back({{"name", a.name},
                         {"min", a.min},
                         {"max", a.max},
                         {"n_points", a.n_points},
                         {"log_scale", a.log_scale},
                         {"values", a.values()}});
  j["columns"] = columns;
  j["param_names"] = param_names;
  const std::size_t cols = axes.size() > 1 ? std::size_t(axes[1].n_points) : 1;
  const std::size_t rows = cells.size() / cols;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    nlohmann::json matrix = nlohmann::json::array();
    for (std::size_t r = 0; r < rows; ++r) {
      nlohmann::json line = nlohmann::json::array();
      for (std::size_t q = 0; q < cols; ++q) {
        const double v = cells[r * cols + q].values[c];
        line.push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr));
      }
      matrix.push_back(axes.size() > 1 ? line : line[0]);
    }
    j["values"][columns[c]] = matrix;
  }
  nlohmann::json cell_meta = nlohmann::json::array();
  for (const auto& c : cells) {
    nlohmann::json e{{"converged", c.converged}, {"params", c.params}};
    if (!c.error.empty()) e["error"] = c.error;
    cell_meta.push_back(e);
  }
  j["cells"] = cell_meta;
  return j;
}

GridResult ratio_sweep(Target target, const std::vector<double>& ratios, int jobs) {
  OptimizationProblem base;
  base.target = target;
  return ratio_sweep(base, ratios, jobs);
}

GridResult ratio_sweep(const OptimizationProblem& base, const std::vector<double>& ratios, int jobs) {
  const Target target = base.target;
  if (ratios.size() < 2) throw Error(Errc::invalid_config, "a ratio sweep needs at least 2 ratios");
  const bool has_delay = delay_index(target).has_value();
  GridResult g;
  g.axes = {{"ratio", ratios.front(), ratios.back(), int(ratios.size()), false, ratios}};
  g.columns = {"p_max"};
  if (has_delay) g.columns.push_back("p_max_no_delay");
  g.param_names = parameter_names(target);
  g.cells.resize(ratios.size());
  parallel_for(ratios.size(), jobs, [&](std::size_t k) {
    try {
      OptimizationProblem p = base;
      p.atom = atom_from_ratio(ratios[k], base.atom.delta1, base.atom.delta2);
      p.delay_free = true;
      const OptimizationResult free = optimize_pulse(p);
      GridCell cell = cell_from(free);
      if (has_delay) {
        p.delay_free = false;
        const OptimizationResult zero = optimize_pulse(p);
        cell.values.push_back(zero.p_max);
        cell.converged = cell.converged && zero.converged;
      }
      g.cells[k] = std::move(cell);
    } catch (const Error& e) {
      g.cells[k] = failed_cell(e, g.columns.size());
    }
  });
  return g;
}

SensitivityMap sensitivity_map(const SensitivitySpec& spec) {
  const Target target = spec.problem.target;
  if (target != Target::gaussian_product && target != Target::entangled_gaussian)
    throw Error(Errc::unsupported_family, "sensitivity maps cover the Gaussian families");
  SensitivityMap out;
  OptimizationProblem global = spec.problem;
  global.delay_free = true;
  global.frozen.clear();
  out.global = optimize_pulse(global);
  const double mu_star = out.global.params[2];

  GridResult& g = out.grid;
  g.axes = {spec.first, spec.second};
  g.columns = {"p_max"};
  g.param_names = parameter_names(target);
  const std::vector<double> xs = spec.first.values(), ys = spec.second.values();
  g.cells.resize(xs.size() * ys.size());
  parallel_for(g.cells.size(), spec.jobs, [&](std::size_t k) {
    const double w1 = xs[k / ys.size()], w2 = ys[k % ys.size()];
    try {
      OptimizationProblem p = global;
      p.frozen = {w1, w2, std::nullopt};
      p.default_starts = false;
      p.extra_starts = {{w1, w2, mu_star}};
      if (spec.policy == DelayPolicy::frozen) p.frozen[2] = mu_star;
      g.cells[k] = cell_from(optimize_pulse(p));
    } catch (const Error& e) {
      g.cells[k] = failed_cell(e, 1);
    }
  });
  return out;
}

DetuningMap detuning_map(const DetuningSpec& spec) {
  const Target target = spec.problem.target;
  if (target == Target::rising_exp || target == Target::decaying_exp)
    throw Error(Errc::unsupported_family, "detuning maps cover the Gaussian and coherent families");
  DetuningMap out;
  OptimizationProblem base = spec.problem;
  const double ratio = base.atom.ratio();
  base.atom = atom_from_ratio(ratio);
  out.resonant = optimize_pulse(base);

  GridResult& g = out.grid;
  g.axes = {spec.delta1, spec.delta2};
  g.columns = {"p_max"};
  g.param_names = parameter_names(target);
  const std::vector<double> d1 = spec.delta1.values(), d2 = spec.delta2.values();
  const long n1 = long(d1.size()), n2 = long(d2.size());
  const long c1 = (n1 - 1) / 2, c2 = (n2 - 1) / 2;
  g.cells.resize(std::size_t(n1 * n2));

  // Level = Chebyshev distance from the centre cell; the parent of a cell
  // moves each index one step toward the centre.
  std::vector<std::vector<std::size_t>> levels;
  for (long i = 0; i < n1; ++i)
    for (long j = 0; j < n2; ++j) {
      const std::size_t lvl = std::size_t(std::max(std::abs(i - c1), std::abs(j - c2)));
      if (levels.size() <= lvl) levels.resize(lvl + 1);
      levels[lvl].push_back(std::size_t(i * n2 + j));
    }
  for (const auto& level : levels) {
    parallel_for(level.size(), spec.jobs, [&](std::size_t q) {
      const std::size_t k = level[q];
      const long i = long(k) / n2, j = long(k) % n2;
      OptimizationProblem p = base;
      p.atom = atom_from_ratio(ratio, d1[std::size_t(i)], d2[std::size_t(j)]);
      p.default_starts = false;
      p.initial_step = kWarmStep;
      p.extra_starts = {out.resonant.params};
      if (i != c1 || j != c2) {
        const GridCell& parent = g.cells[std::size_t((i - sign(i - c1)) * n2 + (j - sign(j - c2)))];
        if (!parent.params.empty()) p.extra_starts.push_back(parent.params);
      }
      try {
        g.cells[k] = cell_from(optimize_pulse(p));
      } catch (const Error& e) {
        g.cells[k] = failed_cell(e, 1);
      }
    });
  }
  return out;
}

double symmetry_defect(const GridResult& g) {
  if (g.axes.size() != 2 || g.axes[0].n_points != g.axes[1].n_points)
    throw Error(Errc::invalid_config, "symmetry defect needs a square map");
  const std::size_t n = std::size_t(g.axes[0].n_points);
  double top = 0.0, sum = 0.0;
  for (const auto& c : g.cells) top = std::max(top, c.values[0]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) sum += std::abs(g.at(i, j).values[0] - g.at(j, i).values[0]);
  return sum / (double(n * n) * top);
}

}  // namespace tpa
