#include "tpa/simplex.hpp"

#include <algorithm>
#include <cmath>

#include "tpa/model.hpp"

namespace tpa {
namespace {

struct Vertex {
  std::vector<double> x;
  double f;
};

double diameter(const std::vector<Vertex>& s) {
  double d = 0.0, scale = 1.0;
  for (double v : s.front().x) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 1; i < s.size(); ++i)
    for (std::size_t k = 0; k < s[i].x.size(); ++k) d = std::max(d, std::abs(s[i].x[k] - s.front().x[k]));
  return d / scale;
}

}  // namespace

SimplexResult nelder_mead(const Objective& f, std::vector<double> x0, const SimplexOptions& opt) {
  const std::size_t n = x0.size();
  if (n == 0) throw Error(Errc::invalid_config, "simplex search needs at least one free parameter");
  SimplexResult out;
  auto eval = [&](const std::vector<double>& x) {
    ++out.evals;
    const double v = f(x);
    return std::isnan(v) ? INFINITY : v;
  };

  std::vector<Vertex> s;
  s.push_back({x0, eval(x0)});
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> x = x0;
    x[k] += opt.initial_step;
    s.push_back({x, eval(x)});
  }
  auto order = [&] {
    std::stable_sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
  };
  auto along = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = c[k] + t * (w[k] - c[k]);
    return x;
  };

  order();
  while (true) {
    out.diameter = diameter(s);
    if (out.diameter < opt.x_tol && s.back().f - s.front().f < opt.f_tol) {
      out.converged = true;
      break;
    }
    if (out.evals >= opt.max_evals) break;

    std::vector<double> c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) c[k] += s[i].x[k] / n;
    Vertex& worst = s.back();
    const std::vector<double> xr = along(c, worst.x, -1.0);
    const double fr = eval(xr);
    if (fr < s.front().f) {
      const std::vector<double> xe = along(c, worst.x, -2.0);
      const double fe = eval(xe);
      worst = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
    } else if (fr < s[n - 1].f) {
      worst = {xr, fr};
    } else {
      const bool outside = fr < worst.f;
      const std::vector<double> xc = along(c, worst.x, outside ? -0.5 : 0.5);
      const double fc = eval(xc);
      if (fc < std::min(fr, worst.f)) {
        worst = {xc, fc};
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          s[i].x = along(s.front().x, s[i].x, 0.5);
          s[i].f = eval(s[i].x);
        }
      }
    }
    order();
  }
  out.x = s.front().x;
  out.f = s.front().f;
  return out;
}

}  // namespace tpa
