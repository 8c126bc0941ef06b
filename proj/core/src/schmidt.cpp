#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <boost/math/special_functions/trigamma.hpp>

#include "tpa/quadrature.hpp"
#include "tpa/states.hpp"

namespace tpa {
namespace {

constexpr int kPanelOrder = 8;
constexpr int kCutOrder = 24;

struct Rule {
  std::vector<double> x, w;  // on [-1, 1]
};

Rule gauss_legendre(int n) {
  Rule r{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.x[i] = -x;
    r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

const Rule& panel_rule() {
  static const Rule r = gauss_legendre(kPanelOrder);
  return r;
}

const Rule& cut_rule() {
  static const Rule r = gauss_legendre(kCutOrder);
  return r;
}

// Orthonormal Legendre basis P̂_0..P̂_{n-1} on [-1, 1] at x.
void legendre_basis(double x, int n, double* out) {
  double p0 = 1.0, p1 = x;
  out[0] = std::sqrt(0.5);
  if (n > 1) out[1] = std::sqrt(1.5) * x;
  for (int k = 2; k < n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
    out[k] = std::sqrt(k + 0.5) * p2;
  }
}

struct Axis {
  std::vector<double> edges;  // panel boundaries
  std::vector<double> nodes;
  std::vector<double> weights;
};

using Density = std::function<double(double)>;

// Panel edges equally spaced in the blended coordinate
// alpha·mean CDF(t) + (1 − alpha)·(t − lo)/(hi − lo); each density is
// normalized on its own, so panels follow every one of them.
Axis make_axis(const std::vector<Density>& densities, double lo, double hi, double alpha, int panels,
               const std::vector<double>& breaks) {
  constexpr int fine = 20000;
  std::vector<double> t(fine + 1), phi(fine + 1, 0.0);
  const double h = (hi - lo) / fine;
  for (int i = 0; i <= fine; ++i) t[i] = lo + i * h;
  for (const auto& density : densities) {
    std::vector<double> cdf(fine + 1, 0.0);
    double prev = density(t[0]);
    for (int i = 1; i <= fine; ++i) {
      const double cur = density(t[i]);
      cdf[i] = cdf[i - 1] + 0.5 * h * (prev + cur);
      prev = cur;
    }
    const double total = cdf.back() > 0.0 ? cdf.back() : 1.0;
    for (int i = 0; i <= fine; ++i) phi[i] += alpha * cdf[i] / (total * densities.size());
  }
  for (int i = 0; i <= fine; ++i) phi[i] += (1.0 - alpha) * i / double(fine);

  Axis ax;
  ax.edges.push_back(lo);
  int j = 0;
  for (int k = 1; k < panels; ++k) {
    const double target = double(k) / panels;
    while (j < fine && phi[j + 1] < target) ++j;
    const double span = phi[j + 1] - phi[j];
    const double f = span > 0.0 ? (target - phi[j]) / span : 0.0;
    ax.edges.push_back(t[j] + f * h);
  }
  ax.edges.push_back(hi);
  for (double b : breaks) {
    if (!(b > lo && b < hi)) continue;
    auto it = std::min_element(ax.edges.begin() + 1, ax.edges.end() - 1,
                               [b](double l, double r) { return std::abs(l - b) < std::abs(r - b); });
    if (it != ax.edges.end() - 1) *it = b;
  }
  std::sort(ax.edges.begin(), ax.edges.end());

  const Rule& rule = panel_rule();
  for (std::size_t p = 0; p + 1 < ax.edges.size(); ++p) {
    const double c = 0.5 * (ax.edges[p] + ax.edges[p + 1]);
    const double r = 0.5 * (ax.edges[p + 1] - ax.edges[p]);
    for (int q = 0; q < kPanelOrder; ++q) {
      ax.nodes.push_back(c + r * rule.x[q]);
      ax.weights.push_back(r * rule.w[q]);
    }
  }
  return ax;
}

// Galerkin block over the part of panel (x in [a2, b2]) x (y in [a1, b1])
// with y < x, in orthonormal Legendre coefficients, mapped back to the
// sqrt-weighted nodal representation.
Eigen::MatrixXd cut_block(const TwoPhotonState& state, double a2, double b2, double a1, double b1) {
  const Rule& g = cut_rule();
  const Rule& pr = panel_rule();
  const int n = kPanelOrder;
  Eigen::MatrixXd coeff = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> px(n), py(n);
  const double c2 = 0.5 * (a2 + b2), r2 = 0.5 * (b2 - a2);
  const double c1 = 0.5 * (a1 + b1), r1 = 0.5 * (b1 - a1);

  // Split x where the inner upper limit min(x, b1) changes form.
  std::vector<double> cuts{a2};
  if (a1 > a2 && a1 < b2) cuts.push_back(a1);
  if (b1 > a2 && b1 < b2) cuts.push_back(b1);
  cuts.push_back(b2);
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double xa = cuts[s], xb = cuts[s + 1];
    for (int i = 0; i < kCutOrder; ++i) {
      const double x = 0.5 * (xa + xb) + 0.5 * (xb - xa) * g.x[i];
      const double wx = 0.5 * (xb - xa) * g.w[i];
      const double top = std::min(x, b1);
      if (!(top > a1)) continue;
      legendre_basis((x - c2) / r2, n, px.data());
      for (int j = 0; j < kCutOrder; ++j) {
        const double y = 0.5 * (a1 + top) + 0.5 * (top - a1) * g.x[j];
        const double wy = 0.5 * (top - a1) * g.w[j];
        const double v = wx * wy * amplitude(state, x, y).real();
        legendre_basis((y - c1) / r1, n, py.data());
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) coeff(a, b) += v * px[a] * py[b];
      }
    }
  }
  coeff /= std::sqrt(r1 * r2);
  Eigen::MatrixXd u2(n, n), u1(n, n);
  for (int k = 0; k < n; ++k) {
    legendre_basis(pr.x[k], n, px.data());
    for (int a = 0; a < n; ++a) u2(k, a) = std::sqrt(pr.w[k]) * px[a];
  }
  u1 = u2;
  return u2 * coeff * u1.transpose();
}

// Tail model λ_n = c/((n + o)^2 + e) for n >= first.
struct TailLaw {
  double c, o, e;
  double at(double n) const { return c / ((n + o) * (n + o) + e); }
};

constexpr int kTailTerms = 2000;

double tail_mass(const TailLaw& law, int first) {
  double m = 0.0;
  for (int n = first; n < first + kTailTerms; ++n) m += law.at(n);
  return m + law.c / (first + kTailTerms - 0.5 + law.o);
}

double tail_entropy(const TailLaw& law, int first) {
  double s = 0.0;
  for (int n = first; n < first + kTailTerms; ++n) {
    const double lam = law.at(n);
    if (lam > 0.0) s -= lam * std::log2(lam);
  }
  const double y = first + kTailTerms - 0.5 + law.o;
  return s + law.c / std::numbers::ln2 * (2.0 * std::log(y) + 2.0 - std::log(law.c)) / y;
}

// Fits o and e so that the law reproduces the last trusted eigenvalue
// (mode number k) and the missing mass. Falls back to e = 0 with the
// offset from the mass alone if no bracket exists.
TailLaw fit_tail(double c, double lam_k, int k, double missing) {
  const double qk = c / lam_k;
  auto law_for = [&](double o) { return TailLaw{c, o, qk - (k + o) * (k + o)}; };
  double lo = -0.5 * k, hi = 5.0 * k + 50.0;
  auto f = [&](double o) { return tail_mass(law_for(o), k + 1) - missing; };
  if (f(lo) > 0.0 && f(hi) < 0.0) {
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return law_for(0.5 * (lo + hi));
  }
  // Σ_{n>k} c/(n + o)^2 = c·ψ1(k + 1 + o).
  double zlo = 1e-12, zhi = std::max(1.0, 4.0 * c / missing + k + 1.0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (zlo + zhi);
    (c * boost::math::trigamma(mid) > missing ? zlo : zhi) = mid;
  }
  return {c, 0.5 * (zlo + zhi) - (k + 1), 0.0};
}

struct Spectrum {
  std::vector<double> lam;  // squared singular values, nonincreasing
  double jump_c = 0.0;      // c in λ_n ~ c/n^2; zero for smooth kernels
  int grid_points = 0;
};

}  // namespace

double entropy_bits(const std::vector<double>& weights) {
  double s = 0.0;
  for (double w : weights)
    if (w > 0.0) s -= w * std::log2(w);
  return s;
}

SchmidtResult schmidt_analytic(const EntangledGaussian& state, int n_max) {
  validate(TwoPhotonState{state});
  if (n_max < 1) throw Error(Errc::invalid_config, "n_max must be at least 1");
  const double sp = state.omega_plus, sm = state.omega_minus;
  const double r = std::abs(sm - sp) / (sm + sp);
  const double y = r * r;
  SchmidtResult out;
  out.coefficients.resize(static_cast<std::size_t>(n_max) + 1);
  double u = 2.0 * std::sqrt(sp * sm) / (sp + sm);
  for (auto& c : out.coefficients) {
    c = u;
    u *= r;
  }
  out.entropy_bits = y > 0.0 ? -std::log2(1.0 - y) - y / (1.0 - y) * std::log2(y) : 0.0;
  out.truncation_error = std::pow(y, n_max + 1);
  return out;
}

double hermite_function(int n, double x) {
  double prev = 0.0;
  double cur = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  for (int k = 0; k < n; ++k) {
    const double next = std::sqrt(2.0 / (k + 1)) * x * cur - std::sqrt(double(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double entangled_mode(const EntangledGaussian& state, int n, int axis, double t) {
  const double kappa = std::sqrt(state.omega_plus * state.omega_minus / 2.0);
  const double x = axis == 2 ? t - state.mu : t;
  double v = std::sqrt(kappa) * hermite_function(n, kappa * x);
  if (axis == 1 && state.omega_minus < state.omega_plus && n % 2 == 1) v = -v;
  return v;
}

namespace {

Spectrum raw_spectrum(const TwoPhotonState& state, int grid_points) {
  validate(state);
  if (grid_points < kPanelOrder || grid_points % kPanelOrder != 0)
    throw Error(Errc::invalid_config, "grid points must be a positive multiple of 8");
  const int panels = grid_points / kPanelOrder;
  const Support sup = support(state);
  const Family fam = family_of(state);
  const bool gaussian = fam == Family::gaussian_product || fam == Family::entangled_gaussian;
  // Gaussians get uniform panels over a window trimmed to 1e-15 tail mass;
  // one-sided exponential shapes get panels graded by arrival-time mass.
  double t1_lo = sup.t1_lo, t1_hi = sup.t1_hi, t2_lo = sup.t2_lo, t2_hi = sup.t2_hi;
  if (gaussian) {
    const double trim = 8.0 / (9.0 * std::numbers::sqrt2);
    const double c1 = 0.5 * (t1_lo + t1_hi), h1 = 0.5 * (t1_hi - t1_lo) * trim;
    const double c2 = 0.5 * (t2_lo + t2_hi), h2 = 0.5 * (t2_hi - t2_lo) * trim;
    t1_lo = c1 - h1, t1_hi = c1 + h1, t2_lo = c2 - h2, t2_hi = c2 + h2;
  }
  const double alpha = gaussian ? 0.0 : 0.85;
  const Density first = [&](double t) { return time_densities(state, t).first; };
  const Density second = [&](double t) { return time_densities(state, t).second; };
  Axis ax1, ax2;
  if (sup.ordered) {
    // One axis for both photons keeps the t1 = t2 jump on diagonal blocks;
    // the high modes live along the jump, so its strength grades too.
    const Density jump = [&](double t) {
      const double d = diagonal_limit(state, t);
      return d * d;
    };
    std::vector<double> breaks = sup.t1_breaks;
    breaks.insert(breaks.end(), sup.t2_breaks.begin(), sup.t2_breaks.end());
    ax1 = make_axis({first, second, jump}, std::min(t1_lo, t2_lo), std::max(t1_hi, t2_hi), alpha, panels, breaks);
    ax2 = ax1;
  } else {
    ax2 = make_axis({second}, t2_lo, t2_hi, alpha, panels, sup.t2_breaks);
    ax1 = make_axis({first}, t1_lo, t1_hi, alpha, panels, sup.t1_breaks);
  }

  const int n = grid_points;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < panels; ++i) {
    for (int j = 0; j < panels; ++j) {
      const double a2 = ax2.edges[i], b2 = ax2.edges[i + 1];
      const double a1 = ax1.edges[j], b1 = ax1.edges[j + 1];
      const bool cut = sup.ordered && a1 < b2 && b1 > a2;
      if (cut) {
        m.block(i * kPanelOrder, j * kPanelOrder, kPanelOrder, kPanelOrder) = cut_block(state, a2, b2, a1, b1);
        continue;
      }
      for (int k = 0; k < kPanelOrder; ++k) {
        const int r = i * kPanelOrder + k;
        for (int l = 0; l < kPanelOrder; ++l) {
          const int c = j * kPanelOrder + l;
          m(r, c) = std::sqrt(ax2.weights[r] * ax1.weights[c]) * amplitude(state, ax2.nodes[r], ax1.nodes[c]).real();
        }
      }
    }
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& sv = svd.singularValues();
  std::vector<double> lam(static_cast<std::size_t>(sv.size()));
  for (Eigen::Index k = 0; k < sv.size(); ++k) lam[k] = sv[k] * sv[k];

  double jump = 0.0;
  if (sup.ordered) {
    const double lo = std::max(sup.t1_lo, sup.t2_lo);
    jump = quad::integrate([&](double t) { return std::abs(diagonal_limit(state, t)); }, lo, sup.t2_hi, {},
                           {1e-12, 1e-16, 2000})
               .value;
  }
  Spectrum out;
  out.lam = std::move(lam);
  out.jump_c = jump * jump / (std::numbers::pi * std::numbers::pi);
  out.grid_points = grid_points;
  return out;
}

SchmidtResult assemble(Spectrum spec, int trusted) {
  std::vector<double>& lam = spec.lam;
  SchmidtResult out;
  out.grid_points = spec.grid_points;
  if (spec.jump_c > 0.0) {
    // A jump across t1 = t2 makes λ_n decay like (J/π)^2/n^2; keep the
    // well-resolved leading modes and model the rest.
    trusted = std::clamp(trusted, 1, static_cast<int>(lam.size()));
    lam.resize(static_cast<std::size_t>(trusted));
    double kept = 0.0;
    for (double v : lam) kept += v;
    const double missing = 1.0 - kept;
    double tail = 0.0;
    if (missing > 0.0) tail = tail_entropy(fit_tail(spec.jump_c, lam.back(), trusted, missing), trusted + 1);
    out.truncation_error = std::max(0.0, missing);
    out.entropy_bits = entropy_bits(lam) + tail;
  } else {
    double total = 0.0;
    for (double v : lam) total += v;
    if (total > 1.0)
      for (double& v : lam) v /= total;
    while (lam.size() > 1 && lam.back() < 1e-30) lam.pop_back();
    out.truncation_error = std::max(0.0, 1.0 - std::min(total, 1.0));
    out.entropy_bits = entropy_bits(lam);
  }
  out.coefficients.reserve(lam.size());
  for (double v : lam) out.coefficients.push_back(std::sqrt(v));
  return out;
}

// Leading modes that agree to 1e-8 between two resolutions.
int agreeing_modes(const Spectrum& coarse, const Spectrum& fine) {
  const std::size_t n = std::min(coarse.lam.size(), fine.lam.size());
  std::size_t k = 0;
  while (k < n && std::abs(coarse.lam[k] - fine.lam[k]) <= 1e-8 * fine.lam[k]) ++k;
  return static_cast<int>(k);
}

}  // namespace

SchmidtResult schmidt_numeric_fixed(const TwoPhotonState& state, int grid_points) {
  return assemble(raw_spectrum(state, grid_points), grid_points / (2 * kPanelOrder));
}

SchmidtResult schmidt_numeric(const TwoPhotonState& state, const SchmidtOptions& opt) {
  Spectrum prev = raw_spectrum(state, opt.grid_points);
  double prev_entropy = assemble(prev, opt.grid_points / (2 * kPanelOrder)).entropy_bits;
  for (int pts = 2 * opt.grid_points; pts <= opt.max_grid_points; pts *= 2) {
    Spectrum cur = raw_spectrum(state, pts);
    const int trusted = std::clamp(agreeing_modes(prev, cur), pts / (2 * kPanelOrder), pts / 4);
    SchmidtResult res = assemble(cur, trusted);
    if (std::abs(res.entropy_bits - prev_entropy) <= opt.entropy_tol) return res;
    prev_entropy = res.entropy_bits;
    prev = std::move(cur);
  }
  throw Error(Errc::grid_too_coarse, "entropy still changing under grid doubling at " +
                                         std::to_string(opt.max_grid_points) + " points per axis");
}

}  // namespace tpa
