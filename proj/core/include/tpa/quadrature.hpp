#pragma once

// Adaptive 21-point Gauss-Kronrod quadrature for real or complex integrands.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

namespace tpa::quad {

struct Options {
  double rel_tol = 1e-9;
  double abs_tol = 1e-14;
  int max_intervals = 10000;
};

template <class T>
struct Result {
  T value{};
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 11> xgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> wgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> wg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <class T>
struct Piece {
  double a, b;
  T value;
  double error;
};

// One GK21 application with the QUADPACK error heuristic.
template <class T, class F>
Piece<T> gk21(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::array<T, 21> fv;
  fv[20] = f(c);
  for (int j = 0; j < 10; ++j) {
    const double dx = h * xgk[j];
    fv[2 * j] = f(c - dx);
    fv[2 * j + 1] = f(c + dx);
  }
  T resk = wgk[10] * fv[20];
  T resg{};
  double resabs = wgk[10] * std::abs(fv[20]);
  for (int j = 0; j < 10; ++j) {
    const T s = fv[2 * j] + fv[2 * j + 1];
    resk += wgk[j] * s;
    resabs += wgk[j] * (std::abs(fv[2 * j]) + std::abs(fv[2 * j + 1]));
    if (j % 2 == 1) resg += wg[j / 2] * s;
  }
  const T mean = 0.5 * resk;
  double resasc = wgk[10] * std::abs(fv[20] - mean);
  for (int j = 0; j < 10; ++j)
    resasc += wgk[j] * (std::abs(fv[2 * j] - mean) + std::abs(fv[2 * j + 1] - mean));
  resk *= h;
  resg *= h;
  resabs *= std::abs(h);
  resasc *= std::abs(h);
  double err = std::abs(resk - resg);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > 2.2250738585072014e-308 / (50.0 * 2.22e-16))
    err = std::max(50.0 * 2.22e-16 * resabs, err);
  return {a, b, resk, err};
}

}  // namespace detail

// Integrates f over [a, b]. Points in `breaks` strictly inside (a, b) start as
// interval boundaries. Does not throw; callers inspect `converged`.
template <class F>
auto integrate(F&& f, double a, double b, std::span<const double> breaks = {},
               const Options& opt = {}) -> Result<decltype(f(a))> {
  using T = decltype(f(a));
  Result<T> out;
  if (!(b > a)) {
    out.converged = true;
    return out;
  }
  std::vector<double> edges{a};
  for (double x : breaks)
    if (x > a && x < b) edges.push_back(x);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<detail::Piece<T>> heap;
  heap.reserve(64);
  const auto by_error = [](const auto& l, const auto& r) { return l.error < r.error; };
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) heap.push_back(detail::gk21<T>(f, edges[k], edges[k + 1]));
  std::make_heap(heap.begin(), heap.end(), by_error);

  const auto totals = [&] {
    T v{};
    double e = 0.0;
    for (const auto& p : heap) {
      v += p.value;
      e += p.error;
    }
    return std::pair{v, e};
  };
  auto [value, error] = totals();
  while (error > std::max(opt.abs_tol, opt.rel_tol * std::abs(value)) &&
         static_cast<int>(heap.size()) < opt.max_intervals) {
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const auto worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), by_error);
      break;
    }
    const auto left = detail::gk21<T>(f, worst.a, mid);
    const auto right = detail::gk21<T>(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
    // Running sums drift; resynchronize occasionally.
    if (heap.size() % 64 == 0) std::tie(value, error) = totals();
  }
  std::tie(value, error) = totals();
  out.value = value;
  out.error = error;
  out.intervals = static_cast<int>(heap.size());
  out.converged = error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(value));
  return out;
}

}  // namespace tpa::quad
