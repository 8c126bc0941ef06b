#include "tpa/faddeeva.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace tpa {
namespace {

// Weideman's rational expansion (SIAM J. Numer. Anal. 31, 1994) with N terms,
// valid in the closed upper half plane.
constexpr int kTerms = 40;

struct Expansion {
  double scale;
  std::array<double, kTerms> coeff;  // coeff[j] multiplies Z^j
};

Expansion build_expansion() {
  constexpr int m = 2 * kTerms;
  constexpr int n_fft = 2 * m;
  Expansion e{};
  e.scale = std::sqrt(kTerms / std::numbers::sqrt2);
  const double l = e.scale;
  // Samples f(theta_k), k = -m+1 .. m-1, preceded by a zero, then fftshift.
  std::array<double, n_fft> f{};
  for (int k = -m + 1; k <= m - 1; ++k) {
    const double t = l * std::tan(0.5 * k * std::numbers::pi / m);
    f[k + m] = std::exp(-t * t) * (l * l + t * t);
  }
  std::array<double, n_fft> shifted{};
  for (int i = 0; i < n_fft; ++i) shifted[i] = f[(i + n_fft / 2) % n_fft];
  for (int j = 1; j <= kTerms; ++j) {
    double re = 0.0;
    for (int i = 0; i < n_fft; ++i) re += shifted[i] * std::cos(2.0 * std::numbers::pi * j * i / n_fft);
    e.coeff[j - 1] = re / n_fft;
  }
  return e;
}

const Expansion& expansion() {
  static const Expansion e = build_expansion();
  return e;
}

std::complex<double> faddeeva_upper(std::complex<double> z) {
  const auto& e = expansion();
  const std::complex<double> iz{-z.imag(), z.real()};
  const std::complex<double> den = e.scale - iz;
  const std::complex<double> zz = (e.scale + iz) / den;
  std::complex<double> p = e.coeff[kTerms - 1];
  for (int j = kTerms - 2; j >= 0; --j) p = p * zz + e.coeff[j];
  return 2.0 * p / (den * den) + (1.0 / std::sqrt(std::numbers::pi)) / den;
}

}  // namespace

std::complex<double> faddeeva(std::complex<double> z) {
  if (z.imag() >= 0.0) return faddeeva_upper(z);
  return 2.0 * std::exp(-z * z) - faddeeva_upper(-z);
}

std::complex<double> erfc(std::complex<double> z) {
  // erfc(z) = exp(-z^2) w(iz); use the reflection when Re z < 0.
  if (z.real() >= 0.0) return std::exp(-z * z) * faddeeva_upper({-z.imag(), z.real()});
  return 2.0 - std::exp(-z * z) * faddeeva_upper({z.imag(), -z.real()});
}

std::complex<double> gaussian_tail_integral(double p, std::complex<double> q,
                                            std::complex<double> r, double u) {
  const double sp = std::sqrt(p);
  const std::complex<double> z = q / (2.0 * sp) - sp * u;
  const double half_norm = 0.5 * std::sqrt(std::numbers::pi / p);
  // erfc(z) exp(q^2/4p + r) = w(iz) exp(r + qu - pu^2).
  const std::complex<double> at_end = r + q * u - p * u * u;
  if (z.real() >= 0.0) return half_norm * std::exp(at_end) * faddeeva_upper({-z.imag(), z.real()});
  const std::complex<double> peak = r + q * q / (4.0 * p);
  return half_norm * (2.0 * std::exp(peak) - std::exp(at_end) * faddeeva_upper({z.imag(), -z.real()}));
}

}  // namespace tpa
