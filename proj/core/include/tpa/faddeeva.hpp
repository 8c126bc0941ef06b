#pragma once

#include <complex>

namespace tpa {

// Faddeeva function w(z) = exp(-z^2) erfc(-iz). Relative accuracy ~1e-13.
std::complex<double> faddeeva(std::complex<double> z);

// erfc for complex argument, routed through faddeeva().
std::complex<double> erfc(std::complex<double> z);

// Integral of exp(-p s^2 + q s + r) over (-inf, u], p > 0. Exponents are
// combined before exponentiation so large |q|, |r| do not overflow.
std::complex<double> gaussian_tail_integral(double p, std::complex<double> q,
                                            std::complex<double> r, double u);

}  // namespace tpa
