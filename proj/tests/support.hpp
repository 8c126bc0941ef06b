#pragma once

// Frozen reference values and random draws shared by the test programs.
//
// The P_f, bound and Faddeeva values were computed offline with SciPy
// (nested adaptive `quad` in double precision, tolerances near 1e-13, and
// `special.wofz`), independently of this library's code paths. The Schmidt
// entropies come from the Bessel-zero spectrum of the ordered exponential
// kernel, summed with the McMahon asymptotic tail.

#include <cmath>
#include <complex>
#include <random>

#include "tpa/model.hpp"
#include "tpa/states.hpp"

namespace tpa::testing {

struct PfOracle {
  TwoPhotonState state;
  Atom atom;
  double t;
  double p;
};

inline const PfOracle kPfOracles[] = {
    {GaussianProduct{1.1147, 1.9558, 1.1910}, {1.0, 1.0, 0.0, 0.0}, 2.0, 0.5555242735865129},
    {GaussianProduct{0.65, 1.65, 2.17}, {0.5, 1.0, 0.0, 0.0}, 3.0, 0.60651281767434},
    {GaussianProduct{1.3, 2.1, 0.4}, {2.0, 1.0, 0.7, -0.3}, 1.0, 0.3428003585251536},
    {EntangledGaussian{0.7882, 1.383, 1.618}, {0.5, 1.0, 0.0, 0.0}, 2.5, 0.5387944020582152},
    {EntangledGaussian{1.027, 10.41, 0.199}, {5.0, 1.0, 0.0, 0.0}, 1.0, 0.62557111569091},
    {EntangledGaussian{1.027, 10.41, 0.199}, {5.0, 1.0, 1.0, -1.0}, 1.0, 0.6142111095771629},
    {DecayingExpProduct{0.8, 1.2, 0.5}, {1.0, 1.0, 0.0, 0.0}, 2.0, 0.18808980887138108},
};

// Largest reachable probability within a horizon, by direct double quadrature
// of the squared kernel over t0 < t1 < t2 < t*.
struct BoundOracle {
  double gamma_e;
  double horizon;
  double p;
};
inline const BoundOracle kBoundOracles[] = {
    {1.0, 1.0, 0.26424111765711533},
    {0.3, 2.5, 0.36036992406593554},
    {2.0, 0.7, 0.2534263563587874},
    {1.0, 6.0, 0.9826487347633356},
};

struct FaddeevaOracle {
  std::complex<double> z, w;
};
inline const FaddeevaOracle kFaddeevaOracles[] = {
    {{0.5, 0.3}, {0.6148515391469911, 0.303124349647351}},
    {{3.0, -2.0}, {-0.08133907992862746, 0.12108616246299858}},
    {{-1.2, 4.0}, {0.12696962901175704, -0.03614208733299817}},
    {{10.0, 0.1}, {0.00057281236496107, 0.056699577028635366}},
    {{0.01, -0.01}, {1.0112822670450456, 0.01148529605481061}},
    {{-5.0, -0.5}, {-0.011900325512477234, -0.11397271859768758}},
};

// Entanglement entropy (bits) of the perfectly exciting state versus Γe/Γf.
struct EntropyOracle {
  double ratio;
  double bits;
};
inline const EntropyOracle kOptimalEntropy[] = {
    {0.01, 0.058617270866791395}, {0.1, 0.4036619656863744}, {0.5, 1.2808853887532219},
    {1.0, 1.9210109690955137},    {5.0, 3.872627613047463},
};
// Needs a 3200-point grid; kept for manual runs with a raised grid limit.
inline constexpr EntropyOracle kOptimalEntropyRatio100{100.0, 8.092115521995614};

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
inline double log_uniform(Rng& rng, double a, double b) { return std::exp(uniform(rng, std::log(a), std::log(b))); }

inline Atom random_atom(Rng& rng, bool detuned = false) {
  Atom a{log_uniform(rng, 0.2, 5.0), 1.0, 0.0, 0.0};
  if (detuned) {
    a.delta1 = uniform(rng, -1.5, 1.5);
    a.delta2 = uniform(rng, -1.5, 1.5);
  }
  return a;
}

// One pulse-shaped state; `family` cycles through the four parametric ones.
inline TwoPhotonState random_state(Rng& rng, int family) {
  const double w1 = log_uniform(rng, 0.3, 3.0), w2 = log_uniform(rng, 0.3, 3.0);
  switch (family % 4) {
    case 0:
      return GaussianProduct{w1, w2, uniform(rng, -1.0, 2.0)};
    case 1:
      return EntangledGaussian{w1, w2, uniform(rng, -1.0, 2.0)};
    case 2:
      return RisingExpProduct{w1, w2};
    default:
      return DecayingExpProduct{w1, w2, uniform(rng, -0.5, 1.0)};
  }
}

}  // namespace tpa::testing
