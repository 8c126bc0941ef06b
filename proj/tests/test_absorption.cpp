#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "support.hpp"
#include "tpa/absorption.hpp"
#include "tpa/optimal.hpp"

namespace tpa {
namespace {

TEST(Absorption, MatchesIndependentQuadrature) {
  for (const auto& o : testing::kPfOracles) {
    EXPECT_NEAR(pf_at(o.atom, o.state, o.t), o.p, 1e-8) << family_name(family_of(o.state));
    EXPECT_NEAR(pf_at(o.atom, o.state, o.t, std::nullopt, PfOptions{}), o.p, 1e-8);
  }
}

TEST(Absorption, OptimalStateExcitesPerfectly) {
  for (double r : {0.2, 1.0, 5.0}) {
    const Atom a = atom_from_ratio(r);
    const OptimalState s{a, 0.7, std::nullopt};
    EXPECT_NEAR(pf_at(a, s, 0.7), 1.0, 1e-9) << r;
    EXPECT_NEAR(pf_inner_product(a, s, 0.7), 1.0, 1e-12);
    EXPECT_NEAR(pf_at_compact(a, s, 0.7), 1.0, 1e-9);
  }
}

TEST(Absorption, TruncatedOptimalStateReachesTheBound) {
  const Atom a{0.6, 1.0, 0.0, 0.0};
  const OptimalState s{a, 0.0, -2.0};
  const Peak p = pf_max_over_t(a, s, -2.0);
  EXPECT_NEAR(p.p_max, pmax_bound(a, 2.0), 1e-7);
  EXPECT_NEAR(p.t_at_max, 0.0, 1e-3);
}

TEST(Absorption, InnerProductEqualsForwardIntegration) {
  testing::Rng rng(99);
  for (int k = 0; k < 12; ++k) {
    const Atom a = testing::random_atom(rng);
    const TwoPhotonState s = testing::random_state(rng, k);
    const double t = testing::uniform(rng, -0.5, 3.0);
    EXPECT_NEAR(pf_inner_product(a, s, t), pf_at(a, s, t), 1e-8);
  }
}

TEST(Absorption, FastPathMatchesReferencePath) {
  testing::Rng rng(3);
  for (int k = 0; k < 10; ++k) {
    const Atom a = testing::random_atom(rng, k % 2 == 1);
    const TwoPhotonState s = testing::random_state(rng, k % 2);
    const double t = testing::uniform(rng, 0.0, 3.0);
    EXPECT_NEAR(pf_at(a, s, t, std::nullopt, PfOptions{}), pf_at(a, s, t), 1e-9);
  }
}

TEST(Absorption, ExponentialClosedFormsMatchQuadrature) {
  testing::Rng rng(17);
  for (int k = 0; k < 20; ++k) {
    const Atom a = testing::random_atom(rng);
    const TwoPhotonState s = testing::random_state(rng, 2 + k % 2);
    const double t = testing::uniform(rng, -1.0, 4.0);
    double closed;
    if (const auto* r = std::get_if<RisingExpProduct>(&s))
      closed = pf_rising_closed_form(a, r->omega1, r->omega2, t);
    else {
      const auto& d = std::get<DecayingExpProduct>(s);
      closed = pf_decaying_closed_form(a, d.omega1, d.omega2, d.t_shift, t);
    }
    EXPECT_NEAR(closed, pf_at(a, s, t), 1e-8);
  }
}

TEST(Absorption, DecayingClosedFormAtEqualRates) {
  // Ω1 = Γe and Ω2 = Γf take the limit branches.
  const Atom a{1.3, 1.0, 0.0, 0.0};
  for (double t : {0.2, 1.0, 3.0})
    EXPECT_NEAR(pf_decaying_closed_form(a, 1.3, 1.0, 0.0, t), pf_at(a, DecayingExpProduct{1.3, 1.0, 0.0}, t), 1e-9);
}

TEST(Absorption, RisingOptimumAtEqualRates) {
  const Atom a = atom_from_ratio(1.0);
  const RisingOptimum r = pf_max_rising(a);
  EXPECT_NEAR(r.omega1, 0.5, 1e-9);
  EXPECT_NEAR(r.omega2, 1.5, 1e-9);
  EXPECT_NEAR(r.p_max, 128.0 / 216.0, 1e-12);
  EXPECT_NEAR(pf_rising_closed_form(a, 0.5, 1.5, 0.0), 128.0 / 216.0, 1e-12);
}

TEST(Absorption, ProbabilitiesStayInUnitInterval) {
  testing::Rng rng(8);
  for (int k = 0; k < 8; ++k) {
    const Atom a = testing::random_atom(rng, true);
    const TwoPhotonState s = testing::random_state(rng, k);
    const auto [lo, hi] = scan_window(a, s);
    std::vector<double> ts;
    for (int i = 0; i <= 60; ++i) ts.push_back(lo + (hi - lo) * i / 60.0);
    for (double p : excitation_curve(a, s, ts).probabilities) {
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
    }
  }
}

TEST(Absorption, CurvePeakAgreesWithMaximizer) {
  const Atom a = atom_from_ratio(1.0);
  const GaussianProduct s{1.1147, 1.9558, 1.1910};
  std::vector<double> ts;
  for (int i = 0; i <= 400; ++i) ts.push_back(-2.0 + 8.0 * i / 400.0);
  const ExcitationCurve c = excitation_curve(a, s, ts);
  const Peak p = pf_max_over_t(a, s);
  EXPECT_GE(p.p_max, c.p_max - 1e-12);
  EXPECT_NEAR(p.p_max, c.p_max, 1e-4);
}

TEST(Absorption, ResidenceTimeOfOptimalState) {
  for (double r : {0.3, 1.0, 3.0}) {
    const Atom a = atom_from_ratio(r);
    EXPECT_NEAR(residence_time(a, OptimalState{a, 0.0, std::nullopt}), 2.0, 1e-6) << r;
  }
}

// An entangled Gaussian that stays in |f> longer than the optimal state.
// Reference from an independent ODE integration of the amplitude.
TEST(Absorption, ResidenceTimeCanExceedTheOptimalState) {
  const Atom a{0.5871746105635716, 1.0, 0.0, 0.0};
  const EntangledGaussian s{0.4721390269902621, 2.3985633681246727, 1.575985253484908};
  EXPECT_NEAR(residence_time(a, s), 2.018641691371521, 1e-6);
}

TEST(Absorption, RejectsInvalidInput) {
  const Atom a = atom_from_ratio(1.0);
  EXPECT_THROW(pf_at(a, GaussianProduct{1, 1, 0}, -1.0, 0.0), Error);
  EXPECT_THROW(pf_at(Atom{0.0, 1.0, 0, 0}, GaussianProduct{1, 1, 0}, 0.0), Error);
  try {
    pf_inner_product(Atom{1.0, 1.0, 0.5, 0.0}, GaussianProduct{1, 1, 0}, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_resonant);
  }
}

TEST(Absorption, WritesCurveCsv) {
  const auto path = std::filesystem::temp_directory_path() / "tpa_curve_test.csv";
  write_curve_csv(path.string(), {{0.0, 1.0}, {0.25, 0.5}, 0.0, 0.25}, {"unit test"});
  std::ifstream f(path);
  std::string all((std::istreambuf_iterator<char>(f)), {});
  EXPECT_EQ(all, "# note: unit test\nt*gamma_f,P_f\n0,0.25\n1,0.5\n");
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace tpa
