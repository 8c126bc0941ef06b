#include <cmath>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "tpa/optimize.hpp"

namespace tpa {
namespace {

OptimizationProblem problem(Target t, double ratio) {
  OptimizationProblem p;
  p.atom = atom_from_ratio(ratio);
  p.target = t;
  return p;
}

TEST(Optimize, NamesAndBounds) {
  EXPECT_EQ(parameter_names(Target::entangled_gaussian), (std::vector<std::string>{"omega_plus", "omega_minus", "mu"}));
  EXPECT_EQ(parameter_names(Target::rising_exp).size(), 2u);
  EXPECT_FALSE(delay_index(Target::rising_exp));
  EXPECT_EQ(*delay_index(Target::decaying_exp), 2u);
  EXPECT_EQ(parse_target("coherent"), Target::coherent);
  EXPECT_THROW(parse_target("optimal"), Error);
  const auto b = parameter_bounds(Target::gaussian_product, atom_from_ratio(0.5));
  EXPECT_TRUE(b[0].log_scale);
  EXPECT_FALSE(b[2].log_scale);
  EXPECT_DOUBLE_EQ(b[2].hi, 100.0);
}

TEST(Optimize, RisingNumericMatchesClosedForm) {
  for (double r : {0.3, 1.0, 3.0}) {
    const OptimizationResult res = optimize_pulse(problem(Target::rising_exp, r));
    const RisingOptimum ref = pf_max_rising(atom_from_ratio(r));
    EXPECT_NEAR(res.p_max, ref.p_max, 1e-6) << r;
    EXPECT_NEAR(res.params[0], ref.omega1, 1e-3 * ref.omega1);
    EXPECT_NEAR(res.params[1], ref.omega2, 1e-3 * ref.omega2);
  }
}

TEST(Optimize, FreeDelayNeverLoses) {
  for (Target t : {Target::gaussian_product, Target::entangled_gaussian, Target::decaying_exp}) {
    OptimizationProblem p = problem(t, 0.5);
    const double free = optimize_pulse(p).p_max;
    p.delay_free = false;
    const OptimizationResult fixed = optimize_pulse(p);
    EXPECT_EQ(fixed.params[2], 0.0);
    EXPECT_GE(free, fixed.p_max - 1e-9) << target_name(t);
  }
}

TEST(Optimize, FrozenParametersStayPut) {
  OptimizationProblem p = problem(Target::gaussian_product, 1.0);
  p.frozen = {0.9, std::nullopt, std::nullopt};
  const OptimizationResult r = optimize_pulse(p);
  EXPECT_EQ(r.params[0], 0.9);
  EXPECT_GT(r.p_max, 0.5);
  p.frozen = {0.9};
  EXPECT_THROW(optimize_pulse(p), Error);
}

TEST(Optimize, ResultIsReproducible) {
  OptimizationProblem p = problem(Target::entangled_gaussian, 2.0);
  p.seed = 77;
  const OptimizationResult a = optimize_pulse(p), b = optimize_pulse(p);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.p_max, b.p_max);
  EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(Optimize, JitterSeedStillFindsTheOptimum) {
  OptimizationProblem p = problem(Target::gaussian_product, 1.0);
  const double base = optimize_pulse(p).p_max;
  p.seed = 12345;
  EXPECT_NEAR(optimize_pulse(p).p_max, base, 1e-6);
}

TEST(Optimize, ReportsEveryStart) {
  const OptimizationResult r = optimize_pulse(problem(Target::gaussian_product, 1.0));
  EXPECT_EQ(r.starts.size(), 8u);
  // Starts within the tie tolerance are resolved by parameter order.
  for (const auto& s : r.starts) EXPECT_LE(s.p_max, r.p_max + 1e-9);
  EXPECT_TRUE(r.converged);
}

TEST(Optimize, NormalizedColumns) {
  const Atom a = atom_from_ratio(2.0);
  const auto n = normalized_parameters(Target::entangled_gaussian, a, {1.0, 10.0, 0.25});
  ASSERT_EQ(n.size(), 3u);
  EXPECT_DOUBLE_EQ(n[0].second, 1.0);
  EXPECT_DOUBLE_EQ(n[1].second, 2.0);
  EXPECT_DOUBLE_EQ(n[2].second, 0.5);
}

TEST(Optimize, ProblemJsonRoundTrip) {
  OptimizationProblem p = problem(Target::coherent, 0.25);
  p.delay_free = false;
  p.frozen = {std::nullopt, 2.0, std::nullopt};
  p.seed = 9;
  p.n1 = 0.5;
  const nlohmann::json j = p;
  const OptimizationProblem back = j.get<OptimizationProblem>();
  EXPECT_EQ(nlohmann::json(back), j);
}

TEST(Optimize, AsymptoticRowsCarryEntropy) {
  const auto rows = asymptotic_checks(Target::entangled_gaussian, {0.5, 5.0});
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.error.empty());
    ASSERT_TRUE(r.entropy_bits);
    EXPECT_GT(*r.entropy_bits, 0.0);
  }
  EXPECT_GT(*rows[1].entropy_bits, *rows[0].entropy_bits);
  const std::string csv = asymptotic_csv(rows, {});
  EXPECT_NE(csv.find("omega_plus/gamma_f"), std::string::npos);
}

}  // namespace
}  // namespace tpa
