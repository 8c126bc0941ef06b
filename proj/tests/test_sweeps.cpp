#include <cmath>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "tpa/sweeps.hpp"

namespace tpa {
namespace {

SweepAxis lin(const std::string& name, double lo, double hi, int n) { return {name, lo, hi, n, false, {}}; }

TEST(Sweeps, AxisValues) {
  EXPECT_EQ(lin("x", 0.0, 1.0, 3).values(), (std::vector<double>{0.0, 0.5, 1.0}));
  const SweepAxis g{"r", 0.01, 100.0, 5, true, {}};
  const auto v = g.values();
  EXPECT_DOUBLE_EQ(v.front(), 0.01);
  EXPECT_NEAR(v[2], 1.0, 1e-14);
  EXPECT_DOUBLE_EQ(v.back(), 100.0);
  EXPECT_THROW(lin("x", 1.0, 0.0, 3).values(), Error);
  EXPECT_THROW(validate(SweepAxis{"r", -1.0, 1.0, 3, true, {}}), Error);
  EXPECT_THROW(validate(SweepAxis{"x", 0, 1, 3, false, {0.1, 0.2}}), Error);
}

TEST(Sweeps, RatioSweepHasDelayColumn) {
  const GridResult g = ratio_sweep(Target::gaussian_product, {0.5, 2.0});
  EXPECT_EQ(g.columns, (std::vector<std::string>{"p_max", "p_max_no_delay"}));
  for (const auto& c : g.cells) EXPECT_GE(c.values[0], c.values[1] - 1e-9);
  const GridResult r = ratio_sweep(Target::rising_exp, {0.5, 2.0});
  EXPECT_EQ(r.columns.size(), 1u);
}

TEST(Sweeps, SensitivityMapIsIndependentOfWorkerCount) {
  SensitivitySpec spec;
  spec.problem.atom = atom_from_ratio(1.0);
  spec.problem.target = Target::gaussian_product;
  spec.first = lin("omega1", 0.5, 1.5, 3);
  spec.second = lin("omega2", 1.5, 2.5, 3);
  const SensitivityMap one = sensitivity_map(spec);
  spec.jobs = 3;
  const SensitivityMap three = sensitivity_map(spec);
  ASSERT_EQ(one.grid.cells.size(), 9u);
  for (std::size_t k = 0; k < 9; ++k) {
    EXPECT_EQ(one.grid.cells[k].values, three.grid.cells[k].values);
    EXPECT_EQ(one.grid.cells[k].params, three.grid.cells[k].params);
  }
  EXPECT_EQ(one.grid.csv({}), three.grid.csv({}));
  for (const auto& c : one.grid.cells) EXPECT_LE(c.values[0], one.global.p_max + 1e-9);
}

TEST(Sweeps, FrozenDelayPolicyKeepsGlobalDelay) {
  SensitivitySpec spec;
  spec.problem.atom = atom_from_ratio(1.0);
  spec.problem.target = Target::entangled_gaussian;
  spec.first = lin("omega_plus", 0.6, 1.0, 2);
  spec.second = lin("omega_minus", 1.2, 1.6, 2);
  spec.policy = DelayPolicy::frozen;
  const SensitivityMap m = sensitivity_map(spec);
  for (const auto& c : m.grid.cells) EXPECT_EQ(c.params[2], m.global.params[2]);
}

TEST(Sweeps, SensitivityRejectsOtherFamilies) {
  SensitivitySpec spec;
  spec.problem.target = Target::coherent;
  spec.first = lin("a", 1, 2, 2);
  spec.second = lin("b", 1, 2, 2);
  EXPECT_THROW(sensitivity_map(spec), Error);
}

TEST(Sweeps, DetuningCentreMatchesResonantOptimum) {
  DetuningSpec spec;
  spec.problem.atom = atom_from_ratio(1.0);
  spec.problem.target = Target::gaussian_product;
  spec.delta1 = lin("delta1", -1.0, 1.0, 3);
  spec.delta2 = lin("delta2", -1.0, 1.0, 3);
  const DetuningMap m = detuning_map(spec);
  EXPECT_NEAR(m.grid.at(1, 1).values[0], m.resonant.p_max, 1e-6);
  for (const auto& c : m.grid.cells) EXPECT_LE(c.values[0], m.resonant.p_max + 1e-6);
  // Conjugation maps (Δ1, Δ2) to (−Δ1, −Δ2) for real pulse shapes.
  EXPECT_NEAR(m.grid.at(0, 0).values[0], m.grid.at(2, 2).values[0], 1e-5);
  EXPECT_NEAR(m.grid.at(0, 2).values[0], m.grid.at(2, 0).values[0], 1e-5);
}

TEST(Sweeps, GridSerialization) {
  GridResult g;
  g.axes = {lin("a", 0, 1, 2), lin("b", 0, 1, 2)};
  g.columns = {"p_max"};
  g.param_names = {"x"};
  g.cells = {{{0.1}, {1.0}, true, ""}, {{0.2}, {2.0}, true, ""}, {{0.3}, {3.0}, false, "bad"}, {{NAN}, {}, false, ""}};
  EXPECT_EQ(g.csv({{"k", "v"}}), "# k: v\na,b,p_max,x,converged\n0,0,0.1,1,1\n0,1,0.2,2,1\n1,0,0.3,3,0\n1,1,nan,,0\n");
  const nlohmann::json j = g.json({});
  EXPECT_EQ(j["values"]["p_max"][1][0], 0.3);
  EXPECT_TRUE(j["values"]["p_max"][1][1].is_null());
  EXPECT_EQ(j["cells"][2]["error"], "bad");
  EXPECT_NEAR(g.at(1, 0).values[0], 0.3, 0.0);
}

TEST(Sweeps, SymmetryDefect) {
  GridResult g;
  g.axes = {lin("a", 0, 1, 2), lin("b", 0, 1, 2)};
  g.columns = {"p"};
  g.cells = {{{1.0}, {}, true, ""}, {{0.5}, {}, true, ""}, {{0.5}, {}, true, ""}, {{0.2}, {}, true, ""}};
  EXPECT_EQ(symmetry_defect(g), 0.0);
  g.cells[1].values[0] = 0.7;
  EXPECT_NEAR(symmetry_defect(g), 0.4 / 4.0, 1e-15);
}

}  // namespace
}  // namespace tpa
