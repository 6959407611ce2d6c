#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "rcdamage/cost_model.hpp"
#include "support.hpp"

using namespace rcdamage;

namespace {

FragilityEntry column(bool zero_dispersion = false) {
  FragilityEntry e;
  e.component_id = "B1041.031a";
  e.q_min = 5.0;
  e.q_max = 20.0;
  const double z = zero_dispersion ? 0.0 : 1.0;
  e.records = {{DamageState::DS0, 0, 0, 0, CostDistribution::lognormal},
               {DamageState::DS1, 25704, 20910, 0.39 * z, CostDistribution::lognormal},
               {DamageState::DS2, 38978, 25986, 0.32 * z, CostDistribution::lognormal},
               {DamageState::DS3, 47978, 31986, 0.30 * z, CostDistribution::lognormal}};
  return e;
}

FragilityDatabase db_of(const FragilityEntry &e) { return {{e.component_id, e}}; }

std::vector<PerformanceGroup> case_groups() {
  PerformanceGroup g{"B1041.031a", 1.0, {}};
  g.component_states.insert(g.component_states.end(), 17, DamageState::DS1);
  g.component_states.insert(g.component_states.end(), 26, DamageState::DS2);
  g.component_states.insert(g.component_states.end(), 14, DamageState::DS3);
  return {g};
}

} // namespace

TEST(UnitCost, ConsequenceFunctionShape) {
  const auto e = column();
  EXPECT_EQ(unit_cost(e, DamageState::DS3, 1.0), 47978.0);
  EXPECT_EQ(unit_cost(e, DamageState::DS3, 5.0), 47978.0);
  EXPECT_DOUBLE_EQ(unit_cost(e, DamageState::DS3, 12.5), 39982.0);
  EXPECT_EQ(unit_cost(e, DamageState::DS3, 20.0), 31986.0);
  EXPECT_EQ(unit_cost(e, DamageState::DS3, 500.0), 31986.0);
  EXPECT_EQ(unit_cost(e, DamageState::DS0, 3.0), 0.0);
  EXPECT_THROW(unit_cost(e, DamageState::DS1, 0.0), input_error);
}

TEST(UnitCost, NonIncreasingInQuantity) {
  const auto e = column();
  for (auto ds : all_damage_states) {
    double prev = unit_cost(e, ds, 0.5);
    for (double q = 1.0; q < 30.0; q += 0.5) {
      const double c = unit_cost(e, ds, q);
      EXPECT_LE(c, prev);
      prev = c;
    }
  }
}

TEST(UnitCost, MissingStateIsDataError) {
  auto e = column();
  e.records.pop_back();
  EXPECT_THROW(unit_cost(e, DamageState::DS3, 1.0), data_error);
}

TEST(Fragility, ValidationMessagesAreLocated) {
  auto e = column();
  e.records[2].cost_at_max_qty = 50000;
  try {
    validate(e, "db");
    FAIL();
  } catch (const data_error &err) {
    EXPECT_NE(std::string(err.what()).find("db.damage_states[2]"), std::string::npos);
  }
  e = column();
  e.q_max = 1.0;
  EXPECT_THROW(validate(e, "db"), data_error);
  EXPECT_NO_THROW(validate(column(), "db"));
}

TEST(Sampling, LognormalMedianAndMean) {
  std::mt19937_64 rng(1);
  std::vector<double> xs(1000000);
  for (double &x : xs)
    x = sample_cost(1000.0, 0.4, CostDistribution::lognormal, rng);
  std::nth_element(xs.begin(), xs.begin() + 500000, xs.end());
  EXPECT_NEAR(xs[500000], 1000.0, 10.0);

  double sum = 0.0;
  for (int i = 0; i < 1000000; ++i)
    sum += sample_cost(1000.0, 0.4, CostDistribution::lognormal, rng, true);
  EXPECT_NEAR(sum / 1e6, 1000.0, 10.0);
}

TEST(Sampling, NormalIsNonNegativeWithCentralMean) {
  std::mt19937_64 rng(2);
  double sum = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double v = sample_cost(100.0, 0.2, CostDistribution::normal, rng);
    EXPECT_GE(v, 0.0);
    sum += v;
  }
  EXPECT_NEAR(sum / 200000, 100.0, 0.5);
  for (int i = 0; i < 1000; ++i)
    EXPECT_GE(sample_cost(100.0, 2.0, CostDistribution::normal, rng), 0.0);
}

TEST(Sampling, ZeroDispersionConsumesNoRandomness) {
  std::mt19937_64 a(3), b(3);
  EXPECT_EQ(sample_cost(42.0, 0.0, CostDistribution::lognormal, a), 42.0);
  EXPECT_EQ(a(), b());
  EXPECT_THROW(sample_cost(42.0, -0.1, CostDistribution::lognormal, a), input_error);
}

TEST(Simulation, ZeroDispersionCaseIsExact) {
  SimulationOptions opt;
  opt.realizations = 1000;
  const auto curve = simulate_total(case_groups(), db_of(column(true)), opt);
  ASSERT_EQ(curve.realizations.size(), 1000u);
  const double expect = 17 * 25704.0 + 26 * 38978.0 + 14 * 47978.0;
  EXPECT_EQ(expect, 2122088.0);
  for (double v : curve.realizations)
    EXPECT_EQ(v, expect);
  EXPECT_EQ(quantile(curve, 0.5), expect);
}

TEST(Simulation, MedianAgreesWithNaiveSampler) {
  SimulationOptions opt;
  opt.seed = 17;
  const auto curve = simulate_total(case_groups(), db_of(column()), opt);
  const double oracle = rcdamage::testing::naive_median_total(
      {{25704, 0.39, 17}, {38978, 0.32, 26}, {47978, 0.30, 14}}, 10000, 99);
  EXPECT_NEAR(quantile(curve, 0.5) / oracle, 1.0, 0.02);
  EXPECT_GT(quantile(curve, 0.9), quantile(curve, 0.1));
  EXPECT_TRUE(std::is_sorted(curve.realizations.begin(), curve.realizations.end()));
}

TEST(Simulation, SameSeedSameCurveAcrossThreadCounts) {
  SimulationOptions opt;
  opt.realizations = 2001;
  opt.seed = 5;
  const auto one = simulate_total(case_groups(), db_of(column()), opt);
  opt.threads = 3;
  const auto three = simulate_total(case_groups(), db_of(column()), opt);
  EXPECT_EQ(one.realizations, three.realizations);
  opt.seed = 6;
  EXPECT_NE(simulate_total(case_groups(), db_of(column()), opt).realizations, one.realizations);
}

TEST(Simulation, MoreSevereStatesCostMoreInDistribution) {
  auto groups = case_groups();
  auto worse = groups;
  for (auto &ds : worse[0].component_states)
    ds = DamageState::DS3;
  SimulationOptions opt;
  opt.realizations = 500;
  const auto a = simulate_total(groups, db_of(column()), opt);
  const auto b = simulate_total(worse, db_of(column()), opt);
  EXPECT_GT(quantile(b, 0.5), quantile(a, 0.5));
}

TEST(Simulation, CollapseReportsReplacementCost) {
  SimulationOptions opt;
  opt.realizations = 10;
  opt.replacement_cost = 12e6;
  const auto curve = simulate_total(case_groups(), db_of(column()), opt);
  EXPECT_TRUE(curve.collapsed);
  EXPECT_EQ(curve.realizations, std::vector<double>(10, 12e6));
}

TEST(Simulation, UnknownFragilityIdIsNamed) {
  auto groups = case_groups();
  groups[0].fragility_id = "B9999";
  try {
    simulate_total(groups, db_of(column()), {});
    FAIL();
  } catch (const data_error &e) {
    EXPECT_NE(std::string(e.what()).find("'B9999'"), std::string::npos);
  }
  SimulationOptions opt;
  opt.realizations = 0;
  EXPECT_THROW(simulate_total(case_groups(), db_of(column()), opt), input_error);
}

TEST(Quantile, LinearBetweenOrderStatistics) {
  LossCurve c;
  c.realizations = {1, 2, 3, 4, 5};
  EXPECT_EQ(quantile(c, 0.5), 3.0);
  EXPECT_EQ(quantile(c, 0.25), 2.0);
  EXPECT_DOUBLE_EQ(quantile(c, 0.1), 1.4);
  EXPECT_EQ(mean_cost(c), 3.0);
  EXPECT_THROW(quantile(c, 0.0), input_error);
  EXPECT_THROW(quantile(c, 1.0), input_error);
  EXPECT_THROW(quantile(LossCurve{}, 0.5), input_error);
}

TEST(Quantile, FittedLognormalRecoversParameters) {
  SimulationOptions opt;
  opt.realizations = 20000;
  PerformanceGroup one{"B1041.031a", 1.0, {DamageState::DS3}};
  const auto curve = simulate_total({one}, db_of(column()), opt);
  ASSERT_TRUE(curve.fitted_median && curve.fitted_dispersion);
  EXPECT_NEAR(*curve.fitted_median / 47978.0, 1.0, 0.01);
  EXPECT_NEAR(*curve.fitted_dispersion, 0.30, 0.01);
}

TEST(Counting, StatesAcrossGroups) {
  const auto g = case_groups();
  EXPECT_EQ(count_state(g, DamageState::DS1), 17u);
  EXPECT_EQ(count_state(g, DamageState::DS2), 26u);
  EXPECT_EQ(count_state(g, DamageState::DS3), 14u);
  EXPECT_EQ(count_state(g, DamageState::DS0), 0u);
}
