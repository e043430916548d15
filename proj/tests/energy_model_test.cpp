#include "phev/energy_model.hpp"

#include <gtest/gtest.h>

#include <random>

#include "phev/errors.hpp"
#include "support/instances.hpp"

namespace phev {
namespace {

constexpr double kTol = 1e-5;

NetworkGraph two_links(TrafficMode first, TrafficMode second, double length = 20.0) {
  return NetworkGraph({{1, 2, length, 30, first}, {2, 3, length, 30, second}});
}

TEST(DriveCycleTable, DefaultsAndValidation) {
  DriveCycleTable t;
  EXPECT_EQ(t[TrafficMode::Low].mu_cd, 5.7);
  EXPECT_EQ(t[TrafficMode::Low].mu_cs, 58.6);
  EXPECT_EQ(t[TrafficMode::Medium].mu_cd, 6.2);
  EXPECT_EQ(t[TrafficMode::Medium].mu_cs, 69.4);
  EXPECT_EQ(t[TrafficMode::High].mu_cd, 4.2);
  EXPECT_EQ(t[TrafficMode::High].mu_cs, 45.7);
  EXPECT_THROW(t.set(TrafficMode::Low, {0.0, 10.0}), InvalidInput);
  EXPECT_THROW(t.set(TrafficMode::Low, {1.0, -1.0}), InvalidInput);

  VehicleEnergyParams p;
  EXPECT_EQ(p.c_gas, 2.75);
  EXPECT_EQ(p.c_ele, 0.114);
  EXPECT_EQ(p.e_init, 5.57);
  p.e_init = -1;
  EXPECT_THROW(p.validate(), InvalidInput);
}

TEST(LinkModeCosts, MediumTenMiles) {
  const Link link{1, 2, 10, 30, TrafficMode::Medium};
  const LinkModeCosts c = link_mode_costs(link, {});
  EXPECT_NEAR(c.cs_cost, 0.39625, kTol);
  EXPECT_NEAR(c.cd_cost, 0.18387, kTol);
  EXPECT_NEAR(c.cd_energy, 1.61290, kTol);

  VehicleEnergyParams free;
  free.c_gas = 0;
  free.c_ele = 0;
  const LinkModeCosts z = link_mode_costs(link, free);
  EXPECT_EQ(z.cs_cost, 0.0);
  EXPECT_EQ(z.cd_cost, 0.0);
}

TEST(LinkModeCosts, ChargeDepletingCheaperPerMileForEveryMode) {
  const VehicleEnergyParams p;
  const double cd_per_mile[] = {0.0200, 0.01839, 0.02714};
  const double cs_per_mile[] = {0.04693, 0.03963, 0.06018};
  for (int m = 0; m < 3; ++m) {
    const LinkModeCosts c = link_mode_costs({1, 2, 1.0, 30, static_cast<TrafficMode>(m)}, p);
    EXPECT_NEAR(c.cd_cost, cd_per_mile[m], 1e-5);
    EXPECT_NEAR(c.cs_cost, cs_per_mile[m], 1e-5);
    EXPECT_LT(c.cd_cost, c.cs_cost);
  }
}

TEST(SavingsPerKwh, Defaults) {
  const VehicleEnergyParams p;
  EXPECT_NEAR(savings_per_kwh(TrafficMode::Low, p), 0.15349, kTol);
  EXPECT_NEAR(savings_per_kwh(TrafficMode::Medium, p), 0.13168, kTol);
  EXPECT_NEAR(savings_per_kwh(TrafficMode::High, p), 0.13874, kTol);
}

TEST(CdfPathCost, TwoMediumLinksMixedCase) {
  const NetworkGraph g = two_links(TrafficMode::Medium, TrafficMode::Medium);
  const CdfPathCost c = cdf_path_cost(Path{{1, 2, 3}}, g, {});
  EXPECT_NEAR(c.total_cost, 0.85157, kTol);
  ASSERT_EQ(c.links.size(), 2u);
  EXPECT_NEAR(c.links[0].elec_cost, 0.36774, kTol);
  EXPECT_EQ(c.links[0].gas_cost, 0.0);
  EXPECT_NEAR(c.links[1].elec_cost, 0.26724, kTol);
  EXPECT_NEAR(c.links[1].gas_cost, 0.21659, kTol);
  EXPECT_EQ(c.links[1].battery_after, 0.0);
  EXPECT_NEAR(c.links[1].cd_energy_used, 5.57 - 20 / 6.2, 1e-12);
}

TEST(CdfPathCost, EmptyBatteryIsPureGas) {
  std::mt19937_64 rng(11);
  VehicleEnergyParams p;
  p.e_init = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto [g, path] = testing::random_chain(rng);
    double gas = 0.0;
    for (std::size_t k : g.path_links(path)) {
      gas += p.c_gas * g.links()[k].length_mi / p.table[g.links()[k].mode].mu_cs;
    }
    EXPECT_NEAR(cdf_path_cost(path, g, p).total_cost, gas, 1e-12);
  }
}

TEST(CdfPathCost, SingleLinkAllElectric) {
  const NetworkGraph g({{1, 2, 10, 30, TrafficMode::Medium}});
  VehicleEnergyParams p;
  p.e_init = 10;
  const CdfPathCost c = cdf_path_cost(Path{{1, 2}}, g, p);
  EXPECT_NEAR(c.total_cost, 0.18387, kTol);
  EXPECT_NEAR(c.links[0].battery_after, 8.38710, kTol);
}

TEST(SplitPathCost, ExtremesAndValidation) {
  const NetworkGraph g = two_links(TrafficMode::Medium, TrafficMode::Low);
  const Path path{{1, 2, 3}};
  const VehicleEnergyParams p;
  const LinkModeCosts a = link_mode_costs(g.link(1, 2), p);
  const LinkModeCosts b = link_mode_costs(g.link(2, 3), p);

  const std::vector<double> none{0.0, 0.0};
  EXPECT_NEAR(split_path_cost(path, none, g, p).cost, a.cs_cost + b.cs_cost, 1e-12);
  EXPECT_EQ(split_path_cost(path, none, g, p).cd_energy, 0.0);

  const std::vector<double> all{1.0, 1.0};
  EXPECT_NEAR(split_path_cost(path, all, g, p).cost, a.cd_cost + b.cd_cost, 1e-12);
  EXPECT_NEAR(split_path_cost(path, all, g, p).cd_energy, a.cd_energy + b.cd_energy, 1e-12);

  const std::vector<double> knapsack{0.0, 3.0 / (20.0 / 5.7)};
  EXPECT_NEAR(split_path_cost(path, knapsack, g, p).cost, 1.27060, kTol);

  const std::vector<double> bad{0.0, 1.5};
  EXPECT_THROW(split_path_cost(path, bad, g, p), InvalidInput);
  const std::vector<double> negative{-0.1, 0.0};
  EXPECT_THROW(split_path_cost(path, negative, g, p), InvalidInput);
  const std::vector<double> short_y{0.5};
  EXPECT_THROW(split_path_cost(path, short_y, g, p), InvalidInput);
}

TEST(OptimalPtAllocation, BatteryGoesToLowLink) {
  const NetworkGraph g = two_links(TrafficMode::Medium, TrafficMode::Low);
  const Path path{{1, 2, 3}};
  VehicleEnergyParams p;
  p.e_init = 3;
  const auto y = optimal_pt_allocation(path, g, p);
  ASSERT_EQ(y.size(), 2u);
  EXPECT_EQ(y[0], 0.0);
  EXPECT_NEAR(y[1], 3.0 / (20.0 / 5.7), 1e-12);
  const double optimal = split_path_cost(path, y, g, p).cost;
  const double cdf = cdf_path_cost(path, g, p).total_cost;
  EXPECT_NEAR(optimal, 1.27060, kTol);
  EXPECT_NEAR(cdf, 1.33604, kTol);
  EXPECT_NEAR((cdf - optimal) / cdf * 100.0, 4.90, 0.01);
}

TEST(OptimalPtAllocation, AmpleBatteryRunsAllElectric) {
  std::mt19937_64 rng(3);
  VehicleEnergyParams p;
  p.e_init = 1e6;
  const auto [g, path] = testing::random_chain(rng);
  for (double y : optimal_pt_allocation(path, g, p)) EXPECT_EQ(y, 1.0);
}

TEST(OptimalPtAllocation, SkipsLinksWithoutSavings) {
  const NetworkGraph g = two_links(TrafficMode::Medium, TrafficMode::Low);
  VehicleEnergyParams p;
  p.c_ele = 10.0;  // electricity dearer than gas everywhere
  for (double y : optimal_pt_allocation(Path{{1, 2, 3}}, g, p)) EXPECT_EQ(y, 0.0);
}

TEST(OptimalPtAllocation, TiesGoToEarlierLink) {
  const NetworkGraph g = two_links(TrafficMode::High, TrafficMode::High, 10.0);
  VehicleEnergyParams p;
  p.e_init = 1.0;
  const auto y = optimal_pt_allocation(Path{{1, 2, 3}}, g, p);
  EXPECT_NEAR(y[0], 1.0 / (10.0 / 4.2), 1e-12);
  EXPECT_EQ(y[1], 0.0);
}

TEST(OptimalPtAllocationProperty, MatchesFixedPathLpAndBeatsCdf) {
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> battery(0.0, 12.0);
  for (int trial = 0; trial < 300; ++trial) {
    const auto [g, path] = testing::random_chain(rng);
    VehicleEnergyParams p;
    p.e_init = trial % 10 == 0 ? 0.0 : battery(rng);
    const auto y = optimal_pt_allocation(path, g, p);
    const SplitCost optimal = split_path_cost(path, y, g, p);
    EXPECT_LE(optimal.cd_energy, p.e_init + 1e-9);
    EXPECT_NEAR(optimal.cost, testing::fixed_path_lp_optimum(g, path, p), 1e-9);

    // CDF is one feasible allocation of the same budget.
    const auto cdf_y = cdf_allocation(path, g, p);
    const double cdf = cdf_path_cost(path, g, p).total_cost;
    EXPECT_NEAR(split_path_cost(path, cdf_y, g, p).cost, cdf, 1e-9);
    EXPECT_LE(optimal.cost, cdf + 1e-9);
  }
}

TEST(OptimalPtAllocationProperty, SingleModePathMatchesCdf) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> length(1.0, 30.0);
  std::uniform_real_distribution<double> battery(0.0, 15.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto mode = static_cast<TrafficMode>(trial % 3);
    std::vector<Link> links;
    Path path{{1}};
    const int k = 1 + trial % 7;
    for (NodeId i = 1; i <= k; ++i) {
      links.push_back({i, i + 1, length(rng), 30, mode});
      path.nodes.push_back(i + 1);
    }
    const NetworkGraph g(std::move(links));
    VehicleEnergyParams p;
    p.e_init = battery(rng);
    const auto y = optimal_pt_allocation(path, g, p);
    EXPECT_NEAR(split_path_cost(path, y, g, p).cost, cdf_path_cost(path, g, p).total_cost, 1e-9);
  }
}

TEST(OptimalPtAllocationProperty, CostNonIncreasingInBattery) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto [g, path] = testing::random_chain(rng);
    VehicleEnergyParams p;
    double previous_opt = std::numeric_limits<double>::infinity();
    double previous_cdf = std::numeric_limits<double>::infinity();
    for (double e = 0.0; e <= 20.0; e += 0.5) {
      p.e_init = e;
      const double opt = split_path_cost(path, optimal_pt_allocation(path, g, p), g, p).cost;
      const double cdf = cdf_path_cost(path, g, p).total_cost;
      EXPECT_LE(opt, previous_opt + 1e-12);
      EXPECT_LE(cdf, previous_cdf + 1e-12);
      previous_opt = opt;
      previous_cdf = cdf;
    }
  }
}

TEST(BatteryTrajectory, ClampsAtZero) {
  const NetworkGraph g = two_links(TrafficMode::Medium, TrafficMode::Medium);
  const VehicleEnergyParams p;
  const auto y = cdf_allocation(Path{{1, 2, 3}}, g, p);
  const auto t = battery_trajectory(Path{{1, 2, 3}}, y, g, p);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0], 5.57);
  EXPECT_NEAR(t[1], 5.57 - 20 / 6.2, 1e-12);
  EXPECT_NEAR(t[2], 0.0, 1e-12);
  EXPECT_GE(t[2], 0.0);
}

}  // namespace
}  // namespace phev
