#include "phev/lp_solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "phev/errors.hpp"
#include "phev/routing.hpp"
#include "support/instances.hpp"

namespace phev {
namespace {

using Terms = std::vector<std::pair<std::size_t, double>>;

TEST(SolveLp, BoundAttaining) {
  LinearProgram lp;
  lp.add_variable(0.0, 1.0, 1.0);
  const SolveResult r = solve_lp(lp);
  ASSERT_EQ(r.status, SolveStatus::Optimal);
  EXPECT_EQ(r.objective, 0.0);
  EXPECT_EQ(r.values[0], 0.0);

  LinearProgram upper;
  upper.add_variable(-2.0, 3.0, -1.0);
  EXPECT_EQ(solve_lp(upper).values[0], 3.0);
}

TEST(SolveLp, SmallMixedSenses) {
  // min -x - 2y  s.t. x + y <= 4, x - y >= -2, x + 3y = 6, 0 <= x,y <= 5
  // On x + 3y = 6 the objective is y - 6 and x + y <= 4 forces y >= 1.
  LinearProgram lp;
  lp.add_variable(0, 5, -1);
  lp.add_variable(0, 5, -2);
  lp.add_constraint(Terms{{0, 1}, {1, 1}}, RowSense::LessEqual, 4);
  lp.add_constraint(Terms{{0, 1}, {1, -1}}, RowSense::GreaterEqual, -2);
  lp.add_constraint(Terms{{0, 1}, {1, 3}}, RowSense::Equal, 6);
  const SolveResult r = solve_lp(lp);
  ASSERT_EQ(r.status, SolveStatus::Optimal);
  EXPECT_NEAR(r.objective, -5.0, 1e-9);
  EXPECT_NEAR(r.values[0], 3.0, 1e-9);
  EXPECT_NEAR(r.values[1], 1.0, 1e-9);
}

TEST(SolveLp, Infeasible) {
  LinearProgram lp;
  lp.add_variable(0, 1, 1);
  lp.add_variable(0, 1, 1);
  lp.add_constraint(Terms{{0, 1}, {1, 1}}, RowSense::GreaterEqual, 3);
  EXPECT_EQ(solve_lp(lp).status, SolveStatus::Infeasible);
}

TEST(SolveLp, RejectsInfiniteBounds) {
  LinearProgram lp;
  lp.add_variable(0, std::numeric_limits<double>::infinity(), 1);
  EXPECT_THROW(solve_lp(lp), InvalidInput);
  LinearProgram crossed;
  crossed.add_variable(1, 0, 1);
  EXPECT_THROW(solve_lp(crossed), InvalidInput);
}

TEST(SolveLp, TriangleMinCostFlow) {
  const NetworkGraph g({{1, 2, 1, 30, TrafficMode::Medium},
                        {2, 3, 1, 30, TrafficMode::Medium},
                        {1, 3, 3, 30, TrafficMode::Medium}});
  VehicleEnergyParams p;
  p.table.set(TrafficMode::Medium, {1.0, 1.0});
  p.c_gas = 1.0;  // cost equals length
  const SolveResult r = solve_lp(build_cs_flow_lp(g, p, 1, 3));
  ASSERT_EQ(r.status, SolveStatus::Optimal);
  EXPECT_NEAR(r.objective, 2.0, 1e-12);
  for (double v : r.values) EXPECT_NEAR(v, std::round(v), 1e-9);
  EXPECT_EQ(*extract_flow_path(g, r.values, 1, 3), Path({1, 2, 3}));
}

TEST(SolveLp, DisconnectedFlowIsInfeasible) {
  const NetworkGraph g({{1, 2, 1, 30, TrafficMode::Low}, {3, 4, 1, 30, TrafficMode::Low}});
  EXPECT_EQ(solve_lp(build_cs_flow_lp(g, {}, 1, 4)).status, SolveStatus::Infeasible);
}

TEST(SolveLp, IterationLimit) {
  const NetworkGraph g({{1, 2, 1, 30, TrafficMode::Low},
                        {2, 3, 1, 30, TrafficMode::Low},
                        {1, 3, 5, 30, TrafficMode::Low}});
  SolverOptions opts;
  opts.max_iterations = 1;
  EXPECT_EQ(solve_lp(build_cs_flow_lp(g, {}, 1, 3), opts).status, SolveStatus::IterationLimit);
}

TEST(SolveLp, DegenerateProblemTerminatesUnderBland) {
  // Many redundant constraints through the optimum make every pivot degenerate.
  LinearProgram lp;
  const std::size_t n = 6;
  for (std::size_t j = 0; j < n; ++j) lp.add_variable(0, 1, -1.0 - 0.01 * static_cast<double>(j));
  for (std::size_t i = 0; i < 40; ++i) {
    Terms t;
    for (std::size_t j = 0; j < n; ++j) t.emplace_back(j, 1.0 + static_cast<double>((i * j) % 3));
    lp.add_constraint(t, RowSense::LessEqual, 0.0);
  }
  SolverOptions opts;
  opts.degenerate_pivots_before_bland = 0;
  const SolveResult r = solve_lp(lp, opts);
  ASSERT_EQ(r.status, SolveStatus::Optimal);
  EXPECT_NEAR(r.objective, 0.0, 1e-12);
}

// Random flow LPs: 0/1 bounds, unit supply -> integral vertex.
TEST(SolveLpProperty, FlowLpsAreIntegralAndFeasible) {
  std::mt19937_64 rng(8080);
  for (int trial = 0; trial < 150; ++trial) {
    const auto inst = testing::random_instance(rng, 10, 30);
    const LinearProgram lp = build_cs_flow_lp(inst.graph, inst.params, inst.origin, inst.dest);
    const SolveResult r = solve_lp(lp);
    ASSERT_EQ(r.status, SolveStatus::Optimal);
    EXPECT_LE(lp.max_violation(r.values), 1e-7);
    for (double v : r.values) EXPECT_LT(std::min(std::abs(v), std::abs(v - 1.0)), 1e-6);
    // Cheapest all-gas path by enumeration.
    double best = std::numeric_limits<double>::infinity();
    for (const Path& p : testing::all_simple_paths(inst.graph, inst.origin, inst.dest)) {
      double c = 0.0;
      for (std::size_t k : inst.graph.path_links(p)) {
        c += link_mode_costs(inst.graph.links()[k], inst.params).cs_cost;
      }
      best = std::min(best, c);
    }
    EXPECT_NEAR(r.objective, best, 1e-9);
  }
}

// Random bounded LPs checked for feasibility and against the MILP engine's
// view of the same polytope (continuous only, so they must agree).
TEST(SolveLpProperty, RandomBoundedLpsAreFeasibleAndVertexOptimal) {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  std::uniform_int_distribution<int> sense(0, 2);
  for (int trial = 0; trial < 200; ++trial) {
    LinearProgram lp;
    const std::size_t n = 2 + trial % 6;
    const std::size_t m = 1 + trial % 5;
    std::vector<double> feasible(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double lo = std::floor(coef(rng));
      const double hi = lo + 1.0 + std::floor(std::abs(coef(rng)));
      lp.add_variable(lo, hi, coef(rng));
      feasible[j] = std::uniform_real_distribution<double>(lo, hi)(rng);
    }
    for (std::size_t i = 0; i < m; ++i) {
      Terms t;
      double activity = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double a = coef(rng);
        t.emplace_back(j, a);
        activity += a * feasible[j];
      }
      const int s = sense(rng);
      if (s == 0) lp.add_constraint(t, RowSense::LessEqual, activity + 0.5);
      if (s == 1) lp.add_constraint(t, RowSense::GreaterEqual, activity - 0.5);
      if (s == 2) lp.add_constraint(t, RowSense::Equal, activity);
    }
    const SolveResult r = solve_lp(lp);
    ASSERT_EQ(r.status, SolveStatus::Optimal) << "trial " << trial;
    EXPECT_LE(lp.max_violation(r.values), 1e-7);
    EXPECT_LE(r.objective, lp.objective_value(feasible) + 1e-9);
  }
}

TEST(SolveMilp, RootIntegral) {
  MilpProblem p;
  p.lp.add_variable(0, 1, 1);
  p.integer_vars = {0};
  const SolveResult r = solve_milp(p);
  ASSERT_EQ(r.status, SolveStatus::Optimal);
  EXPECT_EQ(r.nodes, 1u);
  EXPECT_EQ(r.objective, 0.0);
}

TEST(SolveMilp, TwoBinaryKnapsack) {
  MilpProblem p;
  p.lp.add_variable(0, 1, -1);
  p.lp.add_variable(0, 1, -1);
  p.lp.add_constraint(Terms{{0, 1}, {1, 1}}, RowSense::LessEqual, 1);
  p.integer_vars = {0, 1};
  const SolveResult r = solve_milp(p);
  ASSERT_EQ(r.status, SolveStatus::Optimal);
  EXPECT_NEAR(r.objective, -1.0, 1e-12);
}

TEST(SolveMilp, BranchingNeeded) {
  // max x + y  s.t. 2x + 2y <= 3 over binaries: LP gives 1.5, MILP 1.
  MilpProblem p;
  p.lp.add_variable(0, 1, -1);
  p.lp.add_variable(0, 1, -1);
  p.lp.add_constraint(Terms{{0, 2}, {1, 2}}, RowSense::LessEqual, 3);
  p.integer_vars = {0, 1};
  const SolveResult r = solve_milp(p);
  ASSERT_EQ(r.status, SolveStatus::Optimal);
  EXPECT_NEAR(r.objective, -1.0, 1e-12);
  EXPECT_GT(r.nodes, 1u);
}

TEST(SolveMilp, InfeasibleAndNodeLimit) {
  MilpProblem infeasible;
  infeasible.lp.add_variable(0, 1, 1);
  infeasible.lp.add_constraint(Terms{{0, 2}}, RowSense::Equal, 1);
  infeasible.integer_vars = {0};
  EXPECT_EQ(solve_milp(infeasible).status, SolveStatus::Infeasible);

  MilpProblem hard;
  for (int j = 0; j < 8; ++j) hard.lp.add_variable(0, 1, -1);
  Terms t;
  for (std::size_t j = 0; j < 8; ++j) t.emplace_back(j, 2.0);
  hard.lp.add_constraint(t, RowSense::LessEqual, 7);
  for (std::size_t j = 0; j < 8; ++j) hard.integer_vars.push_back(j);
  SolverOptions opts;
  opts.max_nodes = 2;
  const SolveResult r = solve_milp(hard, opts);
  EXPECT_EQ(r.status, SolveStatus::NodeLimit);
  EXPECT_TRUE(r.values.empty());
}

double enumerate_binary_optimum(const MilpProblem& p, std::size_t num_binaries) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> x(p.lp.num_variables());
  for (std::uint32_t mask = 0; mask < (1u << num_binaries); ++mask) {
    for (std::size_t j = 0; j < num_binaries; ++j) x[j] = (mask >> j) & 1u;
    if (p.lp.max_violation(x) <= 1e-9) best = std::min(best, p.lp.objective_value(x));
  }
  return best;
}

TEST(SolveMilpProperty, MatchesEnumerationOnRandomBinaryPrograms) {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> coef(-10.0, 10.0);
  std::uniform_real_distribution<double> weight(0.0, 10.0);
  int feasible = 0;
  for (int trial = 0; trial < 120; ++trial) {
    MilpProblem p;
    const std::size_t n = 2 + static_cast<std::size_t>(trial) % 14;  // up to 15
    for (std::size_t j = 0; j < n; ++j) {
      p.lp.add_variable(0, 1, coef(rng));
      p.integer_vars.push_back(j);
    }
    const std::size_t rows = 1 + static_cast<std::size_t>(trial) % 4;
    for (std::size_t i = 0; i < rows; ++i) {
      Terms t;
      double total = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double w = (i % 2 == 0) ? weight(rng) : coef(rng);
        t.emplace_back(j, w);
        total += std::abs(w);
      }
      if (i % 2 == 0) {
        p.lp.add_constraint(t, RowSense::LessEqual, 0.4 * total);
      } else {
        p.lp.add_constraint(t, RowSense::GreaterEqual, -0.3 * total);
      }
    }
    const double expected = enumerate_binary_optimum(p, n);
    const SolveResult r = solve_milp(p);
    if (std::isinf(expected)) {
      EXPECT_EQ(r.status, SolveStatus::Infeasible);
      continue;
    }
    ++feasible;
    ASSERT_EQ(r.status, SolveStatus::Optimal) << "trial " << trial;
    EXPECT_NEAR(r.objective, expected, 1e-7) << "trial " << trial;
    EXPECT_LE(p.lp.max_violation(r.values), 1e-7);
    for (std::size_t j : p.integer_vars) {
      EXPECT_NEAR(r.values[j], std::round(r.values[j]), 1e-6);
    }
  }
  EXPECT_GT(feasible, 100);
}

TEST(SolveMilpProperty, MixedProgramsMatchEnumerationOverIntegerPart) {
  // Binaries gate continuous variables: y_j <= u_j x_j.
  std::mt19937_64 rng(161803);
  std::uniform_real_distribution<double> coef(-4.0, 4.0);
  std::uniform_real_distribution<double> pos(0.5, 4.0);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial) % 7;
    MilpProblem p;
    for (std::size_t j = 0; j < n; ++j) {
      p.lp.add_variable(0, 1, pos(rng));  // fixed charge
      p.integer_vars.push_back(j);
    }
    for (std::size_t j = 0; j < n; ++j) p.lp.add_variable(0, 3, -pos(rng));
    for (std::size_t j = 0; j < n; ++j) {
      p.lp.add_constraint(Terms{{n + j, 1.0}, {j, -3.0}}, RowSense::LessEqual, 0.0);
    }
    Terms cap;
    for (std::size_t j = 0; j < n; ++j) cap.emplace_back(n + j, pos(rng));
    p.lp.add_constraint(cap, RowSense::LessEqual, 4.0);

    double expected = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      LinearProgram fixed = p.lp;
      for (std::size_t j = 0; j < n; ++j) {
        const double v = (mask >> j) & 1u;
        fixed.set_bounds(j, v, v);
      }
      const SolveResult r = solve_lp(fixed);
      if (r.status == SolveStatus::Optimal) expected = std::min(expected, r.objective);
    }
    const SolveResult r = solve_milp(p);
    ASSERT_EQ(r.status, SolveStatus::Optimal);
    EXPECT_NEAR(r.objective, expected, 1e-7) << "trial " << trial;
  }
}

TEST(WriteLpText, ContainsSections) {
  MilpProblem p;
  p.lp.add_variable(0, 1, 2.5, "x_1_2");
  p.lp.add_variable(0, 1, -1, "z_1_2");
  p.lp.add_constraint(Terms{{0, 1}, {1, -1}}, RowSense::GreaterEqual, 0);
  p.integer_vars = {0};
  std::ostringstream os;
  write_lp_text(os, p.lp, p.integer_vars);
  const std::string text = os.str();
  EXPECT_NE(text.find("minimize\n  obj: 2.5 x_1_2 - 1 z_1_2"), std::string::npos);
  EXPECT_NE(text.find("r0: 1 x_1_2 - 1 z_1_2 >= 0"), std::string::npos);
  EXPECT_NE(text.find("integer\n  x_1_2"), std::string::npos);
  EXPECT_NE(text.find("end\n"), std::string::npos);
}

}  // namespace
}  // namespace phev
