#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace phev {

enum class RowSense { LessEqual, Equal, GreaterEqual };

// min c'x  s.t.  rows (<=, =, >=),  lo <= x <= hi  with finite bounds.
// Rows are stored dense.
class LinearProgram {
 public:
  std::size_t add_variable(double lo, double hi, double cost, std::string name = {});
  // Terms are (variable index, coefficient); repeated indices accumulate.
  std::size_t add_constraint(std::span<const std::pair<std::size_t, double>> terms,
                             RowSense sense, double rhs);

  std::size_t num_variables() const { return cost_.size(); }
  std::size_t num_constraints() const { return rows_.size(); }

  const std::vector<double>& cost() const { return cost_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<double>& row(std::size_t i) const { return rows_[i]; }
  RowSense sense(std::size_t i) const { return senses_[i]; }
  double rhs(std::size_t i) const { return rhs_[i]; }

  void set_bounds(std::size_t j, double lo, double hi);

  // Throws InvalidInput on infinite/NaN bounds, lo > hi or non-finite data.
  void validate() const;

  double objective_value(std::span<const double> x) const;
  // Largest violation over rows and bounds.
  double max_violation(std::span<const double> x) const;

 private:
  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> rows_;
  std::vector<RowSense> senses_;
  std::vector<double> rhs_;
};

struct MilpProblem {
  LinearProgram lp;
  std::vector<std::size_t> integer_vars;
};

enum class SolveStatus { Optimal, Infeasible, IterationLimit, NodeLimit };

std::string_view to_string(SolveStatus status);

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> values;
  double objective = 0.0;
  std::size_t iterations = 0;  // simplex pivots and bound flips, summed over nodes
  std::size_t nodes = 0;       // branch-and-bound LPs solved
};

struct SolverOptions {
  double feasibility_tol = 1e-7;
  double integrality_tol = 1e-6;
  double prune_tol = 1e-9;
  std::size_t max_iterations = 1'000'000;
  std::size_t max_nodes = 1'000'000;
  std::size_t degenerate_pivots_before_bland = 1000;
};

// Two-phase bounded-variable primal simplex; returns a basic optimal solution.
SolveResult solve_lp(const LinearProgram& lp, const SolverOptions& options = {});

// Best-first branch and bound over LP relaxations, branching on the most
// fractional integer variable. NodeLimit is reported instead of a
// possibly suboptimal incumbent.
SolveResult solve_milp(const MilpProblem& problem, const SolverOptions& options = {});

// Plain-text tableau dump for debugging.
void write_lp_text(std::ostream& os, const LinearProgram& lp,
                   std::span<const std::size_t> integer_vars = {});

}  // namespace phev
