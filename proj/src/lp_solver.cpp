#include "phev/lp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <queue>

#include "phev/errors.hpp"

namespace phev {

std::size_t LinearProgram::add_variable(double lo, double hi, double cost, std::string name) {
  lower_.push_back(lo);
  upper_.push_back(hi);
  cost_.push_back(cost);
  if (name.empty()) name = "x" + std::to_string(cost_.size() - 1);
  names_.push_back(std::move(name));
  for (auto& r : rows_) r.push_back(0.0);
  return cost_.size() - 1;
}

std::size_t LinearProgram::add_constraint(std::span<const std::pair<std::size_t, double>> terms,
                                          RowSense sense, double rhs) {
  std::vector<double> dense(num_variables(), 0.0);
  for (const auto& [j, a] : terms) {
    if (j >= dense.size()) throw InvalidInput("constraint references unknown variable");
    dense[j] += a;
  }
  rows_.push_back(std::move(dense));
  senses_.push_back(sense);
  rhs_.push_back(rhs);
  return rows_.size() - 1;
}

void LinearProgram::set_bounds(std::size_t j, double lo, double hi) {
  lower_.at(j) = lo;
  upper_.at(j) = hi;
}

void LinearProgram::validate() const {
  for (std::size_t j = 0; j < num_variables(); ++j) {
    if (!std::isfinite(lower_[j]) || !std::isfinite(upper_[j]) || !std::isfinite(cost_[j])) {
      throw InvalidInput("variable " + names_[j] + " needs finite bounds and cost");
    }
    if (lower_[j] > upper_[j]) throw InvalidInput("variable " + names_[j] + " has lo > hi");
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (!std::isfinite(rhs_[i])) throw InvalidInput("non-finite right-hand side");
    for (double a : rows_[i]) {
      if (!std::isfinite(a)) throw InvalidInput("non-finite constraint coefficient");
    }
  }
}

double LinearProgram::objective_value(std::span<const double> x) const {
  double total = 0.0;
  for (std::size_t j = 0; j < cost_.size(); ++j) total += cost_[j] * x[j];
  return total;
}

double LinearProgram::max_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < num_variables(); ++j) {
    worst = std::max({worst, lower_[j] - x[j], x[j] - upper_[j]});
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    double activity = 0.0;
    for (std::size_t j = 0; j < num_variables(); ++j) activity += rows_[i][j] * x[j];
    switch (senses_[i]) {
      case RowSense::LessEqual:
        worst = std::max(worst, activity - rhs_[i]);
        break;
      case RowSense::GreaterEqual:
        worst = std::max(worst, rhs_[i] - activity);
        break;
      case RowSense::Equal:
        worst = std::max(worst, std::abs(activity - rhs_[i]));
        break;
    }
  }
  return worst;
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::Infeasible:
      return "infeasible";
    case SolveStatus::IterationLimit:
      return "iteration_limit";
    case SolveStatus::NodeLimit:
      return "node_limit";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kTieTol = 1e-12;

// Dense tableau simplex over [structural | slack | artificial] columns.
// Every row i reads  a_i x + s_i = b_i  (s_i >= 0 for <=, s_i <= 0 via a -1
// coefficient for >=, s_i fixed at 0 for =) plus an artificial column used
// only to find a first feasible basis.
class BoundedSimplex {
 public:
  BoundedSimplex(const LinearProgram& lp, const SolverOptions& options)
      : options_(options),
        m_(lp.num_constraints()),
        n_(lp.num_variables()),
        total_(n_ + 2 * m_),
        a_(m_, std::vector<double>(total_, 0.0)),
        b_(m_),
        lo_(total_, 0.0),
        hi_(total_, 0.0),
        x_(total_, 0.0),
        at_upper_(total_, false),
        basic_row_(total_, -1),
        basis_(m_) {
    for (std::size_t j = 0; j < n_; ++j) {
      lo_[j] = lp.lower()[j];
      hi_[j] = lp.upper()[j];
      x_[j] = lo_[j];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      std::copy(lp.row(i).begin(), lp.row(i).end(), a_[i].begin());
      b_[i] = lp.rhs(i);
      const std::size_t s = n_ + i;
      switch (lp.sense(i)) {
        case RowSense::LessEqual:
          a_[i][s] = 1.0;
          hi_[s] = kInf;
          break;
        case RowSense::GreaterEqual:
          a_[i][s] = -1.0;
          hi_[s] = kInf;
          break;
        case RowSense::Equal:
          a_[i][s] = 1.0;
          break;
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      double residual = b_[i];
      for (std::size_t j = 0; j < n_; ++j) residual -= a_[i][j] * x_[j];
      const std::size_t art = n_ + m_ + i;
      a_[i][art] = residual >= 0.0 ? 1.0 : -1.0;
      hi_[art] = kInf;
      x_[art] = std::abs(residual);
      basis_[i] = art;
      basic_row_[art] = static_cast<int>(i);
    }
    tableau_ = a_;
    for (std::size_t i = 0; i < m_; ++i) {
      const double sign = a_[i][n_ + m_ + i];
      if (sign < 0.0) {
        for (double& v : tableau_[i]) v = -v;
      }
    }
    cost_.assign(total_, 0.0);
    structural_cost_ = lp.cost();
  }

  SolveResult solve() {
    SolveResult result;

    for (std::size_t i = 0; i < m_; ++i) cost_[n_ + m_ + i] = 1.0;
    compute_reduced_costs();
    if (!run(/*allow_artificial=*/true)) return limit_result();
    refresh_basic_values();

    double infeasibility = 0.0;
    for (std::size_t i = 0; i < m_; ++i) infeasibility += x_[n_ + m_ + i];
    if (infeasibility > options_.feasibility_tol) {
      result.status = SolveStatus::Infeasible;
      result.iterations = iterations_;
      return result;
    }

    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t art = n_ + m_ + i;
      hi_[art] = 0.0;
      if (basic_row_[art] < 0) {
        x_[art] = 0.0;
        at_upper_[art] = false;
      }
    }
    drive_out_artificials();
    refresh_basic_values();

    std::fill(cost_.begin(), cost_.end(), 0.0);
    std::copy(structural_cost_.begin(), structural_cost_.end(), cost_.begin());
    compute_reduced_costs();
    degenerate_run_ = 0;
    if (!run(/*allow_artificial=*/false)) return limit_result();
    refresh_basic_values();

    result.status = SolveStatus::Optimal;
    result.values.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
    for (std::size_t j = 0; j < n_; ++j) {
      result.values[j] = std::clamp(result.values[j], lo_[j], hi_[j]);
    }
    result.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) result.objective += structural_cost_[j] * result.values[j];
    result.iterations = iterations_;
    return result;
  }

 private:
  SolveResult limit_result() const {
    SolveResult r;
    r.status = SolveStatus::IterationLimit;
    r.iterations = iterations_;
    return r;
  }

  bool is_artificial(std::size_t j) const { return j >= n_ + m_; }

  void compute_reduced_costs() {
    d_ = cost_;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = cost_[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < total_; ++j) d_[j] -= cb * tableau_[i][j];
    }
  }

  struct Entering {
    std::size_t column = 0;
    double direction = 0.0;  // +1 increase from lower, -1 decrease from upper
  };

  std::optional<Entering> choose_entering(bool allow_artificial) const {
    const bool bland = degenerate_run_ >= options_.degenerate_pivots_before_bland;
    std::optional<Entering> best;
    double best_score = 0.0;
    for (std::size_t j = 0; j < total_; ++j) {
      if (basic_row_[j] >= 0 || lo_[j] == hi_[j]) continue;
      if (!allow_artificial && is_artificial(j)) continue;
      double direction = 0.0;
      if (!at_upper_[j] && d_[j] < -kCostTol) direction = 1.0;
      if (at_upper_[j] && d_[j] > kCostTol) direction = -1.0;
      if (direction == 0.0) continue;
      if (bland) return Entering{j, direction};
      if (std::abs(d_[j]) > best_score) {
        best_score = std::abs(d_[j]);
        best = Entering{j, direction};
      }
    }
    return best;
  }

  // Returns false when the iteration limit is hit.
  bool run(bool allow_artificial) {
    while (true) {
      const auto entering = choose_entering(allow_artificial);
      if (!entering) return true;
      if (iterations_ >= options_.max_iterations) return false;
      ++iterations_;
      step(*entering);
    }
  }

  void step(const Entering& e) {
    const std::size_t q = e.column;
    const bool bland = degenerate_run_ >= options_.degenerate_pivots_before_bland;

    double best = hi_[q] - lo_[q];  // bound flip
    int leave_row = -1;
    bool leave_to_upper = false;
    double best_alpha = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double alpha = tableau_[i][q];
      if (std::abs(alpha) <= kPivotTol) continue;
      const double delta = -e.direction * alpha;  // change of basic var per unit step
      const std::size_t bv = basis_[i];
      double limit;
      bool to_upper;
      if (delta < 0.0) {
        limit = (x_[bv] - lo_[bv]) / -delta;
        to_upper = false;
      } else {
        if (hi_[bv] == kInf) continue;
        limit = (hi_[bv] - x_[bv]) / delta;
        to_upper = true;
      }
      limit = std::max(limit, 0.0);
      bool better = limit < best - kTieTol;
      if (!better && leave_row >= 0 && limit <= best + kTieTol) {
        better = bland ? bv < basis_[static_cast<std::size_t>(leave_row)]
                       : std::abs(alpha) > best_alpha;
      }
      if (better) {
        best = limit;
        leave_row = static_cast<int>(i);
        leave_to_upper = to_upper;
        best_alpha = std::abs(alpha);
      }
    }
    if (best == kInf) throw SolverError("simplex found an unbounded ray despite finite bounds");

    const double t = best;
    x_[q] += e.direction * t;
    for (std::size_t i = 0; i < m_; ++i) {
      const double alpha = tableau_[i][q];
      if (alpha != 0.0) x_[basis_[i]] -= e.direction * t * alpha;
    }
    degenerate_run_ = t <= kTieTol ? degenerate_run_ + 1 : 0;

    if (leave_row < 0) {
      at_upper_[q] = e.direction > 0.0;
      x_[q] = at_upper_[q] ? hi_[q] : lo_[q];
      return;
    }
    const auto r = static_cast<std::size_t>(leave_row);
    const std::size_t leaving = basis_[r];
    x_[leaving] = leave_to_upper ? hi_[leaving] : lo_[leaving];
    at_upper_[leaving] = leave_to_upper;
    pivot(r, q);
  }

  void pivot(std::size_t r, std::size_t q) {
    auto& prow = tableau_[r];
    const double piv = prow[q];
    for (double& v : prow) v /= piv;
    prow[q] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = tableau_[i][q];
      if (f == 0.0) continue;
      auto& row = tableau_[i];
      for (std::size_t j = 0; j < total_; ++j) row[j] -= f * prow[j];
      row[q] = 0.0;
    }
    const double dq = d_[q];
    if (dq != 0.0) {
      for (std::size_t j = 0; j < total_; ++j) d_[j] -= dq * prow[j];
      d_[q] = 0.0;
    }
    basic_row_[basis_[r]] = -1;
    basis_[r] = q;
    basic_row_[q] = static_cast<int>(r);
    at_upper_[q] = false;
  }

  // Pivots zero-valued artificials out of the basis where some other column
  // can replace them; rows where none can are redundant and keep a fixed
  // artificial at 0.
  void drive_out_artificials() {
    for (std::size_t r = 0; r < m_; ++r) {
      if (!is_artificial(basis_[r])) continue;
      std::size_t best_col = total_;
      double best_abs = 1e-7;
      for (std::size_t j = 0; j < n_ + m_; ++j) {
        if (basic_row_[j] >= 0) continue;
        if (std::abs(tableau_[r][j]) > best_abs) {
          best_abs = std::abs(tableau_[r][j]);
          best_col = j;
        }
      }
      if (best_col == total_) continue;
      const std::size_t leaving = basis_[r];
      x_[leaving] = 0.0;
      at_upper_[leaving] = false;
      pivot(r, best_col);
    }
  }

  // Recomputes basic values from the original matrix: B x_B = b - N x_N.
  void refresh_basic_values() {
    std::vector<std::vector<double>> mat(m_, std::vector<double>(m_ + 1, 0.0));
    for (std::size_t i = 0; i < m_; ++i) {
      double rhs = b_[i];
      for (std::size_t j = 0; j < total_; ++j) {
        if (basic_row_[j] < 0 && a_[i][j] != 0.0) rhs -= a_[i][j] * x_[j];
      }
      for (std::size_t k = 0; k < m_; ++k) mat[i][k] = a_[i][basis_[k]];
      mat[i][m_] = rhs;
    }
    for (std::size_t col = 0; col < m_; ++col) {
      std::size_t piv = col;
      for (std::size_t i = col + 1; i < m_; ++i) {
        if (std::abs(mat[i][col]) > std::abs(mat[piv][col])) piv = i;
      }
      if (std::abs(mat[piv][col]) < 1e-12) return;  // keep incremental values
      std::swap(mat[piv], mat[col]);
      for (std::size_t i = 0; i < m_; ++i) {
        if (i == col) continue;
        const double f = mat[i][col] / mat[col][col];
        if (f == 0.0) continue;
        for (std::size_t k = col; k <= m_; ++k) mat[i][k] -= f * mat[col][k];
      }
    }
    for (std::size_t k = 0; k < m_; ++k) x_[basis_[k]] = mat[k][m_] / mat[k][k];
  }

  const SolverOptions& options_;
  std::size_t m_;
  std::size_t n_;
  std::size_t total_;
  std::vector<std::vector<double>> a_;
  std::vector<double> b_;
  std::vector<std::vector<double>> tableau_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<double> x_;
  std::vector<bool> at_upper_;
  std::vector<int> basic_row_;
  std::vector<std::size_t> basis_;
  std::vector<double> cost_;
  std::vector<double> structural_cost_;
  std::vector<double> d_;
  std::size_t iterations_ = 0;
  std::size_t degenerate_run_ = 0;
};

}  // namespace

SolveResult solve_lp(const LinearProgram& lp, const SolverOptions& options) {
  lp.validate();
  return BoundedSimplex(lp, options).solve();
}

namespace {

struct BranchNode {
  double bound = 0.0;
  std::size_t id = 0;
  std::vector<double> lower;
  std::vector<double> upper;
  SolveResult relaxation;
};

struct WorseNode {
  bool operator()(const BranchNode& a, const BranchNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

}  // namespace

SolveResult solve_milp(const MilpProblem& problem, const SolverOptions& options) {
  problem.lp.validate();
  for (std::size_t j : problem.integer_vars) {
    if (j >= problem.lp.num_variables()) throw InvalidInput("integer variable out of range");
  }

  std::vector<std::size_t> integer_vars = problem.integer_vars;
  std::sort(integer_vars.begin(), integer_vars.end());
  LinearProgram work = problem.lp;
  SolveResult best;
  best.status = SolveStatus::Infeasible;
  double incumbent = std::numeric_limits<double>::infinity();
  std::size_t nodes = 0;
  std::size_t iterations = 0;
  std::size_t next_id = 0;

  auto solve_node = [&](const std::vector<double>& lo, const std::vector<double>& hi) {
    for (std::size_t j = 0; j < work.num_variables(); ++j) work.set_bounds(j, lo[j], hi[j]);
    ++nodes;
    SolveResult r = solve_lp(work, options);
    iterations += r.iterations;
    return r;
  };

  std::priority_queue<BranchNode, std::vector<BranchNode>, WorseNode> open;
  {
    BranchNode root{0.0, next_id++, problem.lp.lower(), problem.lp.upper(), {}};
    root.relaxation = solve_node(root.lower, root.upper);
    if (root.relaxation.status == SolveStatus::IterationLimit) {
      best.status = SolveStatus::IterationLimit;
      best.nodes = nodes;
      best.iterations = iterations;
      return best;
    }
    if (root.relaxation.status == SolveStatus::Optimal) {
      root.bound = root.relaxation.objective;
      open.push(std::move(root));
    }
  }

  while (!open.empty()) {
    BranchNode node = open.top();
    open.pop();
    if (node.bound >= incumbent - options.prune_tol) continue;

    const auto& x = node.relaxation.values;
    std::size_t branch_var = problem.lp.num_variables();
    double branch_frac = options.integrality_tol;
    for (std::size_t j : integer_vars) {
      const double dist = std::abs(x[j] - std::round(x[j]));
      if (dist > branch_frac) {
        branch_frac = dist;
        branch_var = j;
      }
    }

    if (branch_var == problem.lp.num_variables()) {
      incumbent = node.bound;
      best.status = SolveStatus::Optimal;
      best.values = x;
      for (std::size_t j : integer_vars) best.values[j] = std::round(best.values[j]);
      best.objective = node.bound;
      continue;
    }

    const double value = x[branch_var];
    for (int side = 0; side < 2; ++side) {
      BranchNode child{0.0, next_id++, node.lower, node.upper, {}};
      if (side == 0) {
        child.upper[branch_var] = std::floor(value);
      } else {
        child.lower[branch_var] = std::ceil(value);
      }
      if (child.lower[branch_var] > child.upper[branch_var]) continue;
      if (nodes >= options.max_nodes) {
        best.status = SolveStatus::NodeLimit;
        best.values.clear();
        best.nodes = nodes;
        best.iterations = iterations;
        return best;
      }
      child.relaxation = solve_node(child.lower, child.upper);
      if (child.relaxation.status == SolveStatus::IterationLimit) {
        best.status = SolveStatus::IterationLimit;
        best.values.clear();
        best.nodes = nodes;
        best.iterations = iterations;
        return best;
      }
      if (child.relaxation.status != SolveStatus::Optimal) continue;
      child.bound = child.relaxation.objective;
      if (child.bound >= incumbent - options.prune_tol) continue;
      open.push(std::move(child));
    }
  }

  best.nodes = nodes;
  best.iterations = iterations;
  return best;
}

void write_lp_text(std::ostream& os, const LinearProgram& lp,
                   std::span<const std::size_t> integer_vars) {
  auto write_terms = [&](const std::vector<double>& coeffs) {
    bool any = false;
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      if (coeffs[j] == 0.0) continue;
      os << (coeffs[j] < 0.0 ? " - " : (any ? " + " : " ")) << std::abs(coeffs[j]) << ' '
         << lp.names()[j];
      any = true;
    }
    if (!any) os << " 0";
  };
  os.precision(17);
  os << "minimize\n  obj:";
  write_terms(lp.cost());
  os << "\nsubject to\n";
  for (std::size_t i = 0; i < lp.num_constraints(); ++i) {
    os << "  r" << i << ':';
    write_terms(lp.row(i));
    switch (lp.sense(i)) {
      case RowSense::LessEqual:
        os << " <= ";
        break;
      case RowSense::Equal:
        os << " = ";
        break;
      case RowSense::GreaterEqual:
        os << " >= ";
        break;
    }
    os << lp.rhs(i) << '\n';
  }
  os << "bounds\n";
  for (std::size_t j = 0; j < lp.num_variables(); ++j) {
    os << "  " << lp.lower()[j] << " <= " << lp.names()[j] << " <= " << lp.upper()[j] << '\n';
  }
  if (!integer_vars.empty()) {
    os << "integer\n ";
    for (std::size_t j : integer_vars) os << ' ' << lp.names()[j];
    os << '\n';
  }
  os << "end\n";
}

}  // namespace phev
