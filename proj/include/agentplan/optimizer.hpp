#pragma once

/// @file optimizer.hpp
/// Task-to-device-class assignment: LP relaxation with slack, exact discrete
/// branch-and-bound with pairwise edge communication, and an enumeration oracle.
///
/// Times are ms, costs are $. For task i on class j:
///   t_ij    = max over timed r of theta_ij[r] / perf_j[r] + l_i + d_ij + delta_ij
///   Cost_ij = sum over r of theta_ij[r] * c_j[r] + gamma * d_ij

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "agentplan/graph.hpp"

namespace agentplan {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class SolveMode { Fractional, Discrete };

std::string_view to_string(SolveMode mode) noexcept;

struct ProblemResource {
  std::string name;
  /// Timed resources enter the roofline max; untimed ones only carry cost and
  /// capacity.
  bool timed = true;
};

struct EdgeComm {
  double latency_ms = 0.0;
  double cost_usd = 0.0;
};

/// Communication between two tasks, indexed by [class of src][class of dst].
struct ProblemEdge {
  int src = 0;
  int dst = 0;
  std::vector<std::vector<EdgeComm>> comm;
};

struct AssignmentProblem {
  std::vector<std::string> tasks;
  std::vector<std::string> classes;
  std::vector<ProblemResource> resources;
  /// [task][class][resource]
  std::vector<std::vector<std::vector<double>>> theta;
  /// [class][resource]
  std::vector<std::vector<double>> perf;
  /// [class][resource]; kInf means unlimited.
  std::vector<std::vector<double>> cap;
  /// [class][resource]: c_j^(r), $ per unit of theta.
  std::vector<std::vector<double>> unit_cost;
  /// [task]
  std::vector<double> static_latency;
  /// [task][class]
  std::vector<std::vector<double>> pipeline_cost;
  /// [task][class]
  std::vector<std::vector<double>> sync_cost;
  double gamma = 1.0;
  /// Carries T_SLA, R, lambda and scope.
  SlaSpec sla;
  SolveMode mode = SolveMode::Discrete;
  /// [task][class]; empty means every pair is allowed.
  std::vector<std::vector<bool>> allowed;
  /// Discrete mode only.
  std::vector<ProblemEdge> edges;

  std::size_t n_tasks() const noexcept { return tasks.size(); }
  std::size_t n_classes() const noexcept { return classes.size(); }
  bool is_allowed(std::size_t i, std::size_t j) const noexcept { return allowed.empty() || allowed[i][j]; }

  /// Fills optional tables (cap, latency, d, delta, allowed) with defaults.
  void fill_defaults();
  /// Throws ShapeMismatch on inconsistent dimensions, InvalidArgument on
  /// negative entries.
  void validate() const;
};

struct SolverStats {
  std::int64_t nodes_explored = 0;
  std::int64_t iterations = 0;
};

struct Assignment {
  /// [task][class]
  std::vector<std::vector<double>> x;
  /// One entry for end_to_end scope, one per task for per_task scope; empty
  /// without a latency bound.
  std::vector<double> slack;
  /// cost + lambda * sum(slack) for soft SLAs, cost otherwise.
  double objective = 0.0;
  double cost = 0.0;
  double penalty = 0.0;
  std::vector<double> task_ms;
  /// Serialized end-to-end latency including edge communication.
  double e2e_ms = 0.0;
  bool feasible = false;
  SolverStats stats;

  /// Class index per task for integral x; -1 where x is fractional.
  std::vector<int> choice() const;
};

double compute_tij(const AssignmentProblem& p, std::size_t i, std::size_t j);
double compute_cost_ij(const AssignmentProblem& p, std::size_t i, std::size_t j);

/// Fills cost, slack, objective, t_i and feasibility for `a.x`. Edge
/// communication is charged in discrete mode only. Throws ShapeMismatch.
Assignment evaluate_assignment(const AssignmentProblem& p, const Assignment& a);
Assignment evaluate_choice(const AssignmentProblem& p, const std::vector<int>& choice);

enum class RowSense { Le, Eq, Ge };

struct LpRow {
  std::string name;
  std::vector<double> coeffs;
  RowSense sense = RowSense::Le;
  double rhs = 0.0;
};

struct LpVariable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  /// (task, class) for x variables; task is the slack owner (-1 for the
  /// end-to-end slack) when `slack` is set.
  int task = -1;
  int cls = -1;
  bool slack = false;
};

/// minimize objective . v subject to rows and variable bounds.
struct LpStandardForm {
  std::vector<double> objective;
  std::vector<LpRow> rows;
  std::vector<LpVariable> vars;
  std::size_t n_tasks = 0;
  std::size_t n_classes = 0;
};

LpStandardForm build_lp(const AssignmentProblem& p);

struct LpSolution {
  std::vector<double> values;
  double objective = 0.0;
  std::int64_t iterations = 0;
};

struct SimplexOptions {
  double pivot_tolerance = 1e-9;
  std::int64_t max_iterations = 100000;
};

/// Dense two-phase simplex with Bland's rule. Throws Infeasible, Unbounded or
/// CycleLimit.
LpSolution solve_simplex(const LpStandardForm& lp, const SimplexOptions& opts = {});

/// solve_simplex mapped back to x and slack.
Assignment solve_lp(const LpStandardForm& lp, const SimplexOptions& opts = {});

/// build_lp + solve_lp + evaluate_assignment for t_i and e2e.
Assignment solve_fractional(const AssignmentProblem& p, const SimplexOptions& opts = {});

struct DiscreteOptions {
  std::int64_t max_nodes = 50'000'000;
};

/// Exact optimum by depth-first branch-and-bound. Among equal objectives the
/// lexicographically smallest class vector (task order, class order) wins.
/// Throws Infeasible or BudgetExceeded.
Assignment solve_discrete(const AssignmentProblem& p, const DiscreteOptions& opts = {});

/// Exhaustive scan with the same tie-break. Throws TooLarge or Infeasible.
Assignment enumerate_oracle(const AssignmentProblem& p, double limit = 1e6);

/// Random instance for property tests and `plan --seed`: up to `max_tasks`
/// tasks in a chain, up to `max_classes` classes.
AssignmentProblem random_problem(std::uint64_t seed, int max_tasks = 6, int max_classes = 4);

}  // namespace agentplan
