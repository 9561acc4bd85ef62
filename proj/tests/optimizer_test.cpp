#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "agentplan/error.hpp"
#include "agentplan/io.hpp"
#include "agentplan/optimizer.hpp"
#include "test_support.hpp"

using namespace agentplan;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

AssignmentProblem lp_example(SlaScope scope) {
  AssignmentProblem p = read_json_file(fixtures::data_path("worked_example.lp.json")).get<AssignmentProblem>();
  p.sla.scope = scope;
  return p;
}

AssignmentProblem single_task(const std::vector<double>& costs) {
  AssignmentProblem p;
  p.tasks = {"t"};
  p.resources = {{"units", false}};
  p.theta.resize(1);
  for (std::size_t j = 0; j < costs.size(); ++j) {
    p.classes.push_back("c" + std::to_string(j));
    p.theta[0].push_back({1.0});
    p.perf.push_back({1.0});
    p.unit_cost.push_back({costs[j]});
  }
  p.fill_defaults();
  return p;
}

/// Optimum or +inf when no assignment exists.
double discrete_or_inf(const AssignmentProblem& p) {
  try {
    return solve_discrete(p).objective;
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Infeasible);
    return kInf;
  }
}

void scale_money(AssignmentProblem& p, double k) {
  for (auto& row : p.unit_cost)
    for (auto& c : row) c *= k;
  p.gamma *= k;
  if (!p.sla.hard()) p.sla.lambda_per_ms *= k;
  for (auto& e : p.edges)
    for (auto& row : e.comm)
      for (auto& c : row) c.cost_usd *= k;
}

void expect_feasible_shape(const AssignmentProblem& p, const Assignment& a) {
  ASSERT_EQ(a.x.size(), p.n_tasks());
  for (std::size_t i = 0; i < p.n_tasks(); ++i) {
    double sum = 0.0;
    for (double v : a.x[i]) {
      EXPECT_GE(v, -1e-9);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
  for (std::size_t j = 0; j < p.n_classes(); ++j) {
    for (std::size_t r = 0; r < p.resources.size(); ++r) {
      double used = 0.0;
      for (std::size_t i = 0; i < p.n_tasks(); ++i) used += a.x[i][j] * p.theta[i][j][r];
      EXPECT_LE(used, p.cap[j][r] + 1e-9);
    }
  }
}

}  // namespace

TEST(Tij, Examples) {
  AssignmentProblem p = single_task({0.0});
  p.theta[0][0] = {0.0};
  p.static_latency = {80.0};
  EXPECT_EQ(compute_tij(p, 0, 0), 80.0);

  AssignmentProblem roof;
  roof.tasks = {"t"};
  roof.classes = {"H100"};
  roof.resources = {{"flops", true}, {"bytes", true}};
  roof.theta = {{{1.6e13, 0.0}}};
  roof.perf = {{1.979e15 / 1000.0, 1.0}};  // per ms
  roof.unit_cost = {{0, 0}};
  roof.fill_defaults();
  EXPECT_NEAR(compute_tij(roof, 0, 0), 8.0849, 1e-4);

  roof.theta = {{{10.0, 25.0}}};
  roof.perf = {{1.0, 1.0}};
  EXPECT_EQ(compute_tij(roof, 0, 0), 25.0);
  roof.perf = {{0.0, 1.0}};
  EXPECT_EQ(code_of([&] { compute_tij(roof, 0, 0); }), ErrorCode::ZeroPerf);
}

TEST(Evaluate, WorkedExampleOptions) {
  const AssignmentProblem p = fixtures::worked_example_problem();
  const Assignment a = evaluate_choice(p, {0, 0});
  EXPECT_NEAR(a.cost, 0.11, 1e-12);
  EXPECT_DOUBLE_EQ(a.e2e_ms, 105.0);
  const Assignment b = evaluate_choice(p, {0, 1});
  EXPECT_NEAR(b.cost, 0.095, 1e-12);
  EXPECT_DOUBLE_EQ(b.e2e_ms, 120.0);
  // All-CO: 1000 * 0.00005 + 500 * 0.00002 from the profiled table.
  const Assignment c = evaluate_choice(p, {1, 1});
  EXPECT_NEAR(c.cost, 1000 * 0.00005 + 500 * 0.00002, 1e-12);
  EXPECT_DOUBLE_EQ(c.e2e_ms, 160.0);
  EXPECT_FALSE(c.feasible);

  AssignmentProblem zero = p;
  for (auto& t : zero.theta)
    for (auto& row : t) std::fill(row.begin(), row.end(), 0.0);
  zero.edges.clear();
  zero.sla.lambda_per_ms = 0.0;
  EXPECT_EQ(evaluate_choice(zero, {1, 0}).cost, 0.0);

  Assignment bad;
  bad.x = {{1.0}};
  EXPECT_EQ(code_of([&] { evaluate_assignment(p, bad); }), ErrorCode::ShapeMismatch);
}

TEST(Discrete, WorkedExampleHardSla) {
  const AssignmentProblem p = fixtures::worked_example_problem();
  const Assignment a = solve_discrete(p);
  EXPECT_EQ(a.choice(), (std::vector<int>{0, 1}));
  EXPECT_NEAR(a.cost, 0.095, 1e-12);
  EXPECT_DOUBLE_EQ(a.e2e_ms, 120.0);
  EXPECT_TRUE(a.feasible);
  const Assignment o = enumerate_oracle(p);
  EXPECT_EQ(o.choice(), a.choice());
  EXPECT_EQ(o.objective, a.objective);
}

TEST(Discrete, WorkedExampleSoftSlaPivots) {
  AssignmentProblem p = fixtures::worked_example_problem();
  p.sla.lambda_per_ms = 0.0005;
  const Assignment a = solve_discrete(p);
  EXPECT_EQ(a.choice(), (std::vector<int>{1, 1}));
  ASSERT_EQ(a.slack.size(), 1u);
  EXPECT_DOUBLE_EQ(a.slack[0], 40.0);
  EXPECT_DOUBLE_EQ(a.e2e_ms, 160.0);
  EXPECT_NEAR(a.penalty, 0.02, 1e-12);
  EXPECT_NEAR(a.objective, evaluate_choice(p, {1, 1}).cost + 0.02, 1e-12);
  // Four-way oracle by hand.
  double best = kInf;
  std::vector<int> arg;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const double v = evaluate_choice(p, {x, y}).objective;
      if (v < best) best = v, arg = {x, y};
    }
  EXPECT_EQ(arg, a.choice());
  EXPECT_DOUBLE_EQ(best, a.objective);
}

TEST(Discrete, InfeasibleAndTrivial) {
  AssignmentProblem p = fixtures::worked_example_problem();
  p.sla.e2e_ms = 10.0;
  EXPECT_EQ(code_of([&] { solve_discrete(p); }), ErrorCode::Infeasible);
  EXPECT_EQ(code_of([&] { enumerate_oracle(p); }), ErrorCode::Infeasible);

  const Assignment one = solve_discrete(single_task({3, 1, 2}));
  EXPECT_EQ(one.choice(), std::vector<int>{1});
  EXPECT_EQ(one.cost, 1.0);
  const Assignment tie = solve_discrete(single_task({2, 1, 1}));
  EXPECT_EQ(tie.choice(), std::vector<int>{1});

  AssignmentProblem forced = single_task({3, 1, 2});
  forced.allowed = {{true, false, false}};
  EXPECT_EQ(enumerate_oracle(forced).choice(), std::vector<int>{0});
  EXPECT_EQ(code_of([&] { enumerate_oracle(random_problem(1, 1, 1), 0.5); }), ErrorCode::TooLarge);
}

TEST(Discrete, BudgetExceeded) {
  const AssignmentProblem p = random_problem(4, 6, 4);
  DiscreteOptions o;
  o.max_nodes = 1;
  if (p.n_tasks() > 1) EXPECT_EQ(code_of([&] { solve_discrete(p, o); }), ErrorCode::BudgetExceeded);
}

TEST(Lp, WorkedExampleEncoding) {
  const LpStandardForm lp = build_lp(lp_example(SlaScope::EndToEnd));
  EXPECT_EQ(lp.vars.size(), 5u);
  int slack = 0;
  for (const auto& v : lp.vars) slack += v.slack;
  EXPECT_EQ(slack, 1);
  EXPECT_EQ(lp.vars[4].upper, 0.0);  // hard SLA pins the slack.
  // Two assignment rows and one latency row; unlimited capacity adds none.
  EXPECT_EQ(lp.rows.size(), 3u);

  const Assignment e2e = solve_fractional(lp_example(SlaScope::EndToEnd));
  EXPECT_NEAR(e2e.objective, 0.095, 1e-9);
  EXPECT_NEAR(e2e.x[0][0], 1.0, 1e-9);
  EXPECT_NEAR(e2e.x[1][1], 1.0, 1e-9);

  const Assignment per_task = solve_fractional(lp_example(SlaScope::PerTask));
  EXPECT_NEAR(per_task.objective, 0.071, 1e-9);
  EXPECT_NEAR(per_task.x[0][1], 0.8, 1e-9);
  EXPECT_NEAR(per_task.x[1][1], 1.0, 1e-9);
}

TEST(Lp, ThroughputIsRejected) {
  AssignmentProblem p = lp_example(SlaScope::EndToEnd);
  p.sla.min_throughput = 0.01;
  EXPECT_EQ(code_of([&] { build_lp(p); }), ErrorCode::NonlinearConstraint);
}

TEST(Simplex, SmallCases) {
  LpStandardForm trivial;
  trivial.objective = {1.0};
  trivial.vars = {{"x", 0.0, 1.0}};
  EXPECT_EQ(solve_simplex(trivial).objective, 0.0);

  LpStandardForm unbounded;
  unbounded.objective = {-1.0};
  unbounded.vars = {{"x", 0.0, kInf}};
  EXPECT_EQ(code_of([&] { solve_simplex(unbounded); }), ErrorCode::Unbounded);

  LpStandardForm infeasible;
  infeasible.objective = {1.0};
  infeasible.vars = {{"x", 0.0, 1.0}};
  infeasible.rows = {{"r", {1.0}, RowSense::Ge, 2.0}};
  EXPECT_EQ(code_of([&] { solve_simplex(infeasible); }), ErrorCode::Infeasible);

  // max 3a + 2b  s.t.  a + b <= 4, a + 3b <= 6, a <= 3  ->  a = 3, b = 1, value 11.
  LpStandardForm textbook;
  textbook.objective = {-3.0, -2.0};
  textbook.vars = {{"a"}, {"b"}};
  textbook.rows = {{"r1", {1, 1}, RowSense::Le, 4}, {"r2", {1, 3}, RowSense::Le, 6}, {"r3", {1, 0}, RowSense::Le, 3}};
  const LpSolution s = solve_simplex(textbook);
  EXPECT_NEAR(s.objective, -11.0, 1e-9);
  EXPECT_NEAR(s.values[0], 3.0, 1e-9);
  EXPECT_NEAR(s.values[1], 1.0, 1e-9);

  const Assignment forced = solve_fractional([] {
    AssignmentProblem p = single_task({7.0});
    p.mode = SolveMode::Fractional;
    return p;
  }());
  EXPECT_DOUBLE_EQ(forced.x[0][0], 1.0);
  EXPECT_NEAR(forced.objective, 7.0, 1e-12);
}

TEST(Properties, OracleEquivalence) {
  int solved = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const AssignmentProblem p = random_problem(seed, 6, 4);
    std::optional<Assignment> bb, oracle;
    try {
      bb = solve_discrete(p);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::Infeasible) << seed;
    }
    try {
      oracle = enumerate_oracle(p);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::Infeasible) << seed;
    }
    ASSERT_EQ(bb.has_value(), oracle.has_value()) << seed;
    if (!bb) continue;
    ++solved;
    EXPECT_EQ(bb->objective, oracle->objective) << seed;
    EXPECT_EQ(bb->choice(), oracle->choice()) << seed;
    expect_feasible_shape(p, *bb);
  }
  EXPECT_GT(solved, 100);
}

TEST(Properties, LpLowerBoundsDiscrete) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    AssignmentProblem p = random_problem(seed, 6, 4);
    p.edges.clear();
    p.sla.min_throughput.reset();
    const double discrete = discrete_or_inf(p);
    p.mode = SolveMode::Fractional;
    try {
      const Assignment lp = solve_fractional(p);
      EXPECT_LE(lp.objective, discrete + 1e-9) << seed;
      expect_feasible_shape(p, lp);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::Infeasible) << seed;
      EXPECT_EQ(discrete, kInf) << seed;
    }
  }
}

TEST(Properties, ScalingCovariance) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const AssignmentProblem p = random_problem(seed, 5, 3);
    AssignmentProblem q = p;
    scale_money(q, 3.5);
    const double a = discrete_or_inf(p);
    const double b = discrete_or_inf(q);
    if (a == kInf) {
      EXPECT_EQ(b, kInf);
      continue;
    }
    EXPECT_NEAR(b, 3.5 * a, 1e-9 * (1 + b)) << seed;
    // The scaled optimum costs the same as the original argmin under scaled prices.
    EXPECT_NEAR(evaluate_choice(q, solve_discrete(p).choice()).objective, b, 1e-9 * (1 + b)) << seed;
  }
}

TEST(Properties, SlackMonotonicity) {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    AssignmentProblem p = random_problem(seed, 5, 3);
    if (!p.sla.e2e_ms) continue;
    AssignmentProblem looser = p;
    *looser.sla.e2e_ms *= 1.3;
    EXPECT_LE(discrete_or_inf(looser), discrete_or_inf(p) + 1e-12) << seed;
    if (!p.sla.hard()) {
      AssignmentProblem pricier = p;
      pricier.sla.lambda_per_ms *= 2;
      EXPECT_GE(discrete_or_inf(pricier), discrete_or_inf(p) - 1e-12) << seed;
      AssignmentProblem hard = p;
      hard.sla.lambda_per_ms = kInf;
      EXPECT_GE(discrete_or_inf(hard), discrete_or_inf(pricier) - 1e-12) << seed;
    }
  }
}

TEST(ProblemJson, RoundTrip) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const AssignmentProblem p = random_problem(seed);
    const nlohmann::json j = p;
    const AssignmentProblem back = j.get<AssignmentProblem>();
    EXPECT_EQ(nlohmann::json(back), j);
    EXPECT_EQ(discrete_or_inf(back), discrete_or_inf(p));
  }
  const AssignmentProblem fixture =
      read_json_file(fixtures::data_path("worked_example.problem.json")).get<AssignmentProblem>();
  EXPECT_EQ(nlohmann::json(fixture), nlohmann::json(fixtures::worked_example_problem()));
}
