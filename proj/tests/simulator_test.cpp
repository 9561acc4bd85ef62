#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "agentplan/dsl.hpp"
#include "agentplan/error.hpp"
#include "agentplan/io.hpp"
#include "agentplan/planner.hpp"
#include "agentplan/simulator.hpp"
#include "test_support.hpp"

using namespace agentplan;

namespace {

PlacementPlan option_b() {
  const AssignmentProblem p = fixtures::worked_example_problem();
  return plan_from_problem(p, evaluate_choice(p, {0, 1}));
}

/// One task of `ms` on class "X".
PlacementPlan single_task(double ms) {
  AssignmentProblem p;
  p.tasks = {"work"};
  p.classes = {"X"};
  p.resources = {{"ms", true}};
  p.theta = {{{ms}}};
  p.perf = {{1.0}};
  p.unit_cost = {{0.0}};
  p.fill_defaults();
  return plan_from_problem(p, evaluate_choice(p, {0}));
}

std::vector<PlacementPlan> plan_corpus() {
  std::vector<PlacementPlan> plans{option_b()};
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const AssignmentProblem p = random_problem(seed, 6, 3);
    try {
      plans.push_back(plan_from_problem(p, solve_discrete(p)));
    } catch (const Error&) {
    }
  }
  HardwareCatalog cat = builtin_catalog();
  cat.classes.resize(3);
  fixtures::GraphGenerator gen(13);
  SlaSpec loose;
  for (int k = 0; k < 25; ++k) plans.push_back(plan_graph(gen.next(5), cat, builtin_models(), loose));
  plans.push_back(plan_graph(parse_graph(read_text_file(fixtures::data_path("voice_agent.agraph"))), cat,
                             builtin_models(), loose));
  return plans;
}

}  // namespace

TEST(Arrivals, ParseAndPrint) {
  EXPECT_EQ(ArrivalSpec::parse("interval:80").kind, ArrivalSpec::Kind::Interval);
  EXPECT_EQ(ArrivalSpec::parse("poisson:12.5").value, 12.5);
  EXPECT_EQ(ArrivalSpec::parse("burst:3").to_string(), "burst:3");
  for (const char* bad : {"interval", "poisson:-1", "burst:x", "wave:2", "interval:0"}) {
    EXPECT_THROW(ArrivalSpec::parse(bad), Error) << bad;
  }
}

TEST(Events, TotalOrder) {
  SimEvent a{5.0, SimEventKind::TaskEnd, 1, "x", 0};
  SimEvent b{5.0, SimEventKind::RequestArrival, 0, "", 0};
  SimEvent c{5.0, SimEventKind::TransferEnd, 9, "z", 0};
  EXPECT_LT(c, a);
  EXPECT_LT(a, b);
  EXPECT_LT((SimEvent{4.0, SimEventKind::TaskStart, 0, "", 0}), c);
  EXPECT_LT((SimEvent{5.0, SimEventKind::TaskEnd, 1, "w", 0}), a);
}

TEST(Simulate, OptionBSingleRequest) {
  const SimReport r = simulate_plan(option_b(), ArrivalSpec::parse("burst:1"), 1000.0, 1);
  ASSERT_EQ(r.requests.size(), 1u);
  EXPECT_TRUE(r.requests[0].completed);
  EXPECT_DOUBLE_EQ(r.requests[0].e2e_ms, 80.0 + 10.0 + 30.0);
  EXPECT_DOUBLE_EQ(r.requests[0].ttft_ms, 80.0);
  const Deviation d = compare_to_analytic(r, option_b());
  EXPECT_LE(d.e2e_rel, 0.01);
  EXPECT_LE(d.ttft_rel, 0.01);
  EXPECT_TRUE(d.flagged.empty());
  EXPECT_NEAR(r.device_utilization.at("HP"), 80.0 / 1000.0, 1e-12);
  EXPECT_NEAR(r.device_utilization.at("CO"), 30.0 / 1000.0, 1e-12);
  EXPECT_NEAR(r.link_utilization.at("HP->CO"), 10.0 / 1000.0, 1e-12);
}

TEST(Simulate, SimultaneousArrivalsQueue) {
  const PlacementPlan plan = single_task(50.0);
  SimOptions opts;
  opts.record_events = true;
  const SimReport r = simulate_plan(plan, ArrivalSpec::parse("burst:2"), 1000.0, 1, opts);
  ASSERT_EQ(r.requests.size(), 2u);
  EXPECT_DOUBLE_EQ(r.requests[0].e2e_ms, 50.0);
  EXPECT_DOUBLE_EQ(r.requests[1].e2e_ms, 100.0);
  std::vector<double> starts;
  for (const auto& e : r.events) {
    if (e.kind == SimEventKind::TaskStart && e.node == "work") starts.push_back(e.time_ms);
  }
  EXPECT_EQ(starts, (std::vector<double>{0.0, 50.0}));
  // Waits of 0 ms and 50 ms.
  EXPECT_EQ(r.queue_wait_histogram.at("X"), (std::vector<std::int64_t>{1, 0, 1, 0, 0}));
  // A second server removes the wait.
  opts.servers["X"] = 2;
  const SimReport two = simulate_plan(plan, ArrivalSpec::parse("burst:2"), 1000.0, 1, opts);
  EXPECT_DOUBLE_EQ(two.requests[1].e2e_ms, 50.0);
  // Contention shows up as a deviation, not an error.
  EXPECT_GT(compare_to_analytic(r, plan).e2e_rel, 0.0);
}

TEST(Simulate, ZeroArrivals) {
  const SimReport r = simulate_plan(option_b(), ArrivalSpec::parse("poisson:0.000001"), 1000.0, 4);
  EXPECT_EQ(r.admitted, 0);
  EXPECT_TRUE(r.requests.empty());
  for (const auto& [name, u] : r.device_utilization) EXPECT_EQ(u, 0.0) << name;
  EXPECT_EQ(r.tokens_per_sec, 0.0);
}

TEST(Simulate, Errors) {
  try {
    simulate_plan(option_b(), ArrivalSpec::parse("burst:1"), 0.0, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroDuration);
  }
  PlacementPlan broken = option_b();
  broken.tasks[0].time_ms = -1.0;
  EXPECT_THROW(simulate_plan(broken, ArrivalSpec::parse("burst:1"), 100.0, 1), Error);
  PlacementPlan stray = option_b();
  stray.transfers.push_back({"decode", "prefill", 0, 1.0, 0.0});
  try {
    simulate_plan(stray, ArrivalSpec::parse("burst:1"), 100.0, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidPlan);
  }
  SimOptions none;
  none.servers["HP"] = 0;
  EXPECT_THROW(simulate_plan(option_b(), ArrivalSpec::parse("burst:1"), 100.0, 1, none), Error);
}

TEST(Simulate, DeterministicForSeed) {
  SimOptions opts;
  opts.record_events = true;
  const auto a = sim_report_to_json(simulate_plan(option_b(), ArrivalSpec::parse("poisson:20"), 5000.0, 9, opts));
  const auto b = sim_report_to_json(simulate_plan(option_b(), ArrivalSpec::parse("poisson:20"), 5000.0, 9, opts));
  EXPECT_EQ(a.dump(), b.dump());
  const auto c = sim_report_to_json(simulate_plan(option_b(), ArrivalSpec::parse("poisson:20"), 5000.0, 10, opts));
  EXPECT_NE(a.dump(), c.dump());
  EXPECT_EQ(a.at("schema"), "sim/v1");
}

TEST(SimProperties, NoContentionMatchesCriticalPath) {
  for (const auto& plan : plan_corpus()) {
    const SimReport r = simulate_plan(plan, ArrivalSpec::parse("burst:1"), 1e9, 1);
    ASSERT_EQ(r.completed, 1) << plan.label;
    const Deviation d = compare_to_analytic(r, plan, 0.01);
    EXPECT_LE(d.e2e_rel, 0.01) << plan.label;
    EXPECT_LE(d.ttft_rel, 0.01) << plan.label;
    EXPECT_TRUE(d.flagged.empty()) << plan.label;
    EXPECT_NEAR(r.requests[0].e2e_ms, plan.e2e_ms, 1e-9 * (1 + plan.e2e_ms)) << plan.label;
  }
}

TEST(SimProperties, CausalityAndConservation) {
  for (const auto& plan : plan_corpus()) {
    SimOptions opts;
    opts.record_events = true;
    const double horizon = std::max(1.0, plan.e2e_ms) * 6;
    const double gap = std::max(0.5, plan.e2e_ms / 3);
    const SimReport r = simulate_plan(plan, ArrivalSpec{ArrivalSpec::Kind::Interval, gap}, horizon, 3, opts);
    EXPECT_EQ(r.admitted, r.completed + r.in_flight) << plan.label;
    EXPECT_EQ(static_cast<std::size_t>(r.admitted), r.requests.size());
    for (const auto& [name, u] : r.device_utilization) {
      EXPECT_GE(u, 0.0);
      EXPECT_LE(u, 1.0 + 1e-12) << name;
    }
    EXPECT_TRUE(std::is_sorted(r.events.begin(), r.events.end()));

    std::map<std::pair<std::int64_t, std::string>, double> task_end, transfer_end;
    std::map<std::int64_t, double> arrival;
    for (const auto& e : r.events) {
      if (e.kind == SimEventKind::TaskEnd) task_end[{e.request, e.node}] = e.time_ms;
      if (e.kind == SimEventKind::TransferEnd) transfer_end[{e.request, e.node}] = e.time_ms;
      if (e.kind == SimEventKind::RequestArrival) arrival[e.request] = e.time_ms;
    }
    std::map<std::pair<std::string, std::string>, bool> has_transfer;
    // Zero-length transfers bypass the link and hand over at the task end.
    for (const auto& t : plan.transfers) {
      if (t.ms > 0.0) has_transfer[{t.src, t.dst}] = true;
    }
    for (const auto& e : r.events) {
      if (e.kind != SimEventKind::TaskStart) continue;
      EXPECT_GE(e.time_ms, arrival.at(e.request));
      for (const auto& edge : plan.graph.edges) {
        if (edge.dst != e.node) continue;
        if (has_transfer.count({edge.src, edge.dst})) {
          const auto it = transfer_end.find({e.request, edge.src + "->" + edge.dst});
          ASSERT_NE(it, transfer_end.end()) << plan.label << " " << e.node;
          EXPECT_LE(it->second, e.time_ms);
        } else {
          const auto it = task_end.find({e.request, edge.src});
          ASSERT_NE(it, task_end.end()) << plan.label << " " << e.node;
          EXPECT_LE(it->second, e.time_ms);
        }
      }
    }
  }
}

TEST(SimProperties, SaturatingThroughputMatchesBottleneck) {
  for (const auto& plan : plan_corpus()) {
    const double cap = bottleneck_rps(plan);
    if (!(cap > 0.0) || !std::isfinite(cap)) continue;
    const double gap = 1000.0 / cap / 2.0;
    const double horizon = std::max(400 * 1000.0 / cap, 50 * plan.e2e_ms);
    const SimReport r = simulate_plan(plan, ArrivalSpec{ArrivalSpec::Kind::Interval, gap}, horizon, 1);
    const Deviation d = compare_to_analytic(r, plan);
    EXPECT_NEAR(r.requests_per_sec / cap, 1.0, 0.05) << plan.label;
    EXPECT_LE(r.requests_per_sec, cap * (1 + 1e-9)) << plan.label;
    EXPECT_NEAR(d.throughput_rel, std::abs(r.requests_per_sec - cap) / cap, 1e-12);
  }
}

TEST(SimJson, DeviationNullsNonFinite) {
  Deviation d;
  d.ttft_rel = std::numeric_limits<double>::infinity();
  const auto j = deviation_to_json(d);
  EXPECT_TRUE(j.at("ttft_rel").is_null());
  EXPECT_EQ(j.at("e2e_rel"), 0.0);
}
