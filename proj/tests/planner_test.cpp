#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "agentplan/dsl.hpp"
#include "agentplan/error.hpp"
#include "agentplan/io.hpp"
#include "agentplan/passes.hpp"
#include "agentplan/planner.hpp"
#include "test_support.hpp"

using namespace agentplan;

namespace {

const ModelCatalog& models() {
  static const ModelCatalog m = builtin_models();
  return m;
}

DeviceClass cpu_class() {
  DeviceClass d;
  d.name = "cpu";
  d.vendor = "generic";
  d.capex_usd = 2000;
  d.mem_capacity_gb = 512;
  d.mem_bandwidth_gbps_bytes = 200;
  d.tflops_fp16 = 2;
  d.scaleup_bw_gbps_bits = 100;
  d.scaleout_bw_gbps_bits = 100;
  d.op_cost_usd_per_hr = 0.05;
  d.gp_compute_units = 64;
  d.max_per_chassis = 1;
  return d;
}

HardwareCatalog with_cpu(std::vector<std::string> keep) {
  const HardwareCatalog full = builtin_catalog();
  HardwareCatalog c;
  c.cost_params = full.cost_params;
  c.classes.push_back(cpu_class());
  for (const auto& k : keep) c.classes.push_back(full.at(k));
  return c;
}

PlacementPlan worked_example_plan(double e2e_ms) {
  const TaskGraph g = parse_graph(read_text_file(fixtures::data_path("worked_example.agraph")));
  const HardwareCatalog cat = read_json_file(fixtures::data_path("hp_co.catalog.json")).get<HardwareCatalog>();
  PlanOptions opts;
  opts.profile = profile_from_json(read_json_file(fixtures::data_path("worked_example.profile.json")));
  SlaSpec sla;
  sla.mode = SlaMode::Latency;
  sla.e2e_ms = e2e_ms;
  return plan_graph(g, cat, models(), sla, opts);
}

SlaSpec latency_sla(double ttft, double tbt) {
  SlaSpec s;
  s.mode = SlaMode::Latency;
  s.ttft_ms = ttft;
  s.tbt_ms = tbt;
  return s;
}

SlaSpec throughput_sla() {
  SlaSpec s;
  s.mode = SlaMode::Throughput;
  return s;
}

HardwareCatalog only(const std::vector<std::string>& names) {
  const HardwareCatalog full = builtin_catalog();
  HardwareCatalog c;
  c.cost_params = full.cost_params;
  for (const auto& n : names) c.classes.push_back(full.at(n));
  return c;
}

}  // namespace

TEST(Plan, WorkedExampleFromGraphAndProfile) {
  const PlacementPlan plan = worked_example_plan(120.0);
  EXPECT_EQ(plan.label, "HP::CO");
  EXPECT_EQ(plan.find("llm.prefill")->device_class, "HP");
  EXPECT_EQ(plan.find("llm.decode")->device_class, "CO");
  EXPECT_NEAR(plan.cost_usd, 0.095, 1e-12);
  EXPECT_DOUBLE_EQ(plan.e2e_ms, 120.0);
  EXPECT_DOUBLE_EQ(plan.ttft_ms, 80.0);
  ASSERT_EQ(plan.transfers.size(), 1u);
  EXPECT_DOUBLE_EQ(plan.transfers[0].ms, 10.0);
  EXPECT_EQ(plan.transfers[0].bytes, 131'072'000u);
  // A tighter bound keeps everything on HP.
  const PlacementPlan fast = worked_example_plan(110.0);
  EXPECT_EQ(fast.label, "HP::HP");
  EXPECT_NEAR(fast.cost_usd, 0.11, 1e-12);
}

TEST(Plan, FromProblemMatchesOptimizer) {
  const AssignmentProblem p = fixtures::worked_example_problem();
  const PlacementPlan plan = plan_from_problem(p, solve_discrete(p));
  EXPECT_EQ(plan.find("prefill")->device_class, "HP");
  EXPECT_EQ(plan.find("decode")->device_class, "CO");
  EXPECT_NEAR(plan.cost_usd, 0.095, 1e-12);
  EXPECT_DOUBLE_EQ(plan.e2e_ms, 120.0);
}

TEST(Plan, GeneralComputeLandsOnCpu) {
  const TaskGraph g = parse_graph("graph g { w = general_compute() { gp_compute_units=1.0, static_latency_ms=5.0 } }");
  const HardwareCatalog cat = with_cpu({"H100"});
  const PlacementPlan plan = plan_graph(g, cat, models(), throughput_sla());
  EXPECT_EQ(plan.find("w")->device_class, "cpu");
  // Oracle: both single-task assignments of the same problem.
  const AssignmentProblem p = build_plan_problem(g, cat, models(), throughput_sla(), PlanOptions{});
  ASSERT_EQ(p.n_classes(), 2u);
  const double on_cpu = evaluate_choice(p, {0}).objective;
  const double on_gpu = evaluate_choice(p, {1}).objective;
  EXPECT_LT(on_cpu, on_gpu);
  EXPECT_DOUBLE_EQ(plan.objective, on_cpu);
  EXPECT_DOUBLE_EQ(plan.find("w")->time_ms, 1.0 / 64 * 1000 + 5.0);
}

TEST(Plan, EmptyGraph) {
  const PlacementPlan plan = plan_graph(TaskGraph{}, builtin_catalog(), models(), throughput_sla());
  EXPECT_TRUE(plan.tasks.empty());
  EXPECT_EQ(plan.cost_usd, 0.0);
  EXPECT_EQ(plan.e2e_ms, 0.0);
}

TEST(Plan, VoiceAgentPlacesEveryTask) {
  const TaskGraph g = parse_graph(read_text_file(fixtures::data_path("voice_agent.agraph")));
  const HardwareCatalog cat = with_cpu({"A100", "H100", "Gaudi3"});
  SlaSpec sla = latency_sla(250, 20);
  const PlacementPlan plan = plan_graph(g, cat, models(), sla);
  int tasks = 0;
  for (const auto& n : plan.graph.nodes) {
    if (n.kind == TaskKind::Input || n.kind == TaskKind::Output) {
      EXPECT_EQ(plan.find(n.id), nullptr);
      continue;
    }
    ++tasks;
    ASSERT_NE(plan.find(n.id), nullptr) << n.id;
  }
  EXPECT_EQ(static_cast<std::size_t>(tasks), plan.tasks.size());
  const auto [pre, dec] = parse_label(plan.label);
  ASSERT_NE(plan.find("llm.prefill"), nullptr);
  EXPECT_LE(plan.ttft_ms, 250.0);
  EXPECT_LE(plan.tbt_ms, 20.0);
  for (const auto& t : plan.tasks) {
    if (t.kind == TaskKind::Prefill) EXPECT_EQ(t.device_class, pre);
    if (t.kind == TaskKind::Decode) EXPECT_EQ(t.device_class, dec);
  }
  // Predictions agree with the critical path over the placed times.
  std::map<std::string, double> node_ms;
  for (const auto& n : plan.graph.nodes) node_ms[n.id] = plan.find(n.id) ? plan.find(n.id)->time_ms : 0.0;
  std::map<EdgeKey, double> edge_ms;
  for (const auto& tr : plan.transfers) edge_ms[{tr.src, tr.dst}] = tr.ms;
  EXPECT_NEAR(plan.e2e_ms, critical_path_ms(plan.graph, node_ms, edge_ms), 1e-9);
  double cost = 0.0;
  for (const auto& t : plan.tasks) cost += t.cost_usd;
  for (const auto& tr : plan.transfers) cost += tr.cost_usd;
  EXPECT_NEAR(plan.cost_usd, cost, 1e-12);
}

TEST(Plan, InfeasibleNamesTheBound) {
  const TaskGraph g = parse_graph(read_text_file(fixtures::data_path("worked_example.agraph")));
  try {
    plan_graph(g, only({"A40"}), models(), latency_sla(0.001, 0.001));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Infeasible);
    EXPECT_NE(std::string(e.what()).find("ttft"), std::string::npos) << e.what();
  }
  const TaskGraph unknown = parse_graph("graph g { a = model_exec() { model=\"nope\", in_tokens=1, out_tokens=1 } }");
  EXPECT_THROW(plan_graph(unknown, builtin_catalog(), models(), throughput_sla()), Error);
}

TEST(Plan, DeterministicJsonAndRoundTrip) {
  const TaskGraph g = parse_graph(read_text_file(fixtures::data_path("voice_agent.agraph")));
  const HardwareCatalog cat = with_cpu({"H100", "MI300x"});
  const std::string a = plan_to_json(plan_graph(g, cat, models(), latency_sla(250, 20))).dump();
  const std::string b = plan_to_json(plan_graph(g, cat, models(), latency_sla(250, 20))).dump();
  EXPECT_EQ(a, b);
  const nlohmann::json j = nlohmann::json::parse(a);
  EXPECT_EQ(j.at("schema"), "plan/v1");
  EXPECT_EQ(plan_to_json(plan_from_json(j)), j);
  EXPECT_THROW(plan_from_json(nlohmann::json{{"schema", "plan/v1"}}), Error);
}

TEST(Tco, ParseLabel) {
  EXPECT_EQ(parse_label("H100::Gaudi3"), (std::pair<std::string, std::string>{"H100", "Gaudi3"}));
  for (const char* bad : {"H100", "::H100", "H100::", "a::b::c", ""}) EXPECT_THROW(parse_label(bad), Error) << bad;
  EXPECT_EQ(parse_pairs("A::B,C::D").size(), 2u);
}

TEST(Tco, RateMatch) {
  EXPECT_EQ(rate_match(10, 10, 0.1, 64), (std::pair<int, int>{1, 1}));
  EXPECT_EQ(rate_match(10, 5, 0.1, 64), (std::pair<int, int>{1, 2}));
  EXPECT_EQ(rate_match(3, 10, 0.1, 64), (std::pair<int, int>{3, 1}));
  // Smallest total whose rates are within tolerance.
  for (double a : {0.7, 1.3, 2.9, 17.0}) {
    for (double b : {0.4, 1.0, 6.5}) {
      const auto [np, nd] = rate_match(a, b, 0.1, 64);
      const double gap = std::abs(np * a - nd * b) / std::max(np * a, nd * b);
      EXPECT_LE(gap, 0.1);
      for (int t = 2; t < np + nd; ++t)
        for (int x = 1; x < t; ++x) {
          EXPECT_GT(std::abs(x * a - (t - x) * b) / std::max(x * a, (t - x) * b), 0.1);
        }
    }
  }
  EXPECT_THROW(rate_match(0, 1, 0.1, 4), Error);
}

TEST(Tco, NormalizeVsBaseline) {
  TcoRow base, half, dead;
  base.label = "H100::H100";
  base.feasible = true;
  base.cost_per_token = 2e-6;
  half.label = "H100::Gaudi3";
  half.feasible = true;
  half.cost_per_token = 1e-6;
  dead.label = "A40::A40";
  const auto rows = normalize_vs_baseline({base, half, dead}, "H100::H100");
  EXPECT_EQ(rows[0].tco_ratio_vs_baseline, 1.0);
  EXPECT_EQ(rows[1].tco_ratio_vs_baseline, 2.0);
  EXPECT_EQ(rows[2].tco_ratio_vs_baseline, 0.0);
  try {
    normalize_vs_baseline({half}, "H100::H100");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BaselineMissing);
  }
}

TEST(Tco, SingleClassBaselineIdentity) {
  const auto rows = sweep_pairs(models().at("llama3-70b-fp8"), {4096, 512, 1}, only({"H100"}), throughput_sla(),
                                "H100::H100");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].label, "H100::H100");
  EXPECT_EQ(rows[0].tco_ratio_vs_baseline, 1.0);
  EXPECT_TRUE(rows[0].feasible);
}

TEST(Tco, BaselineErrors) {
  const ModelSpec& m = models().at("llama3-70b-fp16");
  try {
    sweep_pairs(m, {512, 512, 1}, only({"H100"}), throughput_sla(), "TPU::TPU");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BaselineInfeasible);
  }
  try {
    sweep_pairs(m, {512, 512, 1}, only({"A40", "H100"}), latency_sla(250, 20), "A40::A40");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BaselineInfeasible);
  }
}

TEST(Tco, FullSweepDominanceSoundnessAndRanking) {
  const HardwareCatalog cat = builtin_catalog();
  const SweepOptions opts;
  for (const WorkloadShape shape : {WorkloadShape{512, 4096, 1}, WorkloadShape{4096, 512, 1}}) {
    for (const SlaSpec& sla : {throughput_sla(), latency_sla(250, 20)}) {
      const ModelSpec& m = models().at("llama3-70b-fp8");
      const auto rows = sweep_pairs(m, shape, cat, sla, "H100::H100", opts);
      EXPECT_EQ(rows.size(), 36u);
      const auto base = std::find_if(rows.begin(), rows.end(), [](const auto& r) { return r.label == "H100::H100"; });
      ASSERT_NE(base, rows.end());
      EXPECT_EQ(base->tco_ratio_vs_baseline, 1.0);
      ASSERT_TRUE(rows.front().feasible);
      EXPECT_LE(rows.front().cost_per_token, base->cost_per_token);
      EXPECT_GE(rows.front().tco_ratio_vs_baseline, 1.0);
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const TcoRow& r = rows[k];
        if (!r.feasible) {
          EXPECT_FALSE(r.binding_constraint.empty()) << r.label;
          continue;
        }
        EXPECT_NEAR(r.tokens_per_sec_per_dollar * r.cost_per_token * 3600.0, 1.0, 1e-12) << r.label;
        if (k > 0 && rows[k - 1].feasible) {
          EXPECT_GE(rows[k - 1].tokens_per_sec_per_dollar, r.tokens_per_sec_per_dollar * (1 - 1e-12));
        }
        const auto [pn, dn] = parse_label(r.label);
        EXPECT_EQ(r.prefill.device, pn);
        EXPECT_EQ(r.decode.device, dn);
        if (sla.mode != SlaMode::Latency) continue;
        WorkloadShape ps = shape, ds = shape;
        ps.batch_size = r.prefill.batch_size;
        ds.batch_size = r.decode.batch_size;
        const double ttft = prefill_time_ms(m, ps, cat.at(pn), r.prefill.par, opts.prefill_mfu).ttft_ms;
        PerfOptions po;
        po.mem_efficiency = opts.decode_mem_efficiency;
        const double tbt = decode_time_ms(m, ds, cat.at(dn), r.decode.par, opts.decode_mfu, po).tbt_ms;
        EXPECT_LE(ttft, 250.0) << r.label;
        EXPECT_LE(tbt, 20.0) << r.label;
        EXPECT_DOUBLE_EQ(ttft, r.prefill.latency_ms);
        EXPECT_DOUBLE_EQ(tbt, r.decode.latency_ms);
      }
    }
  }
}

TEST(Tco, RatiosInvariantUnderHourlyScaling) {
  HardwareCatalog cat = builtin_catalog();
  const ModelSpec& m = models().at("llama3-8b-fp16");
  const auto before = sweep_pairs(m, {4096, 512, 1}, cat, latency_sla(250, 20), "H100::H100");
  for (auto& d : cat.classes) *d.op_cost_usd_per_hr *= 3.0;
  const auto after = sweep_pairs(m, {4096, 512, 1}, cat, latency_sla(250, 20), "H100::H100");
  ASSERT_EQ(before.size(), after.size());
  for (std::size_t k = 0; k < before.size(); ++k) {
    EXPECT_EQ(before[k].label, after[k].label);
    EXPECT_NEAR(before[k].tco_ratio_vs_baseline, after[k].tco_ratio_vs_baseline, 1e-12);
  }
}

TEST(Tco, DecodeHeavyPicksCheapestDecodeStream) {
  // Brute force over every tp, pp and batch size: $/hr per decoded token/s for
  // each class, independent of the sweep's geometric batch search.
  const HardwareCatalog cat = builtin_catalog();
  const ModelSpec& m = models().at("llama3-8b-fp16");
  const WorkloadShape shape{512, 4096, 1};
  const SlaSpec sla = latency_sla(250, 20);
  const SweepOptions opts;
  std::string argmin;
  double best = kInf;
  for (const auto& d : cat.classes) {
    for (int pp : opts.pp_choices)
      for (int tp : opts.tp_choices) {
        const ParallelismConfig par{tp, pp, 1};
        if (tp > d.max_per_chassis || m.weight_bytes() / par.devices() > d.mem_capacity_gb * 1e9) continue;
        const auto limit = std::min<std::int64_t>(max_batch(m, shape, d, par), 4096);
        for (std::int64_t bs = 1; bs <= limit; ++bs) {
          WorkloadShape s = shape;
          s.batch_size = bs;
          PerfOptions po;
          po.mem_efficiency = opts.decode_mem_efficiency;
          const PerfEstimate e = decode_time_ms(m, s, d, par, opts.decode_mfu, po);
          if (e.tbt_ms > 20.0) continue;
          const double usd_per_token_rate = hourly_cost(d, cat.cost_params) * par.devices() / (e.tokens_per_sec * pp);
          if (usd_per_token_rate < best) best = usd_per_token_rate, argmin = d.name;
        }
      }
  }
  std::map<std::string, double> decode_cost;
  for (const auto& d : cat.classes) {
    const StageConfig s = best_decode(m, shape, d, sla, cat.cost_params, opts);
    if (s.feasible) decode_cost[d.name] = s.usd_per_request;
  }
  const auto chosen = std::min_element(decode_cost.begin(), decode_cost.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
  EXPECT_EQ(chosen->first, argmin);
  EXPECT_NEAR(chosen->second, best / 3600.0 * shape.osl_tokens, 1e-9 * chosen->second);
}

TEST(Tco, CsvAndJsonShapes) {
  const auto rows = sweep_pairs(models().at("llama3-8b-fp16"), {512, 512, 1}, only({"H100", "A100"}),
                                throughput_sla(), "H100::H100");
  const std::string csv = tco_rows_to_csv(rows);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_EQ(csv.rfind("label,model,", 0), 0u);
  const nlohmann::json j = tco_row_to_json(rows[0]);
  EXPECT_EQ(j.at("label"), rows[0].label);
  EXPECT_EQ(j.at("tco_ratio_vs_baseline"), rows[0].tco_ratio_vs_baseline);
}
