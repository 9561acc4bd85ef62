#include "agentplan/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "agentplan/dsl.hpp"
#include "agentplan/error.hpp"
#include "agentplan/graph_json.hpp"
#include "agentplan/hw_catalog.hpp"
#include "agentplan/io.hpp"
#include "agentplan/optimizer.hpp"
#include "agentplan/passes.hpp"
#include "agentplan/perf_model.hpp"
#include "agentplan/planner.hpp"
#include "agentplan/simulator.hpp"

namespace agentplan::cli {

using nlohmann::json;

namespace {

struct Sources {
  std::string catalog;
  std::string models;
};

void add_sources(CLI::App* sub, Sources& s) {
  sub->add_option("--catalog", s.catalog, "Hardware catalog JSON (default: $AGENTPLAN_CATALOG, else builtin)");
  sub->add_option("--models", s.models, "Model catalog JSON (default: builtin)");
}

HardwareCatalog load_catalog(const Sources& s) {
  std::string path = s.catalog;
  if (path.empty()) {
    if (const char* env = std::getenv("AGENTPLAN_CATALOG"); env && *env) path = env;
  }
  if (path.empty()) return builtin_catalog();
  return read_json_file(path).get<HardwareCatalog>();
}

ModelCatalog load_models(const Sources& s) {
  if (s.models.empty()) return builtin_models();
  return read_json_file(s.models).get<ModelCatalog>();
}

double parse_lambda(const std::string& text) {
  if (text == "inf" || text == "hard") return kInf;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && v >= 0.0) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidArgument, "--lambda expects a nonnegative number or 'inf'");
}

/// Writes `text` to `path`, or to `out` when no path was given.
void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string csv_number(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

// --- validate / lower -------------------------------------------------------

struct GraphArgs {
  std::string file;
  std::string passes = "split_llm,split_tool";
  std::string format = "text";
  std::string output;
  Sources sources;
};

int cmd_validate(const GraphArgs& a, std::ostream& out, std::ostream& err) {
  const TaskGraph g = parse_graph(read_text_file(a.file));
  const auto diags = validate_graph(g);
  for (const auto& d : diags) err << a.file << ": " << d.code << " " << d.subject << ": " << d.message << "\n";
  if (!diags.empty()) return kExitDomainError;
  out << "ok\n";
  return kExitOk;
}

int cmd_lower(const GraphArgs& a, std::ostream& out, std::ostream& err) {
  const TaskGraph g = parse_graph(read_text_file(a.file));
  PipelineOptions po;
  po.models = load_models(a.sources);
  const PipelineResult r = run_pipeline(g, parse_pass_list(a.passes), po);
  for (const auto& rep : r.reports) {
    err << rep.pass << ": +" << rep.nodes_added << "/-" << rep.nodes_removed << " nodes, +" << rep.edges_added
        << "/-" << rep.edges_removed << " edges\n";
  }
  if (a.format == "json") {
    json reports = json::array();
    for (const auto& rep : r.reports) {
      reports.push_back({{"pass", rep.pass},
                         {"nodes_added", rep.nodes_added},
                         {"nodes_removed", rep.nodes_removed},
                         {"edges_added", rep.edges_added},
                         {"edges_removed", rep.edges_removed},
                         {"notes", rep.notes}});
    }
    emit(dump(json{{"schema", "graph/v1"}, {"graph", normalize(r.graph)}, {"reports", reports}}), a.output, out);
  } else {
    emit(print(r.graph), a.output, out);
  }
  return kExitOk;
}

// --- analyze-hw ------------------------------------------------------------

struct HwArgs {
  std::string basis = "capex";
  std::string format = "csv";
  std::string output;
  Sources sources;
};

int cmd_analyze_hw(const HwArgs& a, std::ostream& out) {
  const HardwareCatalog catalog = load_catalog(a.sources);
  const CostBasis basis = a.basis == "opex" ? CostBasis::Opex : CostBasis::Capex;
  const auto rows = marginal_costs(catalog, basis);
  if (a.format == "json") {
    json jr = json::array();
    for (const auto& r : rows) {
      jr.push_back({{"class", r.name},
                    {"usd_per_gbps_bytes", r.usd_per_gbps_bytes},
                    {"usd_per_tflop_fp16", r.usd_per_tflop_fp16},
                    {"usd_per_tflop_fp8", r.usd_per_tflop_fp8 ? json(*r.usd_per_tflop_fp8) : json(nullptr)},
                    {"usd_per_gb", r.usd_per_gb}});
    }
    emit(dump(json{{"schema", "marginal/v1"}, {"basis", std::string(to_string(basis))}, {"rows", jr}}), a.output,
         out);
    return kExitOk;
  }
  std::ostringstream s;
  s << "class,usd_per_gbps_bytes,usd_per_tflop_fp16,usd_per_tflop_fp8,usd_per_gb\n";
  for (const auto& r : rows) {
    s << r.name << ',' << format_double(r.usd_per_gbps_bytes) << ',' << format_double(r.usd_per_tflop_fp16) << ','
      << csv_number(r.usd_per_tflop_fp8) << ',' << format_double(r.usd_per_gb) << '\n';
  }
  emit(s.str(), a.output, out);
  return kExitOk;
}

// --- estimate --------------------------------------------------------------

struct EstimateArgs {
  std::string model;
  std::string device;
  std::int64_t isl = 0;
  std::int64_t osl = 0;
  std::int64_t batch = 1;
  int tp = 1;
  int pp = 1;
  double prefill_mfu = 0.5;
  double decode_mfu = 0.5;
  double mem_efficiency = 0.9;
  std::string output;
  Sources sources;
};

json estimate_to_json(const PerfEstimate& e) {
  return json{{"ttft_ms", e.ttft_ms},
              {"tbt_ms", e.tbt_ms},
              {"tokens_per_sec", e.tokens_per_sec},
              {"flops_used", e.flops_used},
              {"bytes_moved", e.bytes_moved},
              {"bound", std::string(to_string(e.bound))},
              {"comm_overhead_ms", e.comm_overhead_ms},
              {"pipeline_transfer_ms", e.pipeline_transfer_ms}};
}

int cmd_estimate(const EstimateArgs& a, std::ostream& out) {
  const HardwareCatalog catalog = load_catalog(a.sources);
  const ModelCatalog models = load_models(a.sources);
  const ModelSpec& m = models.at(a.model);
  const DeviceClass* d = catalog.find(a.device);
  if (!d) throw Error(ErrorCode::UnknownClass, "unknown device class '" + a.device + "'");
  const WorkloadShape shape{a.isl, a.osl, a.batch};
  const ParallelismConfig par{a.tp, a.pp, 1};
  const PerfEstimate pre = prefill_time_ms(m, shape, *d, par, a.prefill_mfu);
  PerfOptions dopts;
  dopts.mem_efficiency = a.mem_efficiency;
  const PerfEstimate dec = decode_time_ms(m, shape, *d, par, a.decode_mfu, dopts);
  const std::uint64_t kv = kv_cache_bytes(m, a.isl, a.batch);
  json j{{"schema", "estimate/v1"},
         {"model", m.name},
         {"device", d->name},
         {"isl", a.isl},
         {"osl", a.osl},
         {"batch_size", a.batch},
         {"tp", a.tp},
         {"pp", a.pp},
         {"kv_cache_bytes", kv},
         {"max_batch", max_batch(m, shape, *d, par)},
         {"prefill", estimate_to_json(pre)},
         {"decode", estimate_to_json(dec)},
         {"peak_egress_gbps", peak_egress_gbps(static_cast<double>(kv), pre.ttft_ms, par.devices())},
         {"peak_ingress_gbps", peak_ingress_gbps(static_cast<double>(kv), dec.tbt_ms, par.devices())}};
  emit(dump(j), a.output, out);
  return kExitOk;
}

// --- plan ------------------------------------------------------------------

struct PlanArgs {
  std::string problem;
  std::string graph;
  std::string profile;
  std::optional<std::uint64_t> seed;
  std::string mode;
  std::string scope;
  std::string lambda;
  std::optional<double> e2e_ms;
  std::optional<double> ttft_ms;
  std::optional<double> tbt_ms;
  std::int64_t batch = 1;
  std::int64_t max_nodes = 50'000'000;
  std::string output;
  Sources sources;
};

void apply_overrides(const PlanArgs& a, AssignmentProblem& p) {
  if (!a.mode.empty()) p.mode = a.mode == "fractional" ? SolveMode::Fractional : SolveMode::Discrete;
  if (!a.scope.empty()) p.sla.scope = a.scope == "per_task" ? SlaScope::PerTask : SlaScope::EndToEnd;
  if (!a.lambda.empty()) p.sla.lambda_per_ms = parse_lambda(a.lambda);
  if (a.e2e_ms) p.sla.e2e_ms = a.e2e_ms;
  p.validate();
}

int cmd_plan(const PlanArgs& a, std::ostream& out) {
  const int sources = !a.problem.empty() + !a.graph.empty() + a.seed.has_value();
  if (sources != 1) throw CLI::ValidationError("plan", "give exactly one of --problem, --graph or --seed");
  DiscreteOptions dopts;
  dopts.max_nodes = a.max_nodes;

  if (!a.graph.empty()) {
    SlaSpec sla;
    sla.e2e_ms = a.e2e_ms;
    sla.ttft_ms = a.ttft_ms;
    sla.tbt_ms = a.tbt_ms;
    if (a.ttft_ms || a.tbt_ms) sla.mode = SlaMode::Latency;
    if (!a.scope.empty()) sla.scope = a.scope == "per_task" ? SlaScope::PerTask : SlaScope::EndToEnd;
    if (!a.lambda.empty()) sla.lambda_per_ms = parse_lambda(a.lambda);
    sla.validate();
    if (a.mode == "fractional") throw Error(ErrorCode::InvalidArgument, "graph planning is discrete only");
    PlanOptions opts;
    opts.batch_size = a.batch;
    opts.solver = dopts;
    if (!a.profile.empty()) opts.profile = profile_from_json(read_json_file(a.profile));
    const PlacementPlan plan = plan_graph(parse_graph(read_text_file(a.graph)), load_catalog(a.sources),
                                          load_models(a.sources), sla, opts);
    emit(dump(plan_to_json(plan)), a.output, out);
    return kExitOk;
  }

  AssignmentProblem p = a.seed ? random_problem(*a.seed) : read_json_file(a.problem).get<AssignmentProblem>();
  apply_overrides(a, p);
  if (p.mode == SolveMode::Fractional) {
    const Assignment sol = solve_fractional(p);
    json j = assignment_to_json(p, sol);
    j["schema"] = "assignment/v1";
    emit(dump(j), a.output, out);
    return kExitOk;
  }
  const Assignment sol = solve_discrete(p, dopts);
  json j = plan_to_json(plan_from_problem(p, sol));
  j["assignment"] = assignment_to_json(p, sol);
  emit(dump(j), a.output, out);
  return kExitOk;
}

// --- tco-sweep -------------------------------------------------------------

struct SweepArgs {
  std::string model;
  std::int64_t isl = 0;
  std::int64_t osl = 0;
  std::string sla = "throughput";
  double ttft_ms = 250.0;
  double tbt_ms = 20.0;
  std::string baseline = "H100::H100";
  std::string pairs;
  std::string format = "csv";
  double prefill_mfu = 0.5;
  double decode_mfu = 0.5;
  std::string output;
  Sources sources;
};

int cmd_tco_sweep(const SweepArgs& a, std::ostream& out) {
  const HardwareCatalog catalog = load_catalog(a.sources);
  const ModelCatalog models = load_models(a.sources);
  const ModelSpec& m = models.at(a.model);
  SlaSpec sla;
  if (a.sla == "latency") {
    sla.mode = SlaMode::Latency;
    sla.ttft_ms = a.ttft_ms;
    sla.tbt_ms = a.tbt_ms;
  }
  sla.validate();
  SweepOptions opts;
  if (!a.pairs.empty()) opts.pairs = parse_pairs(a.pairs);
  opts.prefill_mfu = a.prefill_mfu;
  opts.decode_mfu = a.decode_mfu;
  const auto rows = sweep_pairs(m, WorkloadShape{a.isl, a.osl, 1}, catalog, sla, a.baseline, opts);
  if (a.format == "json") {
    json jr = json::array();
    for (const auto& r : rows) jr.push_back(tco_row_to_json(r));
    emit(dump(json{{"schema", "tco/v1"}, {"baseline", a.baseline}, {"rows", jr}}), a.output, out);
  } else {
    emit(tco_rows_to_csv(rows), a.output, out);
  }
  return kExitOk;
}

// --- simulate --------------------------------------------------------------

struct SimArgs {
  std::string plan;
  std::string arrivals = "burst:1";
  double duration = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> servers;
  bool events = false;
  double tolerance = 0.01;
  std::string format = "json";
  std::string output;
};

int cmd_simulate(const SimArgs& a, std::ostream& out) {
  const PlacementPlan plan = plan_from_json(read_json_file(a.plan));
  SimOptions opts;
  opts.record_events = a.events;
  for (const auto& s : a.servers) {
    const auto eq = s.find('=');
    int n = 0;
    try {
      if (eq == std::string::npos) throw std::invalid_argument("missing '='");
      n = std::stoi(s.substr(eq + 1));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--servers", "expected CLASS=N, got '" + s + "'");
    }
    opts.servers[s.substr(0, eq)] = n;
  }
  const SimReport report = simulate_plan(plan, ArrivalSpec::parse(a.arrivals), a.duration, a.seed, opts);
  const Deviation dev = compare_to_analytic(report, plan, a.tolerance, opts);
  if (a.format == "text") {
    std::ostringstream s;
    s << "arrivals " << report.arrivals << " over " << format_double(report.duration_ms) << " ms (seed "
      << report.seed << ")\n";
    s << "admitted " << report.admitted << ", completed " << report.completed << ", in flight " << report.in_flight
      << "\n";
    s << "throughput " << format_double(report.requests_per_sec) << " req/s, "
      << format_double(report.tokens_per_sec) << " tokens/s\n";
    for (const auto& [cls, u] : report.device_utilization) s << "utilization " << cls << " " << format_double(u) << "\n";
    for (const auto& [link, u] : report.link_utilization) s << "link " << link << " " << format_double(u) << "\n";
    s << "deviation ttft " << format_double(dev.ttft_rel) << " tbt " << format_double(dev.tbt_rel) << " e2e "
      << format_double(dev.e2e_rel) << "\n";
    emit(s.str(), a.output, out);
    return kExitOk;
  }
  json j = sim_report_to_json(report);
  j["deviation"] = deviation_to_json(dev);
  emit(dump(j), a.output, out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Plan agentic workloads onto heterogeneous accelerators", "agentplan"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML config file; flags on the command line take precedence");

  GraphArgs validate_args;
  auto* validate = app.add_subcommand("validate", "Parse and check an .agraph file");
  validate->add_option("file", validate_args.file, ".agraph file")->required();

  GraphArgs lower_args;
  auto* lower = app.add_subcommand("lower", "Parse, run passes and print the canonical graph");
  lower->add_option("file", lower_args.file, ".agraph file")->required();
  lower->add_option("--passes", lower_args.passes, "Comma-separated pass list")->capture_default_str();
  lower->add_option("--format", lower_args.format)->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  lower->add_option("-o,--output", lower_args.output);
  add_sources(lower, lower_args.sources);

  HwArgs hw_args;
  auto* hw = app.add_subcommand("analyze-hw", "Marginal cost per unit of each hardware resource");
  hw->add_option("--basis", hw_args.basis)->check(CLI::IsMember({"capex", "opex"}))->capture_default_str();
  hw->add_option("--format", hw_args.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  hw->add_option("-o,--output", hw_args.output);
  add_sources(hw, hw_args.sources);

  EstimateArgs est_args;
  auto* est = app.add_subcommand("estimate", "Roofline prefill/decode estimate for one model on one class");
  est->add_option("--model", est_args.model)->required();
  est->add_option("--device", est_args.device)->required();
  est->add_option("--isl", est_args.isl)->required()->check(CLI::PositiveNumber);
  est->add_option("--osl", est_args.osl)->required()->check(CLI::PositiveNumber);
  est->add_option("--batch", est_args.batch)->check(CLI::PositiveNumber)->capture_default_str();
  est->add_option("--tp", est_args.tp)->check(CLI::PositiveNumber)->capture_default_str();
  est->add_option("--pp", est_args.pp)->check(CLI::PositiveNumber)->capture_default_str();
  est->add_option("--prefill-mfu", est_args.prefill_mfu)->capture_default_str();
  est->add_option("--decode-mfu", est_args.decode_mfu)->capture_default_str();
  est->add_option("--mem-efficiency", est_args.mem_efficiency)->capture_default_str();
  est->add_option("-o,--output", est_args.output);
  add_sources(est, est_args.sources);

  PlanArgs plan_args;
  auto* plan = app.add_subcommand("plan", "Solve a task-to-class assignment");
  plan->add_option("--problem", plan_args.problem, "Assignment problem JSON");
  plan->add_option("--graph", plan_args.graph, ".agraph workload");
  plan->add_option("--profile", plan_args.profile, "Measured per-task times/costs JSON");
  plan->add_option("--seed", plan_args.seed, "Solve a random instance from this seed");
  plan->add_option("--mode", plan_args.mode)->check(CLI::IsMember({"fractional", "discrete"}));
  plan->add_option("--sla-scope", plan_args.scope)->check(CLI::IsMember({"per_task", "end_to_end"}));
  plan->add_option("--lambda", plan_args.lambda, "Slack penalty in $/ms, or 'inf' for hard bounds");
  plan->add_option("--e2e-ms", plan_args.e2e_ms);
  plan->add_option("--ttft-ms", plan_args.ttft_ms);
  plan->add_option("--tbt-ms", plan_args.tbt_ms);
  plan->add_option("--batch", plan_args.batch)->check(CLI::PositiveNumber)->capture_default_str();
  plan->add_option("--max-nodes", plan_args.max_nodes)->check(CLI::PositiveNumber)->capture_default_str();
  plan->add_option("-o,--output", plan_args.output);
  add_sources(plan, plan_args.sources);

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("tco-sweep", "Rank prefill::decode class pairs by TCO vs a baseline");
  sweep->add_option("--model", sweep_args.model)->required();
  sweep->add_option("--isl", sweep_args.isl)->required()->check(CLI::PositiveNumber);
  sweep->add_option("--osl", sweep_args.osl)->required()->check(CLI::PositiveNumber);
  sweep->add_option("--sla", sweep_args.sla)->check(CLI::IsMember({"latency", "throughput"}))->capture_default_str();
  sweep->add_option("--ttft-ms", sweep_args.ttft_ms)->capture_default_str();
  sweep->add_option("--tbt-ms", sweep_args.tbt_ms)->capture_default_str();
  sweep->add_option("--baseline", sweep_args.baseline)->capture_default_str();
  sweep->add_option("--pairs", sweep_args.pairs, "Comma-separated P::D labels (default: all ordered pairs)");
  sweep->add_option("--prefill-mfu", sweep_args.prefill_mfu)->capture_default_str();
  sweep->add_option("--decode-mfu", sweep_args.decode_mfu)->capture_default_str();
  sweep->add_option("--format", sweep_args.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  sweep->add_option("-o,--output", sweep_args.output);
  add_sources(sweep, sweep_args.sources);

  SimArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Discrete-event run of a plan");
  sim->add_option("--plan", sim_args.plan, "plan/v1 JSON")->required();
  sim->add_option("--arrivals", sim_args.arrivals, "interval:<ms>, poisson:<rps> or burst:<n>")
      ->capture_default_str();
  sim->add_option("--duration", sim_args.duration, "Horizon in ms")->required();
  sim->add_option("--seed", sim_args.seed)->capture_default_str();
  sim->add_option("--servers", sim_args.servers, "CLASS=N server counts");
  sim->add_flag("--events", sim_args.events, "Include the event log");
  sim->add_option("--tolerance", sim_args.tolerance)->capture_default_str();
  sim->add_option("--format", sim_args.format)->check(CLI::IsMember({"json", "text"}))->capture_default_str();
  sim->add_option("-o,--output", sim_args.output);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (validate->parsed()) return cmd_validate(validate_args, out, err);
    if (lower->parsed()) return cmd_lower(lower_args, out, err);
    if (hw->parsed()) return cmd_analyze_hw(hw_args, out);
    if (est->parsed()) return cmd_estimate(est_args, out);
    if (plan->parsed()) return cmd_plan(plan_args, out);
    if (sweep->parsed()) return cmd_tco_sweep(sweep_args, out);
    if (sim->parsed()) return cmd_simulate(sim_args, out);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed input: " << e.what() << "\n";
    return kExitDomainError;
  }
}

}  // namespace agentplan::cli
