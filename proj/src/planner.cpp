#include "agentplan/planner.hpp"

#include <algorithm>
#include <cmath>

#include "agentplan/error.hpp"
#include "agentplan/graph_json.hpp"
#include "agentplan/passes.hpp"

namespace agentplan {

using nlohmann::json;

const TaskPlacement* PlacementPlan::find(std::string_view id) const noexcept {
  for (const auto& t : tasks) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

namespace {

bool is_port(const TaskNode& n) { return n.kind == TaskKind::Input || n.kind == TaskKind::Output; }

double usd_per_ms(const DeviceClass& d, const CostModelParams& params, int devices) {
  return hourly_cost(d, params) * devices / 3.6e6;
}

struct Candidate {
  bool ok = false;
  double time_ms = 0.0;
  ParallelismConfig par;
  std::string reason;
};

Candidate llm_candidate(const TaskNode& n, const DeviceClass& d, const ModelCatalog& models, const SlaSpec& sla,
                        const PlanOptions& opts) {
  auto model_name = attr_string(n.payload, "model");
  if (!model_name) throw Error(ErrorCode::UnknownModel, "task '" + n.id + "' names no model");
  const ModelSpec& m = models.at(*model_name);
  auto in_tokens = attr_number(n.payload, "in_tokens");
  auto out_tokens = attr_number(n.payload, "out_tokens");
  if (!in_tokens || (n.kind == TaskKind::Decode && !out_tokens)) {
    throw Error(ErrorCode::MissingTokenCounts, "task '" + n.id + "' needs token counts");
  }
  WorkloadShape shape{static_cast<std::int64_t>(*in_tokens),
                      static_cast<std::int64_t>(out_tokens.value_or(0.0)), opts.batch_size};
  Candidate c;
  c.reason = "model does not fit";
  for (int pp : {1, 2}) {
    for (int tp : {1, 2, 4, 8}) {
      if (tp > d.max_per_chassis) continue;
      ParallelismConfig par{tp, pp, 1};
      try {
        if (n.kind == TaskKind::Prefill) {
          PerfOptions po;
          po.static_latency_ms = n.static_latency_ms;
          auto est = prefill_time_ms(m, shape, d, par, opts.prefill_mfu, po);
          if (sla.ttft_ms && est.ttft_ms > *sla.ttft_ms) {
            c.reason = "ttft bound";
            continue;
          }
          return {true, est.ttft_ms, par, ""};
        }
        PerfOptions po;
        po.mem_efficiency = opts.decode_mem_efficiency;
        auto est = decode_time_ms(m, shape, d, par, opts.decode_mfu, po);
        if (sla.tbt_ms && est.tbt_ms > *sla.tbt_ms) {
          c.reason = "tbt bound";
          continue;
        }
        return {true, est.tbt_ms * static_cast<double>(shape.osl_tokens) + n.static_latency_ms, par, ""};
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ModelTooLarge) throw;
      }
    }
  }
  return c;
}

Candidate generic_candidate(const TaskNode& n, const DeviceClass& d) {
  const auto& r = n.demand;
  if (r.mem_capacity_gb > d.mem_capacity_gb) return {false, 0.0, {}, "memory capacity"};
  double ms = 0.0;
  const double compute_tflops = r.hp_compute_fp8_tflops && d.tflops_fp8 ? *d.tflops_fp8 : d.tflops_fp16;
  const double compute_work = r.hp_compute_fp8_tflops && d.tflops_fp8 ? *r.hp_compute_fp8_tflops : r.hp_compute_tflops;
  if (compute_work > 0.0) ms = std::max(ms, compute_work / compute_tflops * 1000.0);
  if (r.mem_bandwidth_gbps_bytes > 0.0) ms = std::max(ms, r.mem_bandwidth_gbps_bytes / d.mem_bandwidth_gbps_bytes * 1000.0);
  if (r.net_bandwidth_gbps_bits > 0.0) ms = std::max(ms, r.net_bandwidth_gbps_bits / d.scaleout_bw_gbps_bits * 1000.0);
  if (r.gp_compute_units > 0.0) ms = std::max(ms, r.gp_compute_units / d.gp_compute_units.value_or(1.0) * 1000.0);
  return {true, ms + n.static_latency_ms, {}, ""};
}

std::string edge_key(const std::string& src, const std::string& dst) { return src + "->" + dst; }

}  // namespace

AssignmentProblem build_plan_problem(const TaskGraph& lowered, const HardwareCatalog& catalog,
                                     const ModelCatalog& models, const SlaSpec& sla, const PlanOptions& opts,
                                     std::vector<std::vector<ParallelismConfig>>* parallelism) {
  AssignmentProblem p;
  p.mode = SolveMode::Discrete;
  p.gamma = 0.0;
  p.sla = sla;
  p.resources = {{"time_ms", true}, {"usd", false}};
  for (const auto& c : catalog.classes) p.classes.push_back(c.name);
  const std::size_t h = p.n_classes();
  p.perf.assign(h, {1.0, 1.0});
  p.unit_cost.assign(h, {0.0, 1.0});

  std::map<std::string, int> index;
  std::vector<const TaskNode*> nodes;
  for (const auto& n : lowered.nodes) {
    if (is_port(n)) continue;
    index[n.id] = static_cast<int>(nodes.size());
    nodes.push_back(&n);
    p.tasks.push_back(n.id);
  }
  const std::size_t nt = nodes.size();
  p.theta.assign(nt, std::vector<std::vector<double>>(h, {0.0, 0.0}));
  p.allowed.assign(nt, std::vector<bool>(h, true));
  std::vector<std::vector<ParallelismConfig>> par(nt, std::vector<ParallelismConfig>(h));
  const PlanProfile* profile = opts.profile ? &*opts.profile : nullptr;

  for (std::size_t i = 0; i < nt; ++i) {
    const TaskNode& n = *nodes[i];
    const std::map<std::string, PlanProfile::Entry>* measured = nullptr;
    std::string reasons;
    if (profile) {
      if (auto it = profile->tasks.find(n.id); it != profile->tasks.end()) measured = &it->second;
    }
    for (std::size_t j = 0; j < h; ++j) {
      const DeviceClass& d = catalog.classes[j];
      if (measured) {
        auto it = measured->find(d.name);
        if (it == measured->end()) {
          p.allowed[i][j] = false;
          continue;
        }
        p.theta[i][j] = {it->second.time_ms, it->second.cost_usd};
        continue;
      }
      const bool llm = n.kind == TaskKind::Prefill || n.kind == TaskKind::Decode;
      Candidate c = llm ? llm_candidate(n, d, models, sla, opts) : generic_candidate(n, d);
      if (!c.ok) {
        p.allowed[i][j] = false;
        reasons += (reasons.empty() ? "" : ", ") + d.name + ": " + c.reason;
        continue;
      }
      par[i][j] = c.par;
      p.theta[i][j] = {c.time_ms, c.time_ms * usd_per_ms(d, catalog.cost_params, c.par.devices())};
    }
    if (h > 0 && std::none_of(p.allowed[i].begin(), p.allowed[i].end(), [](bool b) { return b; })) {
      throw Error(ErrorCode::Infeasible, "binding constraint: task '" + n.id + "' fits no class (" +
                                             (measured ? std::string("no profiled class") : reasons) + ")");
    }
  }
  p.fill_defaults();

  for (const auto& e : lowered.edges) {
    auto s = index.find(e.src);
    auto t = index.find(e.dst);
    if (s == index.end() || t == index.end()) continue;
    ProblemEdge pe;
    pe.src = s->second;
    pe.dst = t->second;
    pe.comm.assign(h, std::vector<EdgeComm>(h));
    const std::map<std::string, EdgeComm>* measured = nullptr;
    if (profile) {
      if (auto it = profile->transfers.find(edge_key(e.src, e.dst)); it != profile->transfers.end()) {
        measured = &it->second;
      }
    }
    for (std::size_t a = 0; a < h; ++a) {
      for (std::size_t b = 0; b < h; ++b) {
        if (measured) {
          auto it = measured->find(edge_key(p.classes[a], p.classes[b]));
          if (it != measured->end()) pe.comm[a][b] = it->second;
          continue;
        }
        if (a == b || e.transfer_bytes == 0) continue;
        const DeviceClass& da = catalog.classes[a];
        const DeviceClass& db = catalog.classes[b];
        const double bytes = static_cast<double>(e.transfer_bytes) * static_cast<double>(opts.batch_size);
        const double link = std::min(da.scaleout_bw_gbps_bits, db.scaleout_bw_gbps_bits);
        const double ms = bytes * 8.0 / (link * 1e9) * 1000.0 + opts.hop_latency_ms;
        pe.comm[a][b] = {ms, ms * usd_per_ms(db, catalog.cost_params, std::max(1, par[pe.dst][b].devices()))};
      }
    }
    p.edges.push_back(std::move(pe));
  }
  if (parallelism) *parallelism = std::move(par);
  return p;
}

namespace {

/// Fills predictions from placements and transfers on `plan.graph`.
void predict(PlacementPlan& plan) {
  std::map<std::string, double> node_ms;
  for (const auto& n : plan.graph.nodes) node_ms[n.id] = 0.0;
  for (const auto& t : plan.tasks) node_ms[t.id] = t.time_ms;
  std::map<EdgeKey, double> edge_ms;
  for (const auto& tr : plan.transfers) edge_ms[{tr.src, tr.dst}] = tr.ms;
  plan.e2e_ms = plan.graph.nodes.empty() ? 0.0 : critical_path_ms(plan.graph, node_ms, edge_ms);

  std::map<std::string, double> finish;
  const auto order = plan.graph.nodes.empty() ? std::vector<std::string>{} : topological_order(plan.graph);
  bool ttft_set = false;
  for (const auto& id : order) {
    double start = 0.0;
    for (const auto* e : plan.graph.in_edges(id)) {
      auto em = edge_ms.find({e->src, e->dst});
      start = std::max(start, finish[e->src] + (em == edge_ms.end() ? 0.0 : em->second));
    }
    finish[id] = start + node_ms[id];
    const TaskNode* n = plan.graph.find(id);
    if (n->kind == TaskKind::Prefill && !ttft_set) {
      plan.ttft_ms = finish[id];
      ttft_set = true;
    }
  }
  plan.tbt_ms = 0.0;
  plan.tokens_per_request = 0.0;
  for (const auto& t : plan.tasks) {
    if (t.kind != TaskKind::Decode) continue;
    const TaskNode* n = plan.graph.find(t.id);
    const double out = n ? attr_number(n->payload, "out_tokens").value_or(0.0) : 0.0;
    plan.tokens_per_request += out;
    if (out > 0.0) plan.tbt_ms = std::max(plan.tbt_ms, t.time_ms / out);
  }
  plan.cost_usd = 0.0;
  for (const auto& t : plan.tasks) plan.cost_usd += t.cost_usd;
  for (const auto& tr : plan.transfers) plan.cost_usd += tr.cost_usd;
  plan.tokens_per_sec = plan.e2e_ms > 0.0 ? plan.tokens_per_request * 1000.0 / plan.e2e_ms : 0.0;
  plan.cost_per_1m_tokens = plan.tokens_per_request > 0.0 ? plan.cost_usd / plan.tokens_per_request * 1e6 : 0.0;

  const TaskPlacement* prefill = nullptr;
  const TaskPlacement* decode = nullptr;
  std::vector<std::string> classes;
  for (const auto& id : order) {
    const TaskPlacement* t = plan.find(id);
    if (!t) continue;
    if (t->kind == TaskKind::Prefill && !prefill) prefill = t;
    if (t->kind == TaskKind::Decode && !decode) decode = t;
    if (std::find(classes.begin(), classes.end(), t->device_class) == classes.end()) classes.push_back(t->device_class);
  }
  if (prefill && decode) {
    plan.label = prefill->device_class + "::" + decode->device_class;
  } else {
    plan.label.clear();
    for (const auto& c : classes) plan.label += (plan.label.empty() ? "" : "+") + c;
  }
}

TaskKind kind_from_name(const std::string& name) {
  auto ends_with = [&](std::string_view suffix) {
    return name == suffix.substr(1) ||
           (name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0);
  };
  if (ends_with(".prefill")) return TaskKind::Prefill;
  if (ends_with(".decode")) return TaskKind::Decode;
  return TaskKind::GeneralCompute;
}

}  // namespace

PlacementPlan plan_graph(const TaskGraph& g, const HardwareCatalog& catalog, const ModelCatalog& models,
                         const SlaSpec& sla, const PlanOptions& opts) {
  sla.validate();
  PipelineOptions popts;
  popts.models = models;
  TaskGraph lowered = normalize(run_pipeline(g, opts.passes, popts).graph);

  PlacementPlan plan;
  plan.graph = lowered;
  std::vector<std::vector<ParallelismConfig>> par;
  AssignmentProblem p = build_plan_problem(lowered, catalog, models, sla, opts, &par);
  if (p.tasks.empty()) {
    predict(plan);
    return plan;
  }
  const Assignment a = solve_discrete(p, opts.solver);
  const auto choice = a.choice();
  for (std::size_t i = 0; i < p.n_tasks(); ++i) {
    const int j = choice[i];
    TaskPlacement t;
    t.id = p.tasks[i];
    t.kind = lowered.find(t.id)->kind;
    t.device_class = p.classes[j];
    t.par = par[i][j];
    t.time_ms = compute_tij(p, i, j);
    t.cost_usd = compute_cost_ij(p, i, j);
    plan.tasks.push_back(std::move(t));
  }
  for (const auto& e : p.edges) {
    const GraphEdge* ge = lowered.find_edge(p.tasks[e.src], p.tasks[e.dst]);
    const EdgeComm& c = e.comm[choice[e.src]][choice[e.dst]];
    plan.transfers.push_back({ge->src, ge->dst, ge->transfer_bytes * static_cast<std::uint64_t>(opts.batch_size),
                              c.latency_ms, c.cost_usd});
  }
  predict(plan);
  plan.objective = a.objective;
  return plan;
}

PlacementPlan plan_from_problem(const AssignmentProblem& p, const Assignment& a) {
  const auto choice = a.choice();
  if (choice.size() != p.n_tasks() || std::any_of(choice.begin(), choice.end(), [](int c) { return c < 0; })) {
    throw Error(ErrorCode::InvalidPlan, "plan needs an integral assignment");
  }
  PlacementPlan plan;
  plan.graph.name = "problem";
  for (std::size_t i = 0; i < p.n_tasks(); ++i) {
    TaskNode n;
    n.id = p.tasks[i];
    n.kind = kind_from_name(n.id);
    plan.graph.nodes.push_back(n);
    TaskPlacement t;
    t.id = n.id;
    t.kind = n.kind;
    t.device_class = p.classes[choice[i]];
    t.time_ms = compute_tij(p, i, choice[i]);
    t.cost_usd = compute_cost_ij(p, i, choice[i]);
    plan.tasks.push_back(std::move(t));
  }
  auto link = [&](std::size_t s, std::size_t d) {
    GraphEdge e;
    e.src = p.tasks[s];
    e.dst = p.tasks[d];
    plan.graph.edges.push_back(std::move(e));
  };
  if (p.mode == SolveMode::Discrete && !p.edges.empty()) {
    for (const auto& e : p.edges) {
      link(e.src, e.dst);
      const EdgeComm& c = e.comm[choice[e.src]][choice[e.dst]];
      plan.transfers.push_back({p.tasks[e.src], p.tasks[e.dst], 0, c.latency_ms, c.cost_usd});
    }
  } else {
    // Without edges the optimizer serializes tasks; a chain keeps that meaning.
    for (std::size_t i = 0; i + 1 < p.n_tasks(); ++i) link(i, i + 1);
  }
  for (const auto& n : plan.graph.nodes) {
    if (plan.graph.in_edges(n.id).empty()) plan.graph.inputs.push_back(n.id);
    if (plan.graph.out_edges(n.id).empty()) plan.graph.outputs.push_back(n.id);
  }
  predict(plan);
  plan.objective = a.objective;
  return plan;
}

json plan_to_json(const PlacementPlan& plan) {
  json tasks = json::array();
  for (const auto& t : plan.tasks) {
    tasks.push_back({{"id", t.id},
                     {"kind", std::string(to_string(t.kind))},
                     {"class", t.device_class},
                     {"tp", t.par.tp_degree},
                     {"pp", t.par.pp_degree},
                     {"replicas", t.par.replicas},
                     {"time_ms", t.time_ms},
                     {"cost_usd", t.cost_usd}});
  }
  json transfers = json::array();
  for (const auto& tr : plan.transfers) {
    transfers.push_back(
        {{"src", tr.src}, {"dst", tr.dst}, {"bytes", tr.bytes}, {"ms", tr.ms}, {"cost_usd", tr.cost_usd}});
  }
  return json{{"schema", "plan/v1"},
              {"label", plan.label},
              {"graph", plan.graph},
              {"tasks", std::move(tasks)},
              {"transfers", std::move(transfers)},
              {"predicted",
               {{"ttft_ms", plan.ttft_ms},
                {"tbt_ms", plan.tbt_ms},
                {"e2e_ms", plan.e2e_ms},
                {"tokens_per_sec", plan.tokens_per_sec},
                {"tokens_per_request", plan.tokens_per_request}}},
              {"cost_usd", plan.cost_usd},
              {"cost_per_1m_tokens", plan.cost_per_1m_tokens},
              {"objective", plan.objective}};
}

PlacementPlan plan_from_json(const json& j) {
  try {
    if (j.value("schema", std::string()) != "plan/v1") throw Error(ErrorCode::InvalidPlan, "expected schema plan/v1");
    PlacementPlan plan;
    plan.label = j.value("label", std::string());
    plan.graph = j.at("graph").get<TaskGraph>();
    for (const auto& jt : j.at("tasks")) {
      TaskPlacement t;
      t.id = jt.at("id").get<std::string>();
      auto kind = parse_task_kind(jt.value("kind", std::string("general_compute")));
      if (!kind) throw Error(ErrorCode::InvalidPlan, "task '" + t.id + "' has an unknown kind");
      t.kind = *kind;
      t.device_class = jt.at("class").get<std::string>();
      t.par = {jt.value("tp", 1), jt.value("pp", 1), jt.value("replicas", 1)};
      t.time_ms = jt.at("time_ms").get<double>();
      t.cost_usd = jt.value("cost_usd", 0.0);
      plan.tasks.push_back(std::move(t));
    }
    for (const auto& jt : j.value("transfers", json::array())) {
      plan.transfers.push_back({jt.at("src").get<std::string>(), jt.at("dst").get<std::string>(),
                                jt.value("bytes", std::uint64_t{0}), jt.at("ms").get<double>(),
                                jt.value("cost_usd", 0.0)});
    }
    const json& pred = j.at("predicted");
    plan.ttft_ms = pred.value("ttft_ms", 0.0);
    plan.tbt_ms = pred.value("tbt_ms", 0.0);
    plan.e2e_ms = pred.value("e2e_ms", 0.0);
    plan.tokens_per_sec = pred.value("tokens_per_sec", 0.0);
    plan.tokens_per_request = pred.value("tokens_per_request", 0.0);
    plan.cost_usd = j.value("cost_usd", 0.0);
    plan.cost_per_1m_tokens = j.value("cost_per_1m_tokens", 0.0);
    plan.objective = j.value("objective", 0.0);
    return plan;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidPlan, e.what());
  }
}

PlanProfile profile_from_json(const json& j) {
  PlanProfile p;
  const json tasks = j.value("tasks", json::object());
  const json transfers = j.value("transfers", json::object());
  for (const auto& [task, per_class] : tasks.items()) {
    for (const auto& [cls, entry] : per_class.items()) {
      p.tasks[task][cls] = {entry.at("time_ms").get<double>(), entry.value("cost_usd", 0.0)};
    }
  }
  for (const auto& [edge, per_pair] : transfers.items()) {
    for (const auto& [pair, entry] : per_pair.items()) {
      p.transfers[edge][pair] = {entry.value("latency_ms", 0.0), entry.value("cost_usd", 0.0)};
    }
  }
  return p;
}

}  // namespace agentplan
