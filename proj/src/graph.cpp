#include "agentplan/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <unordered_map>

#include "agentplan/error.hpp"

namespace agentplan {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnboundedCycle: return "UnboundedCycle";
    case ErrorCode::CyclicGraph: return "CyclicGraph";
    case ErrorCode::PortMismatch: return "PortMismatch";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::UnknownReference: return "UnknownReference";
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::MissingTokenCounts: return "MissingTokenCounts";
    case ErrorCode::PlanMismatch: return "PlanMismatch";
    case ErrorCode::MissingTdp: return "MissingTdp";
    case ErrorCode::ModelTooLarge: return "ModelTooLarge";
    case ErrorCode::ZeroPerf: return "ZeroPerf";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonlinearConstraint: return "NonlinearConstraint";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::CycleLimit: return "CycleLimit";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::BaselineInfeasible: return "BaselineInfeasible";
    case ErrorCode::BaselineMissing: return "BaselineMissing";
    case ErrorCode::InvalidPlan: return "InvalidPlan";
    case ErrorCode::ZeroDuration: return "ZeroDuration";
  }
  return "Unknown";
}

namespace {

struct KindName {
  TaskKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {TaskKind::Input, "input"},
    {TaskKind::Output, "output"},
    {TaskKind::Agent, "agent"},
    {TaskKind::ModelExec, "model_exec"},
    {TaskKind::Prefill, "prefill"},
    {TaskKind::Decode, "decode"},
    {TaskKind::ToolCall, "tool_call"},
    {TaskKind::MemoryLookup, "memory_lookup"},
    {TaskKind::KvStore, "kv_store"},
    {TaskKind::GeneralCompute, "general_compute"},
    {TaskKind::ControlFlow, "control_flow"},
    {TaskKind::ObservationStore, "observation_store"},
};

}  // namespace

std::string_view to_string(TaskKind kind) noexcept {
  for (const auto& entry : kKindNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "general_compute";
}

std::optional<TaskKind> parse_task_kind(std::string_view name) noexcept {
  if (name == "llm") return TaskKind::ModelExec;
  if (name == "tool") return TaskKind::ToolCall;
  for (const auto& entry : kKindNames) {
    if (entry.name == name) return entry.kind;
  }
  return std::nullopt;
}

std::string_view to_string(EdgeMode mode) noexcept { return mode == EdgeMode::Sync ? "sync" : "async"; }
std::string_view to_string(EdgeKind kind) noexcept { return kind == EdgeKind::Data ? "data" : "kv_store"; }
std::string_view to_string(SlaMode mode) noexcept { return mode == SlaMode::Latency ? "latency" : "throughput"; }
std::string_view to_string(SlaScope scope) noexcept {
  return scope == SlaScope::PerTask ? "per_task" : "end_to_end";
}

bool ResourceVector::non_negative() const noexcept {
  auto ok = [](double v) { return v >= 0.0; };  // NaN fails
  return ok(hp_compute_tflops) && (!hp_compute_fp8_tflops || ok(*hp_compute_fp8_tflops)) &&
         ok(mem_bandwidth_gbps_bytes) && ok(mem_capacity_gb) && ok(net_bandwidth_gbps_bits) &&
         ok(disk_capacity_gb) && ok(gp_compute_units);
}

bool ResourceVector::is_zero() const noexcept {
  return hp_compute_tflops == 0.0 && hp_compute_fp8_tflops.value_or(0.0) == 0.0 &&
         mem_bandwidth_gbps_bytes == 0.0 && mem_capacity_gb == 0.0 && net_bandwidth_gbps_bits == 0.0 &&
         disk_capacity_gb == 0.0 && gp_compute_units == 0.0;
}

ResourceVector& ResourceVector::operator+=(const ResourceVector& other) {
  hp_compute_tflops += other.hp_compute_tflops;
  if (other.hp_compute_fp8_tflops) {
    hp_compute_fp8_tflops = hp_compute_fp8_tflops.value_or(0.0) + *other.hp_compute_fp8_tflops;
  }
  mem_bandwidth_gbps_bytes += other.mem_bandwidth_gbps_bytes;
  mem_capacity_gb += other.mem_capacity_gb;
  net_bandwidth_gbps_bits += other.net_bandwidth_gbps_bits;
  disk_capacity_gb += other.disk_capacity_gb;
  gp_compute_units += other.gp_compute_units;
  return *this;
}

std::optional<double> attr_number(const Attributes& attrs, const std::string& key) {
  auto it = attrs.find(key);
  if (it == attrs.end()) return std::nullopt;
  if (const auto* i = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&it->second)) return *d;
  return std::nullopt;
}

std::optional<std::string> attr_string(const Attributes& attrs, const std::string& key) {
  auto it = attrs.find(key);
  if (it == attrs.end()) return std::nullopt;
  if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
  return std::nullopt;
}

bool TaskNode::operator==(const TaskNode& other) const {
  if (id != other.id || kind != other.kind || !(demand == other.demand) ||
      static_latency_ms != other.static_latency_ms || payload != other.payload) {
    return false;
  }
  if (static_cast<bool>(subgraph) != static_cast<bool>(other.subgraph)) return false;
  return !subgraph || *subgraph == *other.subgraph;
}

const TaskNode* TaskGraph::find(std::string_view id) const noexcept {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

TaskNode* TaskGraph::find(std::string_view id) noexcept {
  for (auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

const GraphEdge* TaskGraph::find_edge(std::string_view src, std::string_view dst) const noexcept {
  for (const auto& e : edges) {
    if (e.src == src && e.dst == dst) return &e;
  }
  return nullptr;
}

std::vector<const GraphEdge*> TaskGraph::in_edges(std::string_view id) const {
  std::vector<const GraphEdge*> out;
  for (const auto& e : edges) {
    if (e.dst == id) out.push_back(&e);
  }
  return out;
}

std::vector<const GraphEdge*> TaskGraph::out_edges(std::string_view id) const {
  std::vector<const GraphEdge*> out;
  for (const auto& e : edges) {
    if (e.src == id) out.push_back(&e);
  }
  return out;
}

bool TaskGraph::operator==(const TaskGraph& other) const {
  return name == other.name && nodes == other.nodes && edges == other.edges && inputs == other.inputs &&
         outputs == other.outputs;
}

namespace {

/// Dense index over node ids; edges whose endpoints are unknown are dropped.
struct Indexed {
  std::vector<std::string> ids;
  std::unordered_map<std::string, int> index;
  std::vector<std::vector<int>> succ;

  Indexed(const TaskGraph& g, bool include_annotated) {
    for (const auto& n : g.nodes) {
      if (index.emplace(n.id, static_cast<int>(ids.size())).second) ids.push_back(n.id);
    }
    succ.resize(ids.size());
    for (const auto& e : g.edges) {
      if (!include_annotated && e.loop_annotation) continue;
      auto s = index.find(e.src);
      auto d = index.find(e.dst);
      if (s == index.end() || d == index.end()) continue;
      succ[s->second].push_back(d->second);
    }
  }
};

/// Tarjan's algorithm. Components are returned with sorted member indices.
std::vector<std::vector<int>> strongly_connected(const std::vector<std::vector<int>>& succ) {
  const int n = static_cast<int>(succ.size());
  std::vector<int> order(n, -1), low(n, 0), stack;
  std::vector<bool> on_stack(n, false);
  std::vector<std::vector<int>> comps;
  int counter = 0;
  std::function<void(int)> visit = [&](int v) {
    order[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (int w : succ[v]) {
      if (order[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], order[w]);
      }
    }
    if (low[v] == order[v]) {
      std::vector<int> comp;
      int w = -1;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      comps.push_back(std::move(comp));
    }
  };
  for (int v = 0; v < n; ++v) {
    if (order[v] < 0) visit(v);
  }
  return comps;
}

bool has_self_loop(const std::vector<std::vector<int>>& succ, int v) {
  return std::find(succ[v].begin(), succ[v].end(), v) != succ[v].end();
}

std::optional<std::vector<std::string>> try_topological(const TaskGraph& g, bool include_annotated) {
  Indexed idx(g, include_annotated);
  const int n = static_cast<int>(idx.ids.size());
  std::vector<int> indegree(n, 0);
  for (const auto& s : idx.succ) {
    for (int d : s) ++indegree[d];
  }
  auto by_id = [&](int a, int b) { return idx.ids[a] > idx.ids[b]; };
  std::priority_queue<int, std::vector<int>, decltype(by_id)> ready(by_id);
  for (int v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    order.push_back(idx.ids[v]);
    for (int d : idx.succ[v]) {
      if (--indegree[d] == 0) ready.push(d);
    }
  }
  if (static_cast<int>(order.size()) != n) return std::nullopt;
  return order;
}

}  // namespace

std::vector<std::string> topological_order(const TaskGraph& g) {
  auto order = try_topological(g, false);
  if (!order) throw Error(ErrorCode::CyclicGraph, "graph '" + g.name + "' contains an unannotated cycle");
  return *order;
}

TaskGraph normalize(const TaskGraph& g) {
  TaskGraph out;
  out.name = g.name;
  auto order = try_topological(g, false);
  std::vector<std::string> ids;
  if (order) {
    ids = *order;
  } else {
    for (const auto& n : g.nodes) ids.push_back(n.id);
    std::sort(ids.begin(), ids.end());
  }
  std::set<std::string> placed;
  for (const auto& id : ids) {
    if (!placed.insert(id).second) continue;
    TaskNode node = *g.find(id);
    if (node.subgraph) node.subgraph = std::make_shared<const TaskGraph>(normalize(*node.subgraph));
    out.nodes.push_back(std::move(node));
  }
  out.edges = g.edges;
  std::sort(out.edges.begin(), out.edges.end(),
            [](const GraphEdge& a, const GraphEdge& b) { return std::tie(a.src, a.dst) < std::tie(b.src, b.dst); });
  out.inputs = g.inputs;
  out.outputs = g.outputs;
  std::sort(out.inputs.begin(), out.inputs.end());
  std::sort(out.outputs.begin(), out.outputs.end());
  return out;
}

bool structurally_equal(const TaskGraph& a, const TaskGraph& b) { return normalize(a) == normalize(b); }

std::vector<Diagnostic> validate_graph(const TaskGraph& g) {
  std::vector<Diagnostic> diags;
  std::set<std::string> ids;
  for (const auto& n : g.nodes) {
    if (n.id.empty()) {
      diags.push_back({"empty-id", "", "node with empty id"});
    } else if (!ids.insert(n.id).second) {
      diags.push_back({"duplicate-id", n.id, "node id declared more than once"});
    }
    if (!(n.static_latency_ms >= 0.0) || !std::isfinite(n.static_latency_ms)) {
      diags.push_back({"negative-latency", n.id, "static_latency_ms must be finite and >= 0"});
    }
    if (!n.demand.non_negative()) {
      diags.push_back({"negative-demand", n.id, "resource demand components must be >= 0"});
    }
    if (n.kind == TaskKind::Agent) {
      if (!n.subgraph) {
        diags.push_back({"agent-without-subgraph", n.id, "agent node has no nested graph"});
      } else {
        if (n.subgraph->inputs.empty() || n.subgraph->outputs.empty()) {
          diags.push_back({"agent-missing-ports", n.id, "nested graph must declare inputs and outputs"});
        }
        for (auto d : validate_graph(*n.subgraph)) {
          d.subject = n.id + "/" + d.subject;
          diags.push_back(std::move(d));
        }
      }
    } else if (n.subgraph) {
      diags.push_back({"unexpected-subgraph", n.id, "only agent nodes may hold a nested graph"});
    }
  }

  std::set<EdgeKey> seen_edges;
  for (const auto& e : g.edges) {
    const std::string subject = e.src + "->" + e.dst;
    if (!ids.count(e.src) || !ids.count(e.dst)) {
      diags.push_back({"dangling-edge", subject, "edge references a missing node"});
      continue;
    }
    if (!seen_edges.insert({e.src, e.dst}).second) {
      diags.push_back({"duplicate-edge", subject, "edge declared more than once"});
    }
    if (e.loop_annotation && *e.loop_annotation < 1) {
      diags.push_back({"invalid-loop-bound", subject, "loop annotation must be >= 1"});
    }
  }

  for (const auto& p : g.inputs) {
    if (!ids.count(p)) {
      diags.push_back({"unknown-port", p, "input port names a missing node"});
    } else if (!g.in_edges(p).empty()) {
      diags.push_back({"input-has-incoming", p, "input port has incoming edges"});
    }
  }
  for (const auto& p : g.outputs) {
    if (!ids.count(p)) {
      diags.push_back({"unknown-port", p, "output port names a missing node"});
    } else if (!g.out_edges(p).empty()) {
      diags.push_back({"output-has-outgoing", p, "output port has outgoing edges"});
    }
  }

  Indexed fwd(g, false);
  for (const auto& comp : strongly_connected(fwd.succ)) {
    if (comp.size() < 2 && !has_self_loop(fwd.succ, comp.front())) continue;
    std::set<int> members(comp.begin(), comp.end());
    std::optional<EdgeKey> witness;
    for (const auto& e : g.edges) {
      if (e.loop_annotation) continue;
      auto s = fwd.index.find(e.src);
      auto d = fwd.index.find(e.dst);
      if (s == fwd.index.end() || d == fwd.index.end()) continue;
      if (members.count(s->second) && members.count(d->second)) {
        EdgeKey key{e.src, e.dst};
        if (!witness || key < *witness) witness = key;
      }
    }
    diags.push_back({"unbounded-cycle", witness->first + "->" + witness->second,
                     "cycle without a loop annotation"});
  }
  return diags;
}

namespace {

bool strongly_connected_without(const TaskGraph& g, const std::set<std::string>& members, const GraphEdge* skip) {
  if (members.size() <= 1) return true;
  std::map<std::string, std::vector<std::string>> fwd, bwd;
  for (const auto& e : g.edges) {
    if (&e == skip) continue;
    if (members.count(e.src) && members.count(e.dst)) {
      fwd[e.src].push_back(e.dst);
      bwd[e.dst].push_back(e.src);
    }
  }
  auto reach_all = [&](const std::map<std::string, std::vector<std::string>>& adj) {
    std::set<std::string> seen{*members.begin()};
    std::vector<std::string> work{*members.begin()};
    while (!work.empty()) {
      auto v = work.back();
      work.pop_back();
      auto it = adj.find(v);
      if (it == adj.end()) continue;
      for (const auto& w : it->second) {
        if (seen.insert(w).second) work.push_back(w);
      }
    }
    return seen.size() == members.size();
  };
  return reach_all(fwd) && reach_all(bwd);
}

std::string fresh_id(const std::string& base, std::set<std::string>& taken) {
  std::string id = base;
  for (int n = 2; taken.count(id); ++n) id = base + "_" + std::to_string(n);
  taken.insert(id);
  return id;
}

TaskGraph unroll_one(const TaskGraph& g, const std::set<std::string>& body, const GraphEdge& back) {
  const int k = *back.loop_annotation;
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "loop annotation must be >= 1 on " + back.src + "->" + back.dst);

  std::set<std::string> taken;
  for (const auto& n : g.nodes) taken.insert(n.id);

  // copies[t][id] for t in [0, k)
  std::vector<std::map<std::string, std::string>> copies(static_cast<std::size_t>(k));
  for (const auto& n : g.nodes) {
    if (body.count(n.id)) copies[0][n.id] = n.id;
  }
  TaskGraph out;
  out.name = g.name;
  out.inputs = g.inputs;
  out.outputs = g.outputs;
  out.nodes = g.nodes;
  for (int t = 1; t < k; ++t) {
    for (const auto& n : g.nodes) {
      if (!body.count(n.id)) continue;
      TaskNode copy = n;
      copy.id = fresh_id(n.id + "#" + std::to_string(t), taken);
      copies[t][n.id] = copy.id;
      out.nodes.push_back(std::move(copy));
    }
  }

  for (const auto& e : g.edges) {
    if (&e == &back) continue;
    const bool src_in = body.count(e.src) > 0;
    const bool dst_in = body.count(e.dst) > 0;
    if (src_in && dst_in) {
      for (int t = 0; t < k; ++t) {
        GraphEdge c = e;
        c.src = copies[t][e.src];
        c.dst = copies[t][e.dst];
        out.edges.push_back(std::move(c));
      }
    } else if (src_in) {
      GraphEdge c = e;
      c.src = copies[k - 1][e.src];
      out.edges.push_back(std::move(c));
    } else {
      out.edges.push_back(e);
    }
  }
  for (int t = 0; t + 1 < k; ++t) {
    GraphEdge c = back;
    c.loop_annotation.reset();
    c.src = copies[t][back.src];
    c.dst = copies[t + 1][back.dst];
    out.edges.push_back(std::move(c));
  }
  return out;
}

}  // namespace

TaskGraph unroll_cycles(const TaskGraph& g) {
  TaskGraph cur = g;
  for (;;) {
    Indexed all(cur, true);
    std::vector<std::vector<int>> cyclic;
    for (auto& comp : strongly_connected(all.succ)) {
      if (comp.size() > 1 || has_self_loop(all.succ, comp.front())) cyclic.push_back(std::move(comp));
    }
    if (cyclic.empty()) break;

    // Deterministic choice: the component holding the smallest id.
    std::set<std::string> body;
    {
      std::optional<std::string> best_min;
      std::size_t best = 0;
      for (std::size_t c = 0; c < cyclic.size(); ++c) {
        std::string m = all.ids[cyclic[c].front()];
        for (int v : cyclic[c]) m = std::min(m, all.ids[v]);
        if (!best_min || m < *best_min) {
          best_min = m;
          best = c;
        }
      }
      for (int v : cyclic[best]) body.insert(all.ids[v]);
    }

    std::vector<const GraphEdge*> annotated;
    for (const auto& e : cur.edges) {
      if (e.loop_annotation && body.count(e.src) && body.count(e.dst)) annotated.push_back(&e);
    }
    if (annotated.empty()) {
      throw Error(ErrorCode::UnboundedCycle, "cycle through '" + *body.begin() + "' has no loop annotation");
    }
    std::sort(annotated.begin(), annotated.end(), [](const GraphEdge* a, const GraphEdge* b) {
      return std::tie(a->src, a->dst) < std::tie(b->src, b->dst);
    });
    // The outermost loop edge is the one whose removal splits the component.
    const GraphEdge* outer = annotated.front();
    for (const auto* e : annotated) {
      if (!strongly_connected_without(cur, body, e)) {
        outer = e;
        break;
      }
    }
    cur = unroll_one(cur, body, *outer);
  }
  for (auto& e : cur.edges) e.loop_annotation.reset();
  return cur;
}

double critical_path_ms(const TaskGraph& g, const std::map<std::string, double>& node_ms,
                        const std::map<EdgeKey, double>& edge_ms) {
  auto order = try_topological(g, true);
  if (!order) throw Error(ErrorCode::CyclicGraph, "critical path requires an acyclic graph");
  std::map<std::string, double> finish;
  double longest = 0.0;
  for (const auto& id : *order) {
    auto t = node_ms.find(id);
    if (t == node_ms.end()) throw Error(ErrorCode::InvalidArgument, "no time given for node '" + id + "'");
    double start = 0.0;
    for (const auto* e : g.in_edges(id)) {
      auto lat = edge_ms.find({e->src, e->dst});
      double arrive = finish.at(e->src) + (lat == edge_ms.end() ? 0.0 : lat->second);
      start = std::max(start, arrive);
    }
    finish[id] = start + t->second;
    longest = std::max(longest, finish[id]);
  }
  return longest;
}

TaskGraph flatten_hierarchy(const TaskGraph& g) {
  TaskGraph out;
  out.name = g.name;
  std::map<std::string, std::vector<std::string>> entry, exit;

  for (const auto& n : g.nodes) {
    if (n.kind != TaskKind::Agent) {
      out.nodes.push_back(n);
      continue;
    }
    if (!n.subgraph) throw Error(ErrorCode::PortMismatch, "agent '" + n.id + "' has no nested graph");
    TaskGraph inner = flatten_hierarchy(*n.subgraph);
    const std::string prefix = n.id + ".";
    for (const auto& p : inner.inputs) {
      if (!inner.contains(p)) throw Error(ErrorCode::PortMismatch, "agent '" + n.id + "' input port '" + p + "' missing");
    }
    for (const auto& p : inner.outputs) {
      if (!inner.contains(p)) throw Error(ErrorCode::PortMismatch, "agent '" + n.id + "' output port '" + p + "' missing");
    }
    if (inner.inputs.empty() && (!g.in_edges(n.id).empty() || std::count(g.inputs.begin(), g.inputs.end(), n.id))) {
      throw Error(ErrorCode::PortMismatch, "agent '" + n.id + "' is fed but its nested graph has no inputs");
    }
    if (inner.outputs.empty() &&
        (!g.out_edges(n.id).empty() || std::count(g.outputs.begin(), g.outputs.end(), n.id))) {
      throw Error(ErrorCode::PortMismatch, "agent '" + n.id + "' is consumed but its nested graph has no outputs");
    }
    for (auto inner_node : inner.nodes) {
      inner_node.id = prefix + inner_node.id;
      out.nodes.push_back(std::move(inner_node));
    }
    for (auto e : inner.edges) {
      e.src = prefix + e.src;
      e.dst = prefix + e.dst;
      out.edges.push_back(std::move(e));
    }
    for (const auto& p : inner.inputs) entry[n.id].push_back(prefix + p);
    for (const auto& p : inner.outputs) exit[n.id].push_back(prefix + p);
  }

  std::set<EdgeKey> present;
  for (const auto& e : out.edges) present.insert({e.src, e.dst});
  for (const auto& e : g.edges) {
    auto srcs = exit.count(e.src) ? exit[e.src] : std::vector<std::string>{e.src};
    auto dsts = entry.count(e.dst) ? entry[e.dst] : std::vector<std::string>{e.dst};
    for (const auto& s : srcs) {
      for (const auto& d : dsts) {
        if (!present.insert({s, d}).second) continue;
        GraphEdge c = e;
        c.src = s;
        c.dst = d;
        out.edges.push_back(std::move(c));
      }
    }
  }
  for (const auto& p : g.inputs) {
    if (entry.count(p)) {
      for (const auto& q : entry[p]) out.inputs.push_back(q);
    } else {
      out.inputs.push_back(p);
    }
  }
  for (const auto& p : g.outputs) {
    if (exit.count(p)) {
      for (const auto& q : exit[p]) out.outputs.push_back(q);
    } else {
      out.outputs.push_back(p);
    }
  }
  return out;
}

std::set<EdgeKey> port_reachability(const TaskGraph& g) {
  std::set<EdgeKey> pairs;
  std::set<std::string> outputs(g.outputs.begin(), g.outputs.end());
  for (const auto& in : g.inputs) {
    std::set<std::string> seen{in};
    std::vector<std::string> work{in};
    while (!work.empty()) {
      auto v = work.back();
      work.pop_back();
      if (outputs.count(v)) pairs.insert({in, v});
      for (const auto* e : g.out_edges(v)) {
        if (seen.insert(e->dst).second) work.push_back(e->dst);
      }
    }
  }
  return pairs;
}

void SlaSpec::validate() const {
  if (!(lambda_per_ms >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda_per_ms must be >= 0");
  for (const auto& bound : {ttft_ms, tbt_ms, e2e_ms, min_throughput}) {
    if (bound && !(*bound >= 0.0)) throw Error(ErrorCode::InvalidArgument, "SLA bounds must be >= 0");
  }
  if (mode == SlaMode::Latency && !ttft_ms && !tbt_ms && !e2e_ms) {
    throw Error(ErrorCode::InvalidArgument, "latency SLA requires at least one bound");
  }
}

}  // namespace agentplan
