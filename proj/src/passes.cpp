#include "agentplan/passes.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "agentplan/error.hpp"

namespace agentplan {

PassReport diff_report(std::string pass, const TaskGraph& before, const TaskGraph& after) {
  PassReport r;
  r.pass = std::move(pass);
  std::set<std::string> old_nodes, new_nodes;
  for (const auto& n : before.nodes) old_nodes.insert(n.id);
  for (const auto& n : after.nodes) new_nodes.insert(n.id);
  std::set<EdgeKey> old_edges, new_edges;
  for (const auto& e : before.edges) old_edges.insert({e.src, e.dst});
  for (const auto& e : after.edges) new_edges.insert({e.src, e.dst});
  for (const auto& id : new_nodes) r.nodes_added += !old_nodes.count(id);
  for (const auto& id : old_nodes) r.nodes_removed += !new_nodes.count(id);
  for (const auto& k : new_edges) r.edges_added += !old_edges.count(k);
  for (const auto& k : old_edges) r.edges_removed += !new_edges.count(k);
  return r;
}

namespace {

/// Replaces node `id` with `head -> tail`; external edges and ports are
/// rewired so that predecessors feed `head` and successors read from `tail`.
void replace_with_pair(TaskGraph& g, const std::string& id, TaskNode head, TaskNode tail, GraphEdge link) {
  const std::string head_id = head.id;
  const std::string tail_id = tail.id;
  auto it = std::find_if(g.nodes.begin(), g.nodes.end(), [&](const TaskNode& n) { return n.id == id; });
  *it = std::move(head);
  g.nodes.insert(it + 1, std::move(tail));
  for (auto& e : g.edges) {
    const bool from = e.src == id;
    const bool to = e.dst == id;
    if (from) e.src = tail_id;
    if (to) e.dst = head_id;
  }
  link.src = head_id;
  link.dst = tail_id;
  g.edges.push_back(std::move(link));
  for (auto& p : g.inputs) {
    if (p == id) p = head_id;
  }
  for (auto& p : g.outputs) {
    if (p == id) p = tail_id;
  }
}

std::string unique_id(const TaskGraph& g, const std::string& base) {
  std::string id = base;
  for (int n = 2; g.contains(id); ++n) id = base + "_" + std::to_string(n);
  return id;
}

}  // namespace

PassResult split_llm(const TaskGraph& g, const ModelCatalog& models) {
  TaskGraph out = g;
  std::vector<std::string> targets;
  for (const auto& n : g.nodes) {
    if (n.kind == TaskKind::ModelExec) targets.push_back(n.id);
  }
  std::vector<std::string> notes;
  for (const auto& id : targets) {
    const TaskNode original = *out.find(id);
    auto model_name = attr_string(original.payload, "model");
    if (!model_name) throw Error(ErrorCode::UnknownModel, "model_exec '" + id + "' names no model");
    const ModelSpec& model = models.at(*model_name);
    auto in_tokens = attr_number(original.payload, "in_tokens");
    auto out_tokens = attr_number(original.payload, "out_tokens");
    if (!in_tokens || !out_tokens || *in_tokens < 0 || *out_tokens < 0) {
      throw Error(ErrorCode::MissingTokenCounts, "model_exec '" + id + "' needs in_tokens and out_tokens");
    }

    TaskNode prefill;
    prefill.id = unique_id(out, id + ".prefill");
    prefill.kind = TaskKind::Prefill;
    prefill.demand = original.demand;
    prefill.static_latency_ms = original.static_latency_ms;
    prefill.payload = original.payload;
    prefill.payload.erase("out_tokens");

    TaskNode decode;
    decode.id = unique_id(out, id + ".decode");
    decode.kind = TaskKind::Decode;
    decode.payload = original.payload;

    GraphEdge kv;
    kv.kind = EdgeKind::KvStore;
    kv.transfer_bytes = kv_cache_bytes(model, static_cast<std::int64_t>(*in_tokens), 1);
    notes.push_back(id + ": kv " + std::to_string(kv.transfer_bytes) + " bytes");
    replace_with_pair(out, id, std::move(prefill), std::move(decode), std::move(kv));
  }
  PassReport report = diff_report("split_llm", g, out);
  report.notes = std::move(notes);
  return {std::move(out), std::move(report)};
}

PassResult split_tool(const TaskGraph& g) {
  TaskGraph out = g;
  std::vector<std::string> targets;
  for (const auto& n : g.nodes) {
    if (n.kind == TaskKind::ToolCall) targets.push_back(n.id);
  }
  for (const auto& id : targets) {
    const TaskNode original = *out.find(id);

    TaskNode lookup;
    lookup.id = unique_id(out, id + ".lookup");
    lookup.kind = TaskKind::MemoryLookup;
    lookup.static_latency_ms = original.static_latency_ms;
    lookup.demand.net_bandwidth_gbps_bits = original.demand.net_bandwidth_gbps_bits;
    lookup.demand.disk_capacity_gb = original.demand.disk_capacity_gb;
    lookup.payload = original.payload;

    TaskNode compute;
    compute.id = unique_id(out, id + ".compute");
    compute.kind = TaskKind::GeneralCompute;
    compute.demand = original.demand;
    compute.demand.net_bandwidth_gbps_bits = 0.0;
    compute.demand.disk_capacity_gb = 0.0;
    compute.payload = original.payload;

    GraphEdge link;
    if (auto bytes = attr_number(original.payload, "response_bytes"); bytes && *bytes > 0) {
      link.transfer_bytes = static_cast<std::uint64_t>(*bytes);
    }
    replace_with_pair(out, id, std::move(lookup), std::move(compute), std::move(link));
  }
  return {out, diff_report("split_tool", g, out)};
}

PassResult fuse_colocated(const TaskGraph& g, const std::map<std::string, std::string>& placement) {
  std::set<std::string> ids;
  for (const auto& n : g.nodes) ids.insert(n.id);
  std::set<std::string> planned;
  for (const auto& [id, cls] : placement) planned.insert(id);
  if (ids != planned) {
    std::vector<std::string> diff;
    std::set_symmetric_difference(ids.begin(), ids.end(), planned.begin(), planned.end(), std::back_inserter(diff));
    throw Error(ErrorCode::PlanMismatch, "placement and graph disagree on '" + diff.front() + "'");
  }

  const std::set<std::string> ports = [&] {
    std::set<std::string> s(g.inputs.begin(), g.inputs.end());
    s.insert(g.outputs.begin(), g.outputs.end());
    return s;
  }();
  auto fusable = [&](const GraphEdge& e) {
    if (e.loop_annotation || e.src == e.dst) return false;
    if (ports.count(e.src) || ports.count(e.dst)) return false;
    if (placement.at(e.src) != placement.at(e.dst)) return false;
    if (g.out_edges(e.src).size() != 1 || g.in_edges(e.dst).size() != 1) return false;
    return g.find(e.src)->kind != TaskKind::Agent && g.find(e.dst)->kind != TaskKind::Agent;
  };
  std::map<std::string, std::string> next;
  std::set<std::string> has_prev;
  for (const auto& e : g.edges) {
    if (fusable(e)) {
      next[e.src] = e.dst;
      has_prev.insert(e.dst);
    }
  }

  // head -> ordered chain members; member -> head.
  std::map<std::string, std::vector<std::string>> chains;
  std::map<std::string, std::string> owner;
  for (const auto& n : g.nodes) {
    if (has_prev.count(n.id) || !next.count(n.id)) continue;
    std::vector<std::string> chain{n.id};
    std::set<std::string> seen{n.id};
    for (auto it = next.find(n.id); it != next.end() && seen.insert(it->second).second; it = next.find(it->second)) {
      chain.push_back(it->second);
    }
    for (const auto& m : chain) owner[m] = n.id;
    chains[n.id] = std::move(chain);
  }

  TaskGraph out;
  out.name = g.name;
  out.inputs = g.inputs;
  out.outputs = g.outputs;
  std::vector<std::string> notes;
  for (const auto& n : g.nodes) {
    auto own = owner.find(n.id);
    if (own == owner.end()) {
      out.nodes.push_back(n);
      continue;
    }
    if (own->second != n.id) continue;
    const auto& chain = chains.at(n.id);
    TaskNode fused = n;
    std::string members = n.id;
    for (std::size_t k = 1; k < chain.size(); ++k) {
      const TaskNode& m = *g.find(chain[k]);
      if (m.kind != fused.kind) fused.kind = TaskKind::GeneralCompute;
      fused.static_latency_ms += m.static_latency_ms;
      fused.demand += m.demand;
      for (const auto& [key, value] : m.payload) fused.payload.emplace(key, value);
      members += "," + m.id;
    }
    fused.payload["fused_from"] = members;
    notes.push_back(n.id + " <- " + members);
    out.nodes.push_back(std::move(fused));
  }
  auto rep = [&](const std::string& id) {
    auto it = owner.find(id);
    return it == owner.end() ? id : it->second;
  };
  for (const auto& e : g.edges) {
    const std::string s = rep(e.src);
    const std::string d = rep(e.dst);
    if (s == d && owner.count(e.src) && owner.count(e.dst) && !e.loop_annotation) continue;
    GraphEdge copy = e;
    copy.src = s;
    copy.dst = d;
    if (!out.find_edge(s, d)) out.edges.push_back(std::move(copy));
  }
  PassReport report = diff_report("fuse_colocated", g, out);
  report.notes = std::move(notes);
  return {std::move(out), std::move(report)};
}

std::vector<std::string> parse_pass_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

PipelineResult run_pipeline(const TaskGraph& g, const std::vector<std::string>& passes, const PipelineOptions& opts) {
  PipelineResult result{g, {}};
  for (const auto& name : passes) {
    PassResult step;
    if (name == "split_llm") {
      step = split_llm(result.graph, opts.models);
    } else if (name == "split_tool") {
      step = split_tool(result.graph);
    } else if (name == "fuse_colocated") {
      if (!opts.placement) throw Error(ErrorCode::InvalidArgument, "fuse_colocated needs a placement");
      std::map<std::string, std::string> restricted;
      for (const auto& n : result.graph.nodes) {
        auto it = opts.placement->find(n.id);
        if (it != opts.placement->end()) restricted.insert(*it);
      }
      step = fuse_colocated(result.graph, restricted);
    } else if (name == "flatten") {
      TaskGraph next = flatten_hierarchy(result.graph);
      step = {next, diff_report(name, result.graph, next)};
    } else if (name == "unroll") {
      TaskGraph next = unroll_cycles(result.graph);
      step = {next, diff_report(name, result.graph, next)};
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown pass '" + name + "'");
    }
    result.graph = std::move(step.graph);
    result.reports.push_back(std::move(step.report));
  }
  return result;
}

}  // namespace agentplan
