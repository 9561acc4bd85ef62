#include "agentplan/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>
#include <functional>
#include <queue>
#include <random>
#include <tuple>
#include <unordered_map>

#include "agentplan/dsl.hpp"
#include "agentplan/error.hpp"
#include "agentplan/io.hpp"

namespace agentplan {

using nlohmann::json;

std::string_view to_string(SimEventKind kind) noexcept {
  switch (kind) {
    case SimEventKind::TransferEnd: return "transfer_end";
    case SimEventKind::TaskEnd: return "task_end";
    case SimEventKind::RequestArrival: return "request_arrival";
    case SimEventKind::TransferStart: return "transfer_start";
    case SimEventKind::TaskStart: return "task_start";
  }
  return "task_end";
}

bool SimEvent::operator<(const SimEvent& o) const {
  return std::tie(time_ms, kind, request, node, seq) < std::tie(o.time_ms, o.kind, o.request, o.node, o.seq);
}

ArrivalSpec ArrivalSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error(ErrorCode::InvalidArgument, "arrival spec must be <kind>:<value>");
  const std::string kind = text.substr(0, colon);
  ArrivalSpec spec;
  try {
    std::size_t used = 0;
    spec.value = std::stod(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, "bad arrival value in '" + text + "'");
  }
  if (kind == "interval") spec.kind = Kind::Interval;
  else if (kind == "poisson") spec.kind = Kind::Poisson;
  else if (kind == "burst") spec.kind = Kind::Burst;
  else throw Error(ErrorCode::InvalidArgument, "unknown arrival kind '" + kind + "'");
  if (spec.kind == Kind::Burst ? spec.value < 0.0 || spec.value != std::floor(spec.value) : !(spec.value > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "arrival value out of range in '" + text + "'");
  }
  return spec;
}

std::string ArrivalSpec::to_string() const {
  switch (kind) {
    case Kind::Interval: return "interval:" + format_double(value);
    case Kind::Poisson: return "poisson:" + format_double(value);
    case Kind::Burst: return "burst:" + std::to_string(static_cast<std::int64_t>(value));
  }
  return "";
}

namespace {

std::string link_name(const std::string& a, const std::string& b) { return a + "->" + b; }

/// Static view of a plan: nodes, placements, transfer times, servers.
struct PlanIndex {
  std::vector<std::string> ids;
  std::vector<TaskKind> kinds;
  std::vector<int> pool;  // -1 for ports
  std::vector<double> service_ms;
  std::vector<double> out_tokens;
  std::vector<std::vector<std::pair<int, double>>> succ;  // (dst, transfer ms)
  std::vector<std::vector<int>> link_of;                   // parallel to succ; -1 without transfer
  std::vector<int> in_degree;
  std::vector<std::string> pools;
  std::vector<int> servers;
  std::vector<std::string> links;
  int first_prefill = -1;

  PlanIndex(const PlacementPlan& plan, const SimOptions& opts) {
    const TaskGraph& g = plan.graph;
    std::vector<std::string> order;
    try {
      order = topological_order(g);
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidPlan, e.what());
    }
    for (const auto& e : g.edges) {
      if (e.loop_annotation) throw Error(ErrorCode::InvalidPlan, "plan graph still has loop edges; unroll first");
    }
    std::map<std::string, int> index;
    for (const auto& id : order) {
      index[id] = static_cast<int>(ids.size());
      ids.push_back(id);
    }
    std::map<std::string, const TaskPlacement*> placed;
    for (const auto& t : plan.tasks) {
      if (!index.count(t.id)) throw Error(ErrorCode::InvalidPlan, "placement for unknown task '" + t.id + "'");
      if (!(t.time_ms >= 0.0)) throw Error(ErrorCode::InvalidPlan, "task '" + t.id + "' has a negative time");
      placed[t.id] = &t;
    }
    std::map<std::string, int> pool_index;
    for (const auto& id : ids) {
      const TaskNode& n = *g.find(id);
      kinds.push_back(n.kind);
      out_tokens.push_back(attr_number(n.payload, "out_tokens").value_or(0.0));
      auto it = placed.find(id);
      if (it == placed.end()) {
        if (n.kind != TaskKind::Input && n.kind != TaskKind::Output) {
          throw Error(ErrorCode::InvalidPlan, "task '" + id + "' has no placement");
        }
        pool.push_back(-1);
        service_ms.push_back(0.0);
        continue;
      }
      const auto& cls = it->second->device_class;
      auto [pit, fresh] = pool_index.emplace(cls, static_cast<int>(pools.size()));
      if (fresh) {
        pools.push_back(cls);
        servers.push_back(1);
      }
      servers[pit->second] = std::max(servers[pit->second], it->second->par.replicas);
      pool.push_back(pit->second);
      service_ms.push_back(it->second->time_ms);
      if (n.kind == TaskKind::Prefill && first_prefill < 0) first_prefill = static_cast<int>(pool.size()) - 1;
    }
    for (std::size_t k = 0; k < pools.size(); ++k) {
      if (auto o = opts.servers.find(pools[k]); o != opts.servers.end()) {
        if (o->second < 1) throw Error(ErrorCode::InvalidPlan, "server count must be >= 1");
        servers[k] = o->second;
      }
    }
    std::map<EdgeKey, double> transfer_ms;
    for (const auto& tr : plan.transfers) {
      if (!g.find_edge(tr.src, tr.dst)) {
        throw Error(ErrorCode::InvalidPlan, "transfer " + tr.src + "->" + tr.dst + " has no graph edge");
      }
      if (!(tr.ms >= 0.0)) throw Error(ErrorCode::InvalidPlan, "negative transfer time");
      transfer_ms[{tr.src, tr.dst}] = tr.ms;
    }
    succ.resize(ids.size());
    link_of.resize(ids.size());
    in_degree.assign(ids.size(), 0);
    std::map<std::string, int> link_index;
    for (const auto& e : g.edges) {
      const int s = index.at(e.src), d = index.at(e.dst);
      double ms = 0.0;
      if (auto it = transfer_ms.find({e.src, e.dst}); it != transfer_ms.end()) ms = it->second;
      int link = -1;
      if (ms > 0.0) {
        const std::string a = pool[s] >= 0 ? pools[pool[s]] : e.src;
        const std::string b = pool[d] >= 0 ? pools[pool[d]] : e.dst;
        auto [lit, fresh] = link_index.emplace(link_name(a, b), static_cast<int>(links.size()));
        if (fresh) links.push_back(lit->first);
        link = lit->second;
      }
      succ[s].emplace_back(d, ms);
      link_of[s].push_back(link);
      ++in_degree[d];
    }
  }
};

// Pools and links serve the oldest request first, then in readiness order.
// Plain ready-time FIFO lets a backlog of new arrivals starve the later stages
// of requests already in flight whenever one class runs several stages.
struct Waiting {
  std::int64_t request;
  int node;
  double since;
  std::int64_t order;

  bool operator<(const Waiting& o) const { return std::tie(request, order) < std::tie(o.request, o.order); }
};

struct PendingTransfer {
  std::int64_t request;
  int src;
  int dst;
  double ms;
  std::int64_t order;

  bool operator<(const PendingTransfer& o) const { return std::tie(request, order) < std::tie(o.request, o.order); }
};

struct RequestState {
  std::size_t record = 0;
  std::vector<int> remaining;
  std::size_t done = 0;
};

class Simulation {
 public:
  Simulation(const PlacementPlan& plan, const ArrivalSpec& arrivals, double duration, std::uint64_t seed,
             const SimOptions& opts)
      : plan_(plan), idx_(plan, opts), arrivals_(arrivals), horizon_(duration), rng_(seed), opts_(opts) {
    report_.duration_ms = duration;
    report_.seed = seed;
    report_.arrivals = arrivals.to_string();
    free_.assign(idx_.servers.begin(), idx_.servers.end());
    queues_.resize(idx_.pools.size());
    pool_busy_.assign(idx_.pools.size(), 0.0);
    link_busy_.assign(idx_.links.size(), 0.0);
    link_free_.assign(idx_.links.size(), true);
    link_queues_.resize(idx_.links.size());
    for (const auto& p : idx_.pools) report_.queue_wait_histogram[p].assign(report_.queue_wait_edges_ms.size() + 1, 0);
  }

  SimReport run() {
    schedule_first_arrivals();
    while (!events_.empty()) {
      SimEvent ev = events_.top();
      if (ev.time_ms > horizon_) break;
      events_.pop();
      now_ = ev.time_ms;
      log(ev);
      switch (ev.kind) {
        case SimEventKind::RequestArrival: arrive(ev.request); break;
        case SimEventKind::TaskEnd: finish_task(ev.request, node_of(ev)); break;
        case SimEventKind::TransferEnd: finish_transfer(ev); break;
        default: break;
      }
    }
    report_.admitted = static_cast<std::int64_t>(report_.requests.size());
    report_.in_flight = report_.admitted - report_.completed;
    const double seconds = horizon_ / 1000.0;
    report_.requests_per_sec = static_cast<double>(report_.completed) / seconds;
    report_.tokens_per_sec = report_.requests_per_sec * plan_.tokens_per_request;
    for (std::size_t k = 0; k < idx_.pools.size(); ++k) {
      report_.device_utilization[idx_.pools[k]] = pool_busy_[k] / (idx_.servers[k] * horizon_);
    }
    for (std::size_t k = 0; k < idx_.links.size(); ++k) {
      report_.link_utilization[idx_.links[k]] = link_busy_[k] / horizon_;
    }
    std::sort(report_.events.begin(), report_.events.end());
    return std::move(report_);
  }

 private:
  int node_of(const SimEvent& ev) const {
    return static_cast<int>(std::find(idx_.ids.begin(), idx_.ids.end(), ev.node) - idx_.ids.begin());
  }

  void push(double t, SimEventKind kind, std::int64_t request, std::string node) {
    events_.push(SimEvent{t, kind, request, std::move(node), seq_++});
  }

  void log(const SimEvent& ev) {
    if (opts_.record_events) report_.events.push_back(ev);
  }

  void schedule_first_arrivals() {
    switch (arrivals_.kind) {
      case ArrivalSpec::Kind::Burst:
        for (std::int64_t r = 0; r < static_cast<std::int64_t>(arrivals_.value); ++r) {
          push(0.0, SimEventKind::RequestArrival, r, "");
        }
        break;
      case ArrivalSpec::Kind::Interval:
        push(0.0, SimEventKind::RequestArrival, 0, "");
        break;
      case ArrivalSpec::Kind::Poisson:
        push(next_gap(), SimEventKind::RequestArrival, 0, "");
        break;
    }
  }

  double next_gap() { return std::exponential_distribution<double>(arrivals_.value / 1000.0)(rng_); }

  void arrive(std::int64_t request) {
    if (arrivals_.kind == ArrivalSpec::Kind::Interval) {
      push(now_ + arrivals_.value, SimEventKind::RequestArrival, request + 1, "");
    } else if (arrivals_.kind == ArrivalSpec::Kind::Poisson) {
      push(now_ + next_gap(), SimEventKind::RequestArrival, request + 1, "");
    }
    RequestRecord rec;
    rec.id = request;
    rec.arrival_ms = now_;
    report_.requests.push_back(rec);
    RequestState st;
    st.record = report_.requests.size() - 1;
    st.remaining = idx_.in_degree;
    auto& state = live_[request] = std::move(st);
    if (idx_.ids.empty()) {
      complete(request, state);
      return;
    }
    for (std::size_t n = 0; n < idx_.ids.size(); ++n) {
      if (idx_.in_degree[n] == 0) ready(request, static_cast<int>(n));
    }
  }

  void ready(std::int64_t request, int node) {
    const int pool = idx_.pool[node];
    if (pool < 0) {
      push(now_, SimEventKind::TaskEnd, request, idx_.ids[node]);
      return;
    }
    queues_[pool].insert({request, node, now_, seq_++});
    dispatch(pool);
  }

  void dispatch(int pool) {
    while (free_[pool] > 0 && !queues_[pool].empty()) {
      const Waiting w = *queues_[pool].begin();
      queues_[pool].erase(queues_[pool].begin());
      --free_[pool];
      const double wait = now_ - w.since;
      auto& hist = report_.queue_wait_histogram[idx_.pools[pool]];
      const auto& edges = report_.queue_wait_edges_ms;
      hist[std::upper_bound(edges.begin(), edges.end(), wait) - edges.begin()]++;
      const double service = idx_.service_ms[w.node];
      pool_busy_[pool] += std::max(0.0, std::min(now_ + service, horizon_) - now_);
      log({now_, SimEventKind::TaskStart, w.request, idx_.ids[w.node], seq_++});
      push(now_ + service, SimEventKind::TaskEnd, w.request, idx_.ids[w.node]);
    }
  }

  void satisfy(std::int64_t request, int node) {
    auto& st = live_.at(request);
    if (--st.remaining[node] == 0) ready(request, node);
  }

  void finish_task(std::int64_t request, int node) {
    auto it = live_.find(request);
    auto& st = it->second;
    RequestRecord& rec = report_.requests[st.record];
    const int pool = idx_.pool[node];
    if (pool >= 0) ++free_[pool];
    const TaskKind kind = idx_.kinds[node];
    if (node == idx_.first_prefill || (idx_.first_prefill < 0 && st.done == 0 && pool >= 0)) {
      rec.ttft_ms = now_ - rec.arrival_ms;
    }
    if (kind == TaskKind::Decode && idx_.out_tokens[node] > 0.0) {
      rec.tbt_ms.push_back(idx_.service_ms[node] / idx_.out_tokens[node]);
    }
    for (std::size_t k = 0; k < idx_.succ[node].size(); ++k) {
      const auto [dst, ms] = idx_.succ[node][k];
      const int link = idx_.link_of[node][k];
      if (link < 0) {
        satisfy(request, dst);
      } else {
        link_queues_[link].insert({request, node, dst, ms, seq_++});
        dispatch_link(link);
      }
    }
    if (++st.done == idx_.ids.size()) complete(request, st);
    if (pool >= 0) dispatch(pool);
  }

  void dispatch_link(int link) {
    if (!link_free_[link] || link_queues_[link].empty()) return;
    const PendingTransfer t = *link_queues_[link].begin();
    link_queues_[link].erase(link_queues_[link].begin());
    link_free_[link] = false;
    link_busy_[link] += std::max(0.0, std::min(now_ + t.ms, horizon_) - now_);
    const std::string name = idx_.ids[t.src] + "->" + idx_.ids[t.dst];
    log({now_, SimEventKind::TransferStart, t.request, name, seq_++});
    push(now_ + t.ms, SimEventKind::TransferEnd, t.request, name);
    in_transit_[{t.request, name}] = {link, t.dst};
  }

  void finish_transfer(const SimEvent& ev) {
    auto it = in_transit_.find({ev.request, ev.node});
    const auto [link, dst] = it->second;
    in_transit_.erase(it);
    link_free_[link] = true;
    satisfy(ev.request, dst);
    dispatch_link(link);
  }

  void complete(std::int64_t request, RequestState& st) {
    RequestRecord& rec = report_.requests[st.record];
    rec.completed = true;
    rec.e2e_ms = now_ - rec.arrival_ms;
    ++report_.completed;
    live_.erase(request);
  }

  const PlacementPlan& plan_;
  PlanIndex idx_;
  ArrivalSpec arrivals_;
  double horizon_;
  std::mt19937_64 rng_;
  SimOptions opts_;
  SimReport report_;
  double now_ = 0.0;
  std::int64_t seq_ = 0;
  std::priority_queue<SimEvent, std::vector<SimEvent>, std::function<bool(const SimEvent&, const SimEvent&)>> events_{
      [](const SimEvent& a, const SimEvent& b) { return b < a; }};
  std::vector<int> free_;
  std::vector<std::set<Waiting>> queues_;
  std::vector<double> pool_busy_;
  std::vector<double> link_busy_;
  std::vector<bool> link_free_;
  std::vector<std::set<PendingTransfer>> link_queues_;
  std::map<std::pair<std::int64_t, std::string>, std::pair<int, int>> in_transit_;
  std::unordered_map<std::int64_t, RequestState> live_;
};

}  // namespace

SimReport simulate_plan(const PlacementPlan& plan, const ArrivalSpec& arrivals, double duration_ms,
                        std::uint64_t seed, const SimOptions& opts) {
  if (!(duration_ms > 0.0)) throw Error(ErrorCode::ZeroDuration, "simulation duration must be > 0 ms");
  return Simulation(plan, arrivals, duration_ms, seed, opts).run();
}

double bottleneck_rps(const PlacementPlan& plan, const SimOptions& opts) {
  const PlanIndex idx(plan, opts);
  std::vector<double> pool_ms(idx.pools.size(), 0.0);
  std::vector<double> link_ms(idx.links.size(), 0.0);
  for (std::size_t n = 0; n < idx.ids.size(); ++n) {
    if (idx.pool[n] >= 0) pool_ms[idx.pool[n]] += idx.service_ms[n];
    for (std::size_t k = 0; k < idx.succ[n].size(); ++k) {
      if (idx.link_of[n][k] >= 0) link_ms[idx.link_of[n][k]] += idx.succ[n][k].second;
    }
  }
  double rate = kInf;
  for (std::size_t k = 0; k < pool_ms.size(); ++k) {
    if (pool_ms[k] > 0.0) rate = std::min(rate, idx.servers[k] * 1000.0 / pool_ms[k]);
  }
  for (double ms : link_ms) {
    if (ms > 0.0) rate = std::min(rate, 1000.0 / ms);
  }
  return rate;
}

Deviation compare_to_analytic(const SimReport& report, const PlacementPlan& plan, double tolerance,
                              const SimOptions& opts) {
  Deviation d;
  auto rel = [](double sim, double predicted) {
    if (predicted == 0.0) return sim == 0.0 ? 0.0 : kInf;
    return std::abs(sim - predicted) / std::abs(predicted);
  };
  for (const auto& r : report.requests) {
    if (!r.completed) continue;
    d.e2e_rel = std::max(d.e2e_rel, rel(r.e2e_ms, plan.e2e_ms));
    if (plan.ttft_ms > 0.0) d.ttft_rel = std::max(d.ttft_rel, rel(r.ttft_ms, plan.ttft_ms));
    if (plan.tbt_ms > 0.0 && !r.tbt_ms.empty()) {
      d.tbt_rel = std::max(d.tbt_rel, rel(*std::max_element(r.tbt_ms.begin(), r.tbt_ms.end()), plan.tbt_ms));
    }
  }
  d.bottleneck_rps = bottleneck_rps(plan, opts);
  d.throughput_rel = std::isfinite(d.bottleneck_rps) ? rel(report.requests_per_sec, d.bottleneck_rps) : 0.0;
  if (d.ttft_rel > tolerance) d.flagged.push_back("ttft");
  if (d.tbt_rel > tolerance) d.flagged.push_back("tbt");
  if (d.e2e_rel > tolerance) d.flagged.push_back("e2e");
  return d;
}

json sim_report_to_json(const SimReport& r) {
  json requests = json::array();
  for (const auto& q : r.requests) {
    json jq{{"id", q.id}, {"arrival_ms", q.arrival_ms}, {"completed", q.completed}};
    if (q.completed) {
      jq["e2e_ms"] = q.e2e_ms;
      jq["ttft_ms"] = q.ttft_ms;
      jq["tbt_ms"] = q.tbt_ms;
    }
    requests.push_back(std::move(jq));
  }
  json edges = json::array();
  for (double e : r.queue_wait_edges_ms) edges.push_back(e);
  json out{{"schema", "sim/v1"},
           {"duration_ms", r.duration_ms},
           {"seed", r.seed},
           {"arrivals", r.arrivals},
           {"admitted", r.admitted},
           {"completed", r.completed},
           {"in_flight", r.in_flight},
           {"requests_per_sec", r.requests_per_sec},
           {"tokens_per_sec", r.tokens_per_sec},
           {"device_utilization", r.device_utilization},
           {"link_utilization", r.link_utilization},
           {"queue_wait_edges_ms", std::move(edges)},
           {"queue_wait_histogram", r.queue_wait_histogram},
           {"requests", std::move(requests)}};
  if (!r.events.empty()) {
    json events = json::array();
    for (const auto& e : r.events) {
      events.push_back({{"time_ms", e.time_ms},
                        {"kind", std::string(to_string(e.kind))},
                        {"request", e.request},
                        {"node", e.node}});
    }
    out["events"] = std::move(events);
  }
  return out;
}

json deviation_to_json(const Deviation& d) {
  return json{{"ttft_rel", finite_or_null(d.ttft_rel)},
              {"tbt_rel", finite_or_null(d.tbt_rel)},
              {"e2e_rel", finite_or_null(d.e2e_rel)},
              {"bottleneck_rps", finite_or_null(d.bottleneck_rps)},
              {"throughput_rel", finite_or_null(d.throughput_rel)},
              {"flagged", d.flagged}};
}

}  // namespace agentplan
