#include "agentplan/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "agentplan/error.hpp"

namespace agentplan {

std::string_view to_string(SolveMode mode) noexcept {
  return mode == SolveMode::Fractional ? "fractional" : "discrete";
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::ShapeMismatch, what);
}

double tolerance(double scale) { return 1e-9 * std::max(1.0, std::abs(scale)); }

template <typename T>
std::vector<std::vector<T>> matrix(std::size_t rows, std::size_t cols, T value) {
  return std::vector<std::vector<T>>(rows, std::vector<T>(cols, value));
}

}  // namespace

void AssignmentProblem::fill_defaults() {
  const std::size_t n = n_tasks(), h = n_classes(), r = resources.size();
  if (cap.empty()) cap = matrix(h, r, kInf);
  if (static_latency.empty()) static_latency.assign(n, 0.0);
  if (pipeline_cost.empty()) pipeline_cost = matrix(n, h, 0.0);
  if (sync_cost.empty()) sync_cost = matrix(n, h, 0.0);
  for (auto& e : edges) {
    if (e.comm.empty()) e.comm = matrix(h, h, EdgeComm{});
  }
}

void AssignmentProblem::validate() const {
  const std::size_t n = n_tasks(), h = n_classes(), r = resources.size();
  auto check_matrix = [&](const auto& m, std::size_t rows, std::size_t cols, const char* name) {
    require(m.size() == rows, std::string(name) + ": expected " + std::to_string(rows) + " rows");
    for (const auto& row : m) require(row.size() == cols, std::string(name) + ": expected " + std::to_string(cols) + " columns");
  };
  require(theta.size() == n, "theta: expected one entry per task");
  for (const auto& per_task : theta) check_matrix(per_task, h, r, "theta");
  check_matrix(perf, h, r, "perf");
  check_matrix(cap, h, r, "cap");
  check_matrix(unit_cost, h, r, "unit_cost");
  require(static_latency.size() == n, "static_latency: expected one entry per task");
  check_matrix(pipeline_cost, n, h, "pipeline_cost");
  check_matrix(sync_cost, n, h, "sync_cost");
  if (!allowed.empty()) check_matrix(allowed, n, h, "allowed");
  for (const auto& e : edges) {
    require(e.src >= 0 && e.dst >= 0 && static_cast<std::size_t>(e.src) < n && static_cast<std::size_t>(e.dst) < n,
            "edge endpoint out of range");
    require(e.src != e.dst, "edge endpoints must differ");
    check_matrix(e.comm, h, h, "edge comm");
    for (const auto& row : e.comm) {
      for (const auto& c : row) {
        if (!(c.latency_ms >= 0.0 && c.cost_usd >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative edge comm entry");
      }
    }
  }
  auto non_negative = [](double v) { return v >= 0.0; };
  for (const auto& per_task : theta) {
    for (const auto& row : per_task) {
      if (!std::all_of(row.begin(), row.end(), non_negative)) throw Error(ErrorCode::InvalidArgument, "negative theta");
    }
  }
  for (const auto* m : {&perf, &cap, &unit_cost, &pipeline_cost, &sync_cost}) {
    for (const auto& row : *m) {
      if (!std::all_of(row.begin(), row.end(), non_negative)) {
        throw Error(ErrorCode::InvalidArgument, "cost, perf and capacity entries must be >= 0");
      }
    }
  }
  if (!std::all_of(static_latency.begin(), static_latency.end(), non_negative) || !(gamma >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "static latency and gamma must be >= 0");
  }
  sla.validate();
}

std::vector<int> Assignment::choice() const {
  std::vector<int> out;
  for (const auto& row : x) {
    int pick = -1;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (std::abs(row[j] - 1.0) <= 1e-9) pick = static_cast<int>(j);
      else if (std::abs(row[j]) > 1e-9) {
        pick = -1;
        break;
      }
    }
    out.push_back(pick);
  }
  return out;
}

double compute_tij(const AssignmentProblem& p, std::size_t i, std::size_t j) {
  double roof = 0.0;
  for (std::size_t r = 0; r < p.resources.size(); ++r) {
    if (!p.resources[r].timed) continue;
    const double work = p.theta[i][j][r];
    if (work == 0.0) continue;
    if (p.perf[j][r] == 0.0) {
      throw Error(ErrorCode::ZeroPerf, "class '" + p.classes[j] + "' has zero " + p.resources[r].name +
                                           " for task '" + p.tasks[i] + "'");
    }
    roof = std::max(roof, work / p.perf[j][r]);
  }
  return roof + p.static_latency[i] + p.pipeline_cost[i][j] + p.sync_cost[i][j];
}

double compute_cost_ij(const AssignmentProblem& p, std::size_t i, std::size_t j) {
  double cost = 0.0;
  for (std::size_t r = 0; r < p.resources.size(); ++r) cost += p.theta[i][j][r] * p.unit_cost[j][r];
  return cost + p.gamma * p.pipeline_cost[i][j];
}

Assignment evaluate_assignment(const AssignmentProblem& p, const Assignment& a) {
  const std::size_t n = p.n_tasks(), h = p.n_classes(), nr = p.resources.size();
  require(a.x.size() == n, "assignment: expected one row per task");
  for (const auto& row : a.x) require(row.size() == h, "assignment: expected one column per class");

  Assignment out = a;
  out.cost = 0.0;
  out.task_ms.assign(n, 0.0);
  bool feasible = true;
  std::vector<std::vector<double>> usage = matrix(h, nr, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < h; ++j) {
      const double x = a.x[i][j];
      if (x < -1e-9 || x > 1.0 + 1e-9) feasible = false;
      total += x;
      if (x == 0.0) continue;
      if (!p.is_allowed(i, j) && x > 1e-9) feasible = false;
      out.task_ms[i] += x * compute_tij(p, i, j);
      out.cost += x * compute_cost_ij(p, i, j);
      for (std::size_t r = 0; r < nr; ++r) usage[j][r] += x * p.theta[i][j][r];
    }
    if (std::abs(total - 1.0) > 1e-9) feasible = false;
  }
  double comm_ms = 0.0;
  if (p.mode == SolveMode::Discrete) {
    for (const auto& e : p.edges) {
      for (std::size_t s = 0; s < h; ++s) {
        const double xs = a.x[e.src][s];
        if (xs == 0.0) continue;
        for (std::size_t d = 0; d < h; ++d) {
          const double w = xs * a.x[e.dst][d];
          if (w == 0.0) continue;
          comm_ms += w * e.comm[s][d].latency_ms;
          out.cost += w * e.comm[s][d].cost_usd;
        }
      }
    }
  }
  out.e2e_ms = comm_ms;
  for (double t : out.task_ms) out.e2e_ms += t;

  for (std::size_t j = 0; j < h; ++j) {
    for (std::size_t r = 0; r < nr; ++r) {
      if (usage[j][r] > p.cap[j][r] + tolerance(p.cap[j][r])) feasible = false;
    }
  }
  if (p.sla.min_throughput) {
    double rate = 0.0;
    for (double t : out.task_ms) rate += t > 0.0 ? 1.0 / t : kInf;
    if (rate < *p.sla.min_throughput - tolerance(*p.sla.min_throughput)) feasible = false;
  }

  out.slack.clear();
  if (p.sla.e2e_ms) {
    const double bound = *p.sla.e2e_ms;
    if (p.sla.scope == SlaScope::EndToEnd) {
      out.slack.push_back(std::max(0.0, out.e2e_ms - bound));
    } else {
      for (double t : out.task_ms) out.slack.push_back(std::max(0.0, t - bound));
    }
  }
  double slack_sum = 0.0;
  for (double s : out.slack) slack_sum += s;
  if (p.sla.hard()) {
    out.penalty = 0.0;
    for (double s : out.slack) {
      if (s > tolerance(p.sla.e2e_ms.value_or(0.0))) feasible = false;
    }
  } else {
    out.penalty = p.sla.lambda_per_ms * slack_sum;
  }
  out.objective = out.cost + out.penalty;
  out.feasible = feasible;
  return out;
}

Assignment evaluate_choice(const AssignmentProblem& p, const std::vector<int>& choice) {
  require(choice.size() == p.n_tasks(), "choice: expected one class per task");
  Assignment a;
  a.x = matrix(p.n_tasks(), p.n_classes(), 0.0);
  for (std::size_t i = 0; i < choice.size(); ++i) {
    require(choice[i] >= 0 && static_cast<std::size_t>(choice[i]) < p.n_classes(), "choice: class out of range");
    a.x[i][choice[i]] = 1.0;
  }
  return evaluate_assignment(p, a);
}

LpStandardForm build_lp(const AssignmentProblem& p) {
  if (p.mode != SolveMode::Fractional) throw Error(ErrorCode::InvalidArgument, "build_lp needs fractional mode");
  if (p.sla.min_throughput) {
    throw Error(ErrorCode::NonlinearConstraint, "throughput bound is nonlinear in fractional x; use discrete mode");
  }
  p.validate();
  const std::size_t n = p.n_tasks(), h = p.n_classes();
  LpStandardForm lp;
  lp.n_tasks = n;
  lp.n_classes = h;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < h; ++j) {
      LpVariable v;
      v.name = "x[" + p.tasks[i] + "," + p.classes[j] + "]";
      v.task = static_cast<int>(i);
      v.cls = static_cast<int>(j);
      v.upper = p.is_allowed(i, j) ? 1.0 : 0.0;
      lp.vars.push_back(v);
      lp.objective.push_back(compute_cost_ij(p, i, j));
    }
  }
  const bool latency = p.sla.e2e_ms.has_value();
  const bool per_task = p.sla.scope == SlaScope::PerTask;
  if (latency) {
    const std::size_t count = per_task ? n : 1;
    for (std::size_t k = 0; k < count; ++k) {
      LpVariable s;
      s.name = per_task ? "s[" + p.tasks[k] + "]" : "s";
      s.slack = true;
      s.task = per_task ? static_cast<int>(k) : -1;
      s.upper = p.sla.hard() ? 0.0 : kInf;
      lp.vars.push_back(s);
      lp.objective.push_back(p.sla.hard() ? 0.0 : p.sla.lambda_per_ms);
    }
  }
  const std::size_t nv = lp.vars.size();
  auto col = [h](std::size_t i, std::size_t j) { return i * h + j; };

  for (std::size_t i = 0; i < n; ++i) {
    LpRow row{"assign[" + p.tasks[i] + "]", std::vector<double>(nv, 0.0), RowSense::Eq, 1.0};
    for (std::size_t j = 0; j < h; ++j) row.coeffs[col(i, j)] = 1.0;
    lp.rows.push_back(std::move(row));
  }
  if (latency) {
    if (per_task) {
      for (std::size_t i = 0; i < n; ++i) {
        LpRow row{"latency[" + p.tasks[i] + "]", std::vector<double>(nv, 0.0), RowSense::Le, *p.sla.e2e_ms};
        for (std::size_t j = 0; j < h; ++j) row.coeffs[col(i, j)] = compute_tij(p, i, j);
        row.coeffs[n * h + i] = -1.0;
        lp.rows.push_back(std::move(row));
      }
    } else {
      LpRow row{"latency", std::vector<double>(nv, 0.0), RowSense::Le, *p.sla.e2e_ms};
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < h; ++j) row.coeffs[col(i, j)] = compute_tij(p, i, j);
      }
      row.coeffs[n * h] = -1.0;
      lp.rows.push_back(std::move(row));
    }
  }
  for (std::size_t j = 0; j < h; ++j) {
    for (std::size_t r = 0; r < p.resources.size(); ++r) {
      if (std::isinf(p.cap[j][r])) continue;
      LpRow row{"cap[" + p.classes[j] + "," + p.resources[r].name + "]", std::vector<double>(nv, 0.0), RowSense::Le,
                p.cap[j][r]};
      for (std::size_t i = 0; i < n; ++i) row.coeffs[col(i, j)] = p.theta[i][j][r];
      lp.rows.push_back(std::move(row));
    }
  }
  return lp;
}

Assignment solve_lp(const LpStandardForm& lp, const SimplexOptions& opts) {
  LpSolution sol = solve_simplex(lp, opts);
  Assignment a;
  a.x = matrix(lp.n_tasks, lp.n_classes, 0.0);
  for (std::size_t k = 0; k < lp.vars.size(); ++k) {
    const auto& v = lp.vars[k];
    if (v.slack) {
      a.slack.push_back(sol.values[k]);
    } else if (v.task >= 0) {
      a.x[v.task][v.cls] = sol.values[k];
    }
  }
  a.objective = sol.objective;
  a.stats.iterations = sol.iterations;
  a.feasible = true;
  return a;
}

Assignment solve_fractional(const AssignmentProblem& p, const SimplexOptions& opts) {
  const LpStandardForm lp = build_lp(p);
  Assignment a = solve_lp(lp, opts);
  Assignment eval = evaluate_assignment(p, a);
  eval.objective = a.objective;
  eval.slack = a.slack;
  eval.stats = a.stats;
  eval.penalty = a.objective - eval.cost;
  return eval;
}

namespace {

std::string infeasibility_reason(const AssignmentProblem& p, const std::vector<std::vector<double>>& t,
                                 const std::vector<std::vector<bool>>& ok) {
  const std::size_t n = p.n_tasks(), h = p.n_classes();
  double min_e2e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double best = kInf;
    for (std::size_t j = 0; j < h; ++j) {
      if (p.is_allowed(i, j)) best = std::min(best, t[i][j]);
    }
    if (std::isinf(best)) return "binding constraint: task '" + p.tasks[i] + "' has no allowed class";
    bool any = false;
    for (std::size_t j = 0; j < h; ++j) any = any || ok[i][j];
    if (!any) return "binding constraint: per-task latency bound for '" + p.tasks[i] + "'";
    min_e2e += best;
  }
  std::ostringstream os;
  if (p.sla.e2e_ms && p.sla.hard() && p.sla.scope == SlaScope::EndToEnd && min_e2e > *p.sla.e2e_ms) {
    os << "binding constraint: latency (fastest assignment takes " << min_e2e << " ms > " << *p.sla.e2e_ms << " ms)";
    return os.str();
  }
  if (p.sla.min_throughput) return "binding constraint: throughput, capacity or latency combination";
  return "binding constraint: capacity or latency combination";
}

class BranchAndBound {
 public:
  BranchAndBound(const AssignmentProblem& p, const DiscreteOptions& opts) : p_(p), opts_(opts) {
    n_ = p.n_tasks();
    h_ = p.n_classes();
    t_ = matrix(n_, h_, 0.0);
    c_ = matrix(n_, h_, 0.0);
    ok_ = matrix(n_, h_, false);
    const bool soft = !p.sla.hard();
    const bool per_task = p.sla.e2e_ms && p.sla.scope == SlaScope::PerTask;
    node_bound_ = matrix(n_, h_, kInf);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < h_; ++j) {
        if (!p.is_allowed(i, j)) continue;
        t_[i][j] = compute_tij(p, i, j);
        c_[i][j] = compute_cost_ij(p, i, j);
        ok_[i][j] = true;
        double bound = c_[i][j];
        if (per_task) {
          const double over = t_[i][j] - *p.sla.e2e_ms;
          if (soft) bound += p.sla.lambda_per_ms * std::max(0.0, over);
          else if (over > prune_tol(*p.sla.e2e_ms)) ok_[i][j] = false;
        }
        if (ok_[i][j]) node_bound_[i][j] = bound;
      }
    }
    rem_cost_.assign(n_ + 1, 0.0);
    rem_lat_.assign(n_ + 1, 0.0);
    rem_rate_.assign(n_ + 1, 0.0);
    for (std::size_t i = n_; i-- > 0;) {
      double cost = kInf, lat = kInf, rate = 0.0;
      for (std::size_t j = 0; j < h_; ++j) {
        if (!ok_[i][j]) continue;
        cost = std::min(cost, node_bound_[i][j]);
        lat = std::min(lat, t_[i][j]);
        rate = std::max(rate, t_[i][j] > 0.0 ? 1.0 / t_[i][j] : kInf);
      }
      rem_cost_[i] = rem_cost_[i + 1] + cost;
      rem_lat_[i] = rem_lat_[i + 1] + lat;
      rem_rate_[i] = rem_rate_[i + 1] + rate;
    }
    closing_.resize(n_);
    for (const auto& e : p.edges) closing_[std::max(e.src, e.dst)].push_back(&e);
    usage_ = matrix(h_, p.resources.size(), 0.0);
    choice_.assign(n_, -1);
  }

  Assignment run() {
    if (n_ > 0 && std::isinf(rem_cost_[0])) {
      throw Error(ErrorCode::Infeasible, infeasibility_reason(p_, t_, ok_));
    }
    dfs(0, 0.0, 0.0, 0.0);
    if (!best_) throw Error(ErrorCode::Infeasible, infeasibility_reason(p_, t_, ok_));
    best_->stats.nodes_explored = nodes_;
    return *best_;
  }

 private:
  static double prune_tol(double scale) { return 1e-7 * std::max(1.0, std::abs(scale)); }

  void dfs(std::size_t i, double cost, double latency, double rate) {
    if (++nodes_ > opts_.max_nodes) {
      throw Error(ErrorCode::BudgetExceeded, "branch-and-bound exceeded " + std::to_string(opts_.max_nodes) + " nodes");
    }
    if (i == n_) {
      Assignment a = evaluate_choice(p_, choice_);
      if (a.feasible && (!best_ || a.objective < best_->objective)) best_ = std::move(a);
      return;
    }
    for (std::size_t j = 0; j < h_; ++j) {
      if (!ok_[i][j]) continue;
      bool fits = true;
      for (std::size_t r = 0; r < p_.resources.size(); ++r) {
        usage_[j][r] += p_.theta[i][j][r];
        if (usage_[j][r] > p_.cap[j][r] + tolerance(p_.cap[j][r])) fits = false;
      }
      choice_[i] = static_cast<int>(j);
      double next_cost = cost + node_bound_[i][j];
      double next_lat = latency + t_[i][j];
      for (const ProblemEdge* e : closing_[i]) {
        const auto& comm = e->comm[choice_[e->src]][choice_[e->dst]];
        next_cost += comm.cost_usd;
        next_lat += comm.latency_ms;
      }
      const double next_rate = rate + (t_[i][j] > 0.0 ? 1.0 / t_[i][j] : kInf);
      if (fits && admissible(i + 1, next_cost, next_lat, next_rate)) dfs(i + 1, next_cost, next_lat, next_rate);
      for (std::size_t r = 0; r < p_.resources.size(); ++r) usage_[j][r] -= p_.theta[i][j][r];
      choice_[i] = -1;
    }
  }

  bool admissible(std::size_t next, double cost, double latency, double rate) const {
    if (p_.sla.min_throughput && rate + rem_rate_[next] < *p_.sla.min_throughput - prune_tol(*p_.sla.min_throughput)) {
      return false;
    }
    double bound = cost + rem_cost_[next];
    if (p_.sla.e2e_ms && p_.sla.scope == SlaScope::EndToEnd) {
      const double over = latency + rem_lat_[next] - *p_.sla.e2e_ms;
      if (p_.sla.hard()) {
        if (over > prune_tol(*p_.sla.e2e_ms)) return false;
      } else {
        bound += p_.sla.lambda_per_ms * std::max(0.0, over);
      }
    }
    return !best_ || bound <= best_->objective + prune_tol(best_->objective);
  }

  const AssignmentProblem& p_;
  DiscreteOptions opts_;
  std::size_t n_ = 0, h_ = 0;
  std::vector<std::vector<double>> t_, c_, node_bound_;
  std::vector<std::vector<bool>> ok_;
  std::vector<double> rem_cost_, rem_lat_, rem_rate_;
  std::vector<std::vector<const ProblemEdge*>> closing_;
  std::vector<std::vector<double>> usage_;
  std::vector<int> choice_;
  std::optional<Assignment> best_;
  std::int64_t nodes_ = 0;
};

}  // namespace

Assignment solve_discrete(const AssignmentProblem& p, const DiscreteOptions& opts) {
  if (p.mode != SolveMode::Discrete) throw Error(ErrorCode::InvalidArgument, "solve_discrete needs discrete mode");
  p.validate();
  return BranchAndBound(p, opts).run();
}

Assignment enumerate_oracle(const AssignmentProblem& p, double limit) {
  p.validate();
  const std::size_t n = p.n_tasks(), h = p.n_classes();
  if (std::pow(static_cast<double>(h), static_cast<double>(n)) > limit) {
    throw Error(ErrorCode::TooLarge, std::to_string(h) + "^" + std::to_string(n) + " assignments exceed the limit");
  }
  if (h == 0 && n > 0) throw Error(ErrorCode::Infeasible, "no device classes");
  std::vector<int> choice(n, 0);
  std::optional<Assignment> best;
  std::int64_t visited = 0;
  for (;;) {
    ++visited;
    Assignment a = evaluate_choice(p, choice);
    if (a.feasible && (!best || a.objective < best->objective)) best = std::move(a);
    // Odometer with the last task fastest: lexicographic order.
    std::size_t k = n;
    while (k > 0 && choice[k - 1] == static_cast<int>(h) - 1) choice[--k] = 0;
    if (k == 0) break;
    ++choice[k - 1];
  }
  if (!best) throw Error(ErrorCode::Infeasible, "no assignment satisfies every constraint");
  best->stats.nodes_explored = visited;
  return *best;
}

AssignmentProblem random_problem(std::uint64_t seed, int max_tasks, int max_classes) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto chance = [&](double prob) { return uniform(0.0, 1.0) < prob; };
  auto count = [&](int hi) { return std::uniform_int_distribution<int>(1, std::max(1, hi))(rng); };

  AssignmentProblem p;
  const int n = count(max_tasks);
  const int h = count(max_classes);
  for (int i = 0; i < n; ++i) p.tasks.push_back("t" + std::to_string(i));
  for (int j = 0; j < h; ++j) p.classes.push_back("c" + std::to_string(j));
  p.resources = {{"compute", true}, {"memory", true}, {"tokens", false}};
  const std::size_t nr = p.resources.size();
  p.theta.assign(n, matrix(h, nr, 0.0));
  for (auto& per_task : p.theta) {
    for (auto& row : per_task) {
      for (auto& v : row) v = chance(0.2) ? 0.0 : uniform(0.0, 100.0);
    }
  }
  p.perf = matrix(h, nr, 0.0);
  p.unit_cost = matrix(h, nr, 0.0);
  p.cap = matrix(h, nr, kInf);
  for (int j = 0; j < h; ++j) {
    for (std::size_t r = 0; r < nr; ++r) {
      p.perf[j][r] = uniform(1.0, 10.0);
      p.unit_cost[j][r] = uniform(0.0, 0.01);
      if (chance(0.15)) p.cap[j][r] = uniform(50.0, 100.0 * n);
    }
  }
  p.static_latency.resize(n);
  for (auto& l : p.static_latency) l = uniform(0.0, 20.0);
  p.pipeline_cost = matrix(n, h, 0.0);
  p.sync_cost = matrix(n, h, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < h; ++j) {
      p.pipeline_cost[i][j] = chance(0.5) ? uniform(0.0, 5.0) : 0.0;
      p.sync_cost[i][j] = chance(0.3) ? uniform(0.0, 2.0) : 0.0;
    }
  }
  p.gamma = uniform(0.0, 0.01);
  if (chance(0.1)) {
    p.allowed = matrix(n, h, true);
    for (int i = 0; i < n; ++i) {
      const int keep = std::uniform_int_distribution<int>(0, h - 1)(rng);
      for (int j = 0; j < h; ++j) p.allowed[i][j] = j == keep || chance(0.7);
    }
  }
  for (int i = 0; i + 1 < n; ++i) {
    ProblemEdge e;
    e.src = i;
    e.dst = i + 1;
    e.comm = matrix(h, h, EdgeComm{});
    for (int a = 0; a < h; ++a) {
      for (int b = 0; b < h; ++b) {
        if (a != b) e.comm[a][b] = {uniform(0.0, 5.0), uniform(0.0, 0.05)};
      }
    }
    p.edges.push_back(std::move(e));
  }
  p.sla.scope = chance(0.5) ? SlaScope::EndToEnd : SlaScope::PerTask;
  if (chance(0.7)) {
    // Bound between the fastest and slowest serialized latency.
    double fast = 0.0, slow = 0.0, fast_task = kInf, slow_task = 0.0;
    for (int i = 0; i < n; ++i) {
      double lo = kInf, hi = 0.0;
      for (int j = 0; j < h; ++j) {
        const double t = compute_tij(p, i, j);
        lo = std::min(lo, t);
        hi = std::max(hi, t);
      }
      fast += lo;
      slow += hi;
      fast_task = std::min(fast_task, lo);
      slow_task = std::max(slow_task, hi);
    }
    const double frac = uniform(0.0, 1.2);
    p.sla.e2e_ms = p.sla.scope == SlaScope::EndToEnd ? fast + frac * (slow - fast)
                                                     : fast_task + frac * (slow_task - fast_task);
    if (chance(0.5)) p.sla.lambda_per_ms = uniform(0.0, 0.01);
  }
  if (chance(0.15)) p.sla.min_throughput = uniform(0.0, 0.05) * n;
  p.mode = SolveMode::Discrete;
  return p;
}

}  // namespace agentplan
