#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "agentplan/dsl.hpp"
#include "agentplan/error.hpp"
#include "agentplan/planner.hpp"

namespace agentplan {

using nlohmann::json;

std::pair<std::string, std::string> parse_label(const std::string& label) {
  const auto sep = label.find("::");
  if (sep == std::string::npos || sep == 0 || sep + 2 >= label.size() || label.find("::", sep + 2) != std::string::npos) {
    throw Error(ErrorCode::InvalidArgument, "expected '<prefill>::<decode>', got '" + label + "'");
  }
  return {label.substr(0, sep), label.substr(sep + 2)};
}

std::vector<std::pair<std::string, std::string>> parse_pairs(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_label(item));
  }
  return out;
}

namespace {

constexpr std::int64_t kMaxSweepBatch = 4096;

enum class Stage { Prefill, Decode };

struct Evaluated {
  bool feasible = false;
  double latency_ms = 0.0;
  double rps = 0.0;
};

StageConfig best_stage(Stage stage, const ModelSpec& m, const WorkloadShape& shape, const DeviceClass& d,
                       const SlaSpec& sla, const CostModelParams& cost, const SweepOptions& opts) {
  if (shape.isl_tokens < 1 || shape.osl_tokens < 1) {
    throw Error(ErrorCode::InvalidArgument, "sweep needs isl >= 1 and osl >= 1");
  }
  const bool latency_mode = sla.mode == SlaMode::Latency;
  const double hourly = hourly_cost(d, cost);
  StageConfig best;
  best.device = d.name;
  best.binding_constraint = "memory capacity";
  bool fits_somewhere = false;

  for (int pp : opts.pp_choices) {
    for (int tp : opts.tp_choices) {
      if (tp > d.max_per_chassis) continue;
      const ParallelismConfig par{tp, pp, 1};
      if (m.weight_bytes() / par.devices() > d.mem_capacity_gb * 1e9) continue;
      const std::int64_t limit = std::min(max_batch(m, shape, d, par), kMaxSweepBatch);
      if (limit < 1) continue;
      fits_somewhere = true;

      auto evaluate = [&](std::int64_t bs) {
        WorkloadShape s = shape;
        s.batch_size = bs;
        Evaluated e;
        if (stage == Stage::Prefill) {
          const auto est = prefill_time_ms(m, s, d, par, opts.prefill_mfu);
          e.latency_ms = est.ttft_ms;
          e.feasible = !(latency_mode && sla.ttft_ms && est.ttft_ms > *sla.ttft_ms);
          e.rps = static_cast<double>(bs) * pp * 1000.0 / est.ttft_ms;
        } else {
          PerfOptions po;
          po.mem_efficiency = opts.decode_mem_efficiency;
          const auto est = decode_time_ms(m, s, d, par, opts.decode_mfu, po);
          e.latency_ms = est.tbt_ms;
          e.feasible = !(latency_mode && sla.tbt_ms && est.tbt_ms > *sla.tbt_ms);
          e.rps = static_cast<double>(bs) * pp * 1000.0 / est.tbt_ms / static_cast<double>(shape.osl_tokens);
        }
        return e;
      };
      const double usd_hr = hourly * par.devices();
      std::int64_t local_best = 0;
      double local_cost = kInf;
      auto consider = [&](std::int64_t bs) {
        const Evaluated e = evaluate(bs);
        if (!e.feasible) return;
        const double per_request = usd_hr / (3600.0 * e.rps);
        if (per_request < local_cost) {
          local_cost = per_request;
          local_best = bs;
        }
        if (!best.feasible || per_request < best.usd_per_request) {
          best.feasible = true;
          best.par = par;
          best.batch_size = bs;
          best.latency_ms = e.latency_ms;
          best.requests_per_sec = e.rps;
          best.usd_per_hr = usd_hr;
          best.usd_per_request = per_request;
          best.binding_constraint.clear();
        }
      };

      for (std::int64_t bs = 1; bs <= limit; bs *= 2) consider(bs);
      if (local_best > 0) {
        const auto lo = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(0.75 * local_best)));
        const auto hi = std::min<std::int64_t>(limit, static_cast<std::int64_t>(std::floor(1.25 * local_best)));
        for (std::int64_t bs = lo; bs <= hi; ++bs) consider(bs);
      }
    }
  }
  if (!best.feasible && fits_somewhere) {
    best.binding_constraint = stage == Stage::Prefill ? "ttft bound" : "tbt bound";
  }
  return best;
}

}  // namespace

StageConfig best_prefill(const ModelSpec& m, const WorkloadShape& shape, const DeviceClass& d, const SlaSpec& sla,
                         const CostModelParams& cost, const SweepOptions& opts) {
  return best_stage(Stage::Prefill, m, shape, d, sla, cost, opts);
}

StageConfig best_decode(const ModelSpec& m, const WorkloadShape& shape, const DeviceClass& d, const SlaSpec& sla,
                        const CostModelParams& cost, const SweepOptions& opts) {
  return best_stage(Stage::Decode, m, shape, d, sla, cost, opts);
}

std::pair<int, int> rate_match(double prefill_rps, double decode_rps, double tol, int max_pool) {
  if (!(prefill_rps > 0.0 && decode_rps > 0.0) || max_pool < 1) {
    throw Error(ErrorCode::InvalidArgument, "rate matching needs positive rates");
  }
  std::pair<int, int> closest{1, 1};
  double closest_gap = kInf;
  for (int total = 2; total <= 2 * max_pool; ++total) {
    for (int np = std::max(1, total - max_pool); np <= std::min(max_pool, total - 1); ++np) {
      const int nd = total - np;
      const double a = np * prefill_rps, b = nd * decode_rps;
      const double gap = std::abs(a - b) / std::max(a, b);
      if (gap <= tol) return {np, nd};
      if (gap < closest_gap) {
        closest_gap = gap;
        closest = {np, nd};
      }
    }
  }
  return closest;
}

std::vector<TcoRow> normalize_vs_baseline(std::vector<TcoRow> rows, const std::string& baseline) {
  const TcoRow* base = nullptr;
  for (const auto& r : rows) {
    if (r.label == baseline && r.feasible) base = &r;
  }
  if (!base) throw Error(ErrorCode::BaselineMissing, "no feasible row labelled '" + baseline + "'");
  const double base_cost = base->cost_per_token;
  for (auto& r : rows) {
    r.tco_ratio_vs_baseline = r.feasible ? (r.label == baseline ? 1.0 : base_cost / r.cost_per_token) : 0.0;
  }
  return rows;
}

std::vector<TcoRow> sweep_pairs(const ModelSpec& m, const WorkloadShape& shape, const HardwareCatalog& catalog,
                                const SlaSpec& sla, const std::string& baseline, const SweepOptions& opts) {
  m.validate();
  sla.validate();
  std::pair<std::string, std::string> base;
  try {
    base = parse_label(baseline);
  } catch (const Error& e) {
    throw Error(ErrorCode::BaselineInfeasible, e.what());
  }
  if (!catalog.find(base.first) || !catalog.find(base.second)) {
    throw Error(ErrorCode::BaselineInfeasible, "baseline '" + baseline + "' names a class missing from the catalog");
  }
  auto pairs = opts.pairs;
  if (pairs.empty()) {
    for (const auto& p : catalog.classes) {
      for (const auto& d : catalog.classes) pairs.emplace_back(p.name, d.name);
    }
  }
  if (std::find(pairs.begin(), pairs.end(), base) == pairs.end()) pairs.push_back(base);

  std::map<std::string, StageConfig> prefill_best, decode_best;
  auto prefill_for = [&](const std::string& name) -> const StageConfig& {
    auto it = prefill_best.find(name);
    if (it == prefill_best.end()) {
      it = prefill_best.emplace(name, best_prefill(m, shape, catalog.at(name), sla, catalog.cost_params, opts)).first;
    }
    return it->second;
  };
  auto decode_for = [&](const std::string& name) -> const StageConfig& {
    auto it = decode_best.find(name);
    if (it == decode_best.end()) {
      it = decode_best.emplace(name, best_decode(m, shape, catalog.at(name), sla, catalog.cost_params, opts)).first;
    }
    return it->second;
  };

  const double kv_one = static_cast<double>(kv_cache_bytes(m, shape.isl_tokens, 1));
  std::vector<TcoRow> rows;
  for (const auto& [pn, dn] : pairs) {
    TcoRow row;
    row.label = pn + "::" + dn;
    row.model = m.name;
    row.precision = m.precision;
    row.isl = shape.isl_tokens;
    row.osl = shape.osl_tokens;
    row.sla_mode = sla.mode;
    row.prefill = prefill_for(pn);
    row.decode = decode_for(dn);
    row.feasible = row.prefill.feasible && row.decode.feasible;
    if (!row.feasible) {
      row.binding_constraint = !row.prefill.feasible ? "prefill: " + row.prefill.binding_constraint
                                                     : "decode: " + row.decode.binding_constraint;
      rows.push_back(std::move(row));
      continue;
    }
    std::tie(row.prefill_replicas, row.decode_replicas) =
        rate_match(row.prefill.requests_per_sec, row.decode.requests_per_sec, opts.rate_match_tolerance,
                   opts.max_pool);
    const double rps = std::min(row.prefill_replicas * row.prefill.requests_per_sec,
                                row.decode_replicas * row.decode.requests_per_sec);
    row.tokens_per_sec = rps * static_cast<double>(shape.osl_tokens);
    row.usd_per_hr = row.prefill_replicas * row.prefill.usd_per_hr + row.decode_replicas * row.decode.usd_per_hr;
    row.cost_per_token = row.usd_per_hr / (3600.0 * row.tokens_per_sec);
    row.tokens_per_sec_per_dollar = row.tokens_per_sec / row.usd_per_hr;
    const DeviceClass& pd = catalog.at(pn);
    const DeviceClass& dd = catalog.at(dn);
    const double link = std::min(pd.scaleout_bw_gbps_bits, dd.scaleout_bw_gbps_bits);
    row.kv_transfer_ms = kv_one * 8.0 / (link * 1e9) * 1000.0;
    row.peak_egress_gbps = peak_egress_gbps(kv_one * static_cast<double>(row.prefill.batch_size),
                                            row.prefill.latency_ms, row.prefill.par.devices());
    row.peak_ingress_gbps = peak_ingress_gbps(kv_one, row.decode.latency_ms, row.decode.par.devices());
    rows.push_back(std::move(row));
  }

  bool base_feasible = false;
  for (const auto& r : rows) {
    if (r.label == baseline && r.feasible) base_feasible = true;
  }
  if (!base_feasible) throw Error(ErrorCode::BaselineInfeasible, "baseline '" + baseline + "' has no feasible config");
  rows = normalize_vs_baseline(std::move(rows), baseline);
  std::stable_sort(rows.begin(), rows.end(), [](const TcoRow& a, const TcoRow& b) {
    if (a.feasible != b.feasible) return a.feasible;
    if (a.tco_ratio_vs_baseline != b.tco_ratio_vs_baseline) return a.tco_ratio_vs_baseline > b.tco_ratio_vs_baseline;
    return a.label < b.label;
  });
  return rows;
}

namespace {

json stage_to_json(const StageConfig& s) {
  return json{{"device", s.device},
              {"tp", s.par.tp_degree},
              {"pp", s.par.pp_degree},
              {"batch_size", s.batch_size},
              {"latency_ms", s.latency_ms},
              {"requests_per_sec", s.requests_per_sec},
              {"usd_per_hr", s.usd_per_hr},
              {"usd_per_request", s.usd_per_request},
              {"feasible", s.feasible}};
}

}  // namespace

json tco_row_to_json(const TcoRow& r) {
  return json{{"label", r.label},
              {"model", r.model},
              {"precision", r.precision},
              {"isl", r.isl},
              {"osl", r.osl},
              {"sla_mode", std::string(to_string(r.sla_mode))},
              {"prefill", stage_to_json(r.prefill)},
              {"decode", stage_to_json(r.decode)},
              {"prefill_replicas", r.prefill_replicas},
              {"decode_replicas", r.decode_replicas},
              {"tokens_per_sec", r.tokens_per_sec},
              {"usd_per_hr", r.usd_per_hr},
              {"cost_per_token", r.cost_per_token},
              {"tokens_per_sec_per_dollar", r.tokens_per_sec_per_dollar},
              {"tco_ratio_vs_baseline", r.tco_ratio_vs_baseline},
              {"kv_transfer_ms", r.kv_transfer_ms},
              {"peak_egress_gbps", r.peak_egress_gbps},
              {"peak_ingress_gbps", r.peak_ingress_gbps},
              {"feasible", r.feasible},
              {"binding_constraint", r.binding_constraint}};
}

std::string tco_rows_to_csv(const std::vector<TcoRow>& rows) {
  std::ostringstream os;
  os << "label,model,precision,isl,osl,sla_mode,prefill_tp,prefill_pp,prefill_batch,prefill_replicas,"
        "decode_tp,decode_pp,decode_batch,decode_replicas,ttft_ms,tbt_ms,tokens_per_sec,usd_per_hr,"
        "cost_per_1m_tokens,tokens_per_sec_per_dollar,tco_ratio_vs_baseline,feasible,binding_constraint\n";
  for (const auto& r : rows) {
    os << r.label << ',' << r.model << ',' << r.precision << ',' << r.isl << ',' << r.osl << ','
       << to_string(r.sla_mode) << ',' << r.prefill.par.tp_degree << ',' << r.prefill.par.pp_degree << ','
       << r.prefill.batch_size << ',' << r.prefill_replicas << ',' << r.decode.par.tp_degree << ','
       << r.decode.par.pp_degree << ',' << r.decode.batch_size << ',' << r.decode_replicas << ','
       << format_double(r.prefill.latency_ms) << ',' << format_double(r.decode.latency_ms) << ','
       << format_double(r.tokens_per_sec) << ',' << format_double(r.usd_per_hr) << ','
       << format_double(r.cost_per_token * 1e6) << ',' << format_double(r.tokens_per_sec_per_dollar) << ','
       << format_double(r.tco_ratio_vs_baseline) << ',' << (r.feasible ? "true" : "false") << ','
       << r.binding_constraint << '\n';
  }
  return os.str();
}

}  // namespace agentplan
