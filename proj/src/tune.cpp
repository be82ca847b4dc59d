#include "ggf/tune.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include <fmt/core.h>

#include "ggf/rng.hpp"

namespace ggf {
namespace {

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

double target_value(const EvalReport& r, const TuneOptions& o) {
  return o.metric == TargetMetric::kHr ? r.hr_at(o.k) : r.ndcg_at(o.k);
}

// Filtered view scores of every validation instance, restricted to its
// candidates sorted by item index (or the full row under full ranking).
struct CachedScores {
  // [view][filter choice][instance]
  std::array<std::vector<std::vector<DenseRowd>>, 3> rows;
};

}  // namespace

TuneGrid TuneGrid::defaults() {
  TuneGrid g;
  for (int i = 0; i <= 10; ++i) {
    g.alphas.push_back(i / 10.0);
    g.betas.push_back(i / 10.0);
  }
  g.ss = {0.3, 0.5, 0.7, 1.0, 1.5, 2.0};
  for (auto& f : g.filters) f = {preset("linear"), preset("second_order")};
  return g;
}

TuneGrid TuneGrid::singleton(const ModelConfig& cfg) {
  TuneGrid g;
  g.alphas = {cfg.alpha};
  g.betas = {cfg.beta};
  g.ss = {cfg.s};
  for (const View v : kAllViews) g.filters[static_cast<int>(v)] = {cfg.filter_for(v)};
  return g;
}

void TuneGrid::validate() const {
  if (alphas.empty() || betas.empty() || ss.empty()) throw ParameterError("tuning grid has an empty axis");
  for (const double s : ss) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ParameterError(fmt::format("grid s value {} must be > 0", s));
  }
  for (const auto& f : filters) {
    if (f.empty()) throw ParameterError("tuning grid needs at least one filter per view");
    for (const auto& spec : f) spec.validate();
  }
}

TuneResult grid_search(const Dataset& ds, const TuneGrid& grid, const ModelConfig& base,
                       const TuneOptions& options) {
  grid.validate();
  const std::vector<EvalInstance> instances = select_role(ds.val, options.role);
  if (instances.empty()) throw ProtocolError("validation split has no instances to tune on");
  const bool sampled = !instances.front().all_items();
  for (const auto& inst : instances) {
    if (inst.all_items() == sampled) throw ProtocolError("validation instances mix protocols");
  }
  std::vector<Index> report_ks = options.report_ks;
  if (std::find(report_ks.begin(), report_ks.end(), options.k) == report_ks.end()) {
    report_ks.push_back(options.k);
  }

  // Feasible points in lexicographic order.
  const auto alphas = sorted_unique(grid.alphas);
  const auto betas = sorted_unique(grid.betas);
  const auto ss = sorted_unique(grid.ss);
  std::vector<TraceRow> trace;
  for (const double a : alphas) {
    for (const double b : betas) {
      if (a + b > 1.0 + 1e-12) continue;
      for (const double s : ss) {
        for (std::size_t fu = 0; fu < grid.filters[0].size(); ++fu) {
          for (std::size_t fg = 0; fg < grid.filters[1].size(); ++fg) {
            for (std::size_t fn = 0; fn < grid.filters[2].size(); ++fn) {
              ModelConfig cfg = base;
              cfg.alpha = a;
              cfg.beta = b;
              cfg.s = s;
              cfg.s_override = {};
              cfg.filter_u = grid.filters[0][fu];
              cfg.filter_g = grid.filters[1][fg];
              cfg.filter_uni = grid.filters[2][fn];
              try {
                cfg.validate();
              } catch (const ParameterError&) {
                continue;  // e.g. all weight on disabled views
              }
              trace.push_back({GridPoint{a, b, s, {fu, fg, fn}}, std::move(cfg), {}, 0.0});
            }
          }
        }
      }
    }
  }
  if (trace.empty()) throw ParameterError("no feasible grid point");

  std::vector<std::vector<Index>> sorted_candidates(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    sorted_candidates[i] = instances[i].candidates;
    std::sort(sorted_candidates[i].begin(), sorted_candidates[i].end());
  }

  std::map<double, std::vector<std::size_t>> by_s;
  for (std::size_t i = 0; i < trace.size(); ++i) by_s[trace[i].point.s].push_back(i);

  for (const auto& [s, members] : by_s) {
    const auto build_start = std::chrono::steady_clock::now();
    std::array<bool, 3> needed{};
    for (const std::size_t i : members) {
      const auto w = trace[i].config.weights();
      for (int v = 0; v < 3; ++v) needed[v] = needed[v] || w[v] != 0.0;
    }
    CachedScores cache;
    for (const View view : kAllViews) {
      const int v = static_cast<int>(view);
      if (!needed[v]) continue;
      auto graph = options.graphs ? options.graphs(view, s, base.use_membership)
                                  : std::make_shared<const SimilarityGraph>(build_view(ds, view, s, base.use_membership));
      for (const auto& spec : grid.filters[v]) {
        const AppliedFilter filter = AppliedFilter::make(graph, spec, options.filter);
        std::vector<DenseRowd> rows(instances.size());
        parallel_for(instances.size(), [&](Index i, int) {
          const DenseRowd full = filter.apply(ds.signal(options.role, instances[i].subject));
          if (!sampled) {
            rows[i] = full;
            return;
          }
          const auto& cands = sorted_candidates[i];
          rows[i].resize(static_cast<Eigen::Index>(cands.size()));
          for (std::size_t j = 0; j < cands.size(); ++j) {
            rows[i][static_cast<Eigen::Index>(j)] = full[static_cast<Eigen::Index>(cands[j])];
          }
        });
        cache.rows[v].push_back(std::move(rows));
      }
    }
    const double build_ms = elapsed_ms(build_start) / static_cast<double>(members.size());

    parallel_for(members.size(), [&](Index m, int) {
      const auto start = std::chrono::steady_clock::now();
      TraceRow& row = trace[members[m]];
      const auto w = row.config.weights();
      std::vector<Index> ranks(instances.size());
      for (std::size_t i = 0; i < instances.size(); ++i) {
        ViewScores parts;
        for (int v = 0; v < 3; ++v) {
          if (w[v] != 0.0) parts[v] = cache.rows[v][row.point.filter_index[v]][i];
        }
        ScoreRow scored{options.role, instances[i].subject, combine_views(w, parts), {}};
        if (sampled) {
          const auto& cands = sorted_candidates[i];
          const auto pos = std::lower_bound(cands.begin(), cands.end(), instances[i].positive) - cands.begin();
          ranks[i] = rank_of_positive(scored.scores, EvalInstance{options.role, 0, static_cast<Index>(pos), {}});
        } else {
          if (row.config.mask_seen) mask_training_items(ds, scored);
          ranks[i] = rank_of_positive(scored.scores, instances[i]);
        }
      }
      row.report = report_from_ranks(ranks, sampled ? Protocol::kSampled : Protocol::kFull, report_ks);
      row.ms = build_ms + elapsed_ms(start);
    });
  }

  TuneResult result;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (target_value(trace[i].report, options) > target_value(trace[result.best_index].report, options)) {
      result.best_index = i;
    }
  }
  result.best = trace[result.best_index].config;
  result.best_report = trace[result.best_index].report;

  if (options.verify_cache) {
    std::mt19937_64 rng(splitmix64(options.seed));
    result.cache_check_index = static_cast<std::size_t>(uniform_below(rng, trace.size()));
    const TraceRow& probe = trace[result.cache_check_index];
    const Model model = build_model(ds, probe.config, options.filter);
    const EvalReport fresh = evaluate(
        [&](const EvalInstance& inst) { return score_subject(ds, model, inst.role, inst.subject); },
        instances, report_ks);
    result.cache_checked = true;
    result.cache_check_passed = fresh.hr == probe.report.hr && fresh.ndcg == probe.report.ndcg;
  }
  result.trace = std::move(trace);
  return result;
}

std::string trace_to_tsv(const TuneResult& result, Index k) {
  std::string out = fmt::format("alpha\tbeta\ts\tpreset_u\tpreset_g\tpreset_uni\thr@{0}\tndcg@{0}\tms\n", k);
  for (const auto& row : result.trace) {
    out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{:.6f}\t{:.6f}\t{:.3f}\n", row.point.alpha, row.point.beta,
                       row.point.s, row.config.filter_u.label(), row.config.filter_g.label(),
                       row.config.filter_uni.label(), row.report.hr_at(k), row.report.ndcg_at(k), row.ms);
  }
  return out;
}

}  // namespace ggf
