#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "ggf/tune.hpp"
#include "oracle.hpp"

using namespace ggf;

namespace {

// Random dataset whose group test instances double as the validation split.
Dataset with_val(oracle::Gen& gen, bool sampled) {
  Dataset ds;
  do {
    ds = oracle::random_dataset(gen);
  } while (ds.test.size() < 2);
  ds.val = ds.test;
  if (sampled) ds = sample_negatives(ds, 1, 5);
  return ds;
}

// Items fall into clusters. Groups only touch items of their own cluster while
// members pick items uniformly, so only the group view carries the signal.
Dataset group_cooccurrence(std::uint64_t seed) {
  oracle::Gen gen(seed);
  const Index clusters = 4, per_cluster = 10, n_items = clusters * per_cluster;
  const Index n_groups = 60, n_members = 40;
  std::vector<Triplet<double>> gi, ui, gm;
  Dataset ds;
  ds.n_items = n_items;
  ds.n_groups = n_groups;
  ds.n_members = n_members;
  for (Index g = 0; g < n_groups; ++g) {
    const Index c = g % clusters;
    std::vector<Index> items(per_cluster);
    for (Index i = 0; i < per_cluster; ++i) items[i] = c * per_cluster + i;
    std::shuffle(items.begin(), items.end(), gen.engine());
    for (Index i = 0; i < 5; ++i) gi.push_back({g, items[i], 1.0});
    ds.val.push_back({Role::kGroup, g, items[5], {}});
    gm.push_back({g, gen.below(n_members), 1.0});
  }
  for (Index u = 0; u < n_members; ++u) {
    std::set<Index> picked;
    while (picked.size() < 5) picked.insert(gen.below(n_items));
    for (const Index i : picked) ui.push_back({u, i, 1.0});
  }
  ds.group_item = SparseMatrixd::from_triplets(n_groups, n_items, gi);
  ds.member_item = SparseMatrixd::from_triplets(n_members, n_items, ui);
  ds.membership = SparseMatrixd::from_triplets(n_groups, n_members, gm);
  ds.validate();
  return ds;
}

TuneGrid small_grid() {
  TuneGrid g;
  g.alphas = {0.0, 0.5, 1.0};
  g.betas = {0.0, 0.5};
  g.ss = {0.5, 1.0};
  for (auto& f : g.filters) f = {preset("linear"), preset("second_order")};
  return g;
}

}  // namespace

TEST(Grid, DefaultsAndSingleton) {
  const TuneGrid d = TuneGrid::defaults();
  EXPECT_EQ(d.alphas.size(), 11u);
  EXPECT_EQ(d.ss, (std::vector<double>{0.3, 0.5, 0.7, 1.0, 1.5, 2.0}));
  ModelConfig cfg;
  cfg.alpha = 0.2;
  const TuneGrid s = TuneGrid::singleton(cfg);
  EXPECT_EQ(s.alphas, std::vector<double>{0.2});
  EXPECT_EQ(s.filters[0].size(), 1u);
  TuneGrid bad = s;
  bad.ss = {0.0};
  EXPECT_THROW(bad.validate(), ParameterError);
  bad = s;
  bad.filters[1].clear();
  EXPECT_THROW(bad.validate(), ParameterError);
}

TEST(Search, SingletonGridGivesOneRowMatchingDirectEvaluation) {
  oracle::Gen gen(401);
  for (const bool sampled : {false, true}) {
    const Dataset ds = with_val(gen, sampled);
    ModelConfig cfg;
    cfg.alpha = 0.3;
    cfg.beta = 0.2;
    cfg.filter_g = preset("second_order");
    cfg.mask_seen = !sampled;
    const TuneResult r = grid_search(ds, TuneGrid::singleton(cfg), cfg);
    ASSERT_EQ(r.trace.size(), 1u);
    EXPECT_EQ(r.best_index, 0u);
    EXPECT_EQ(r.best, cfg);
    const Model model = build_model(ds, cfg);
    const EvalReport direct = evaluate(
        [&](const EvalInstance& i) { return score_subject(ds, model, i.role, i.subject); }, ds.val, {10});
    EXPECT_EQ(r.best_report.hr, direct.hr);
    EXPECT_EQ(r.best_report.ndcg, direct.ndcg);
  }
}

TEST(Search, EveryTraceRowMatchesFreshEvaluation) {
  oracle::Gen gen(403);
  for (const bool sampled : {false, true}) {
    const Dataset ds = with_val(gen, sampled);
    ModelConfig base;
    base.mask_seen = !sampled;
    TuneOptions opt;
    opt.report_ks = {1, 5, 10};
    const TuneResult r = grid_search(ds, small_grid(), base, opt);
    for (const auto& row : r.trace) {
      const Model model = build_model(ds, row.config);
      const EvalReport fresh = evaluate(
          [&](const EvalInstance& i) { return score_subject(ds, model, i.role, i.subject); }, ds.val,
          {1, 5, 10});
      EXPECT_EQ(row.report.hr, fresh.hr);
      EXPECT_EQ(row.report.ndcg, fresh.ndcg);
    }
  }
}

TEST(Search, TraceIsLexicographicAndFeasible) {
  oracle::Gen gen(405);
  const Dataset ds = with_val(gen, false);
  const TuneResult r = grid_search(ds, small_grid(), ModelConfig{});
  // 5 feasible (α, β) pairs × 2 s values × 8 filter combinations.
  EXPECT_EQ(r.trace.size(), 5u * 2u * 8u);
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LT(r.trace[i - 1].point, r.trace[i].point);
  for (const auto& row : r.trace) EXPECT_LE(row.point.alpha + row.point.beta, 1.0);
}

TEST(Search, BestIsFirstMaximum) {
  oracle::Gen gen(407);
  for (int t = 0; t < 10; ++t) {
    const Dataset ds = with_val(gen, t % 2 == 1);
    TuneOptions opt;
    opt.metric = t % 3 == 0 ? TargetMetric::kHr : TargetMetric::kNdcg;
    opt.k = 5;
    const TuneResult r = grid_search(ds, small_grid(), ModelConfig{}, opt);
    auto value = [&](const TraceRow& row) {
      return opt.metric == TargetMetric::kHr ? row.report.hr_at(5) : row.report.ndcg_at(5);
    };
    std::size_t first = 0;
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
      if (value(r.trace[i]) > value(r.trace[first])) first = i;
    }
    EXPECT_EQ(r.best_index, first);
    EXPECT_EQ(r.best, r.trace[first].config);
  }
}

TEST(Search, TiesGoToFirstPoint) {
  oracle::Gen gen(409);
  const Dataset ds = with_val(gen, false);
  TuneGrid grid;
  grid.alphas = {0.0, 0.5};
  grid.betas = {0.0};
  grid.ss = {1.0};
  for (auto& f : grid.filters) f = {preset("linear")};
  ModelConfig base;
  base.enabled = {true, false, false};
  // α = 0.5 alone puts weight on a disabled view and renormalizes to the
  // member view, so both points score identically.
  const TuneResult r = grid_search(ds, grid, base);
  ASSERT_EQ(r.trace.size(), 2u);
  EXPECT_EQ(r.trace[0].report.ndcg, r.trace[1].report.ndcg);
  EXPECT_EQ(r.best_index, 0u);
}

TEST(Search, GroupSignalFavoursGroupWeight) {
  const Dataset ds = group_cooccurrence(411);
  TuneGrid grid;
  grid.alphas = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  grid.betas = {0.0, 0.2, 0.4};
  grid.ss = {1.0};
  for (auto& f : grid.filters) f = {preset("linear")};
  ModelConfig base;
  base.mask_seen = true;
  const TuneResult r = grid_search(ds, grid, base);
  EXPECT_GE(r.best.alpha, 0.6);
  EXPECT_GT(r.best_report.hr_at(10), r.trace.front().report.hr_at(10));
}

TEST(Search, CacheSpotCheckPasses) {
  oracle::Gen gen(413);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Dataset ds = with_val(gen, seed % 2 == 0);
    TuneOptions opt;
    opt.seed = seed;
    const TuneResult r = grid_search(ds, small_grid(), ModelConfig{}, opt);
    EXPECT_TRUE(r.cache_checked);
    EXPECT_TRUE(r.cache_check_passed);
    EXPECT_LT(r.cache_check_index, r.trace.size());
  }
}

TEST(Search, EmptyValidationIsProtocolError) {
  oracle::Gen gen(415);
  Dataset ds = oracle::random_dataset(gen);
  ds.val.clear();
  EXPECT_THROW(grid_search(ds, small_grid(), ModelConfig{}), ProtocolError);
  TuneOptions members;
  members.role = Role::kMember;
  ds.val = ds.test;
  EXPECT_THROW(grid_search(ds, small_grid(), ModelConfig{}, members), ProtocolError);
}

TEST(Search, GraphSourceServesEveryBuild) {
  oracle::Gen gen(417);
  const Dataset ds = with_val(gen, false);
  int calls = 0;
  TuneOptions opt;
  opt.verify_cache = false;
  opt.graphs = [&](View v, double s, bool m) {
    ++calls;
    return std::make_shared<const SimilarityGraph>(build_view(ds, v, s, m));
  };
  const TuneResult with_source = grid_search(ds, small_grid(), ModelConfig{}, opt);
  // Three views for each of two s values.
  EXPECT_EQ(calls, 6);
  opt.graphs = {};
  const TuneResult without = grid_search(ds, small_grid(), ModelConfig{}, opt);
  for (std::size_t i = 0; i < without.trace.size(); ++i) {
    EXPECT_EQ(with_source.trace[i].report.ndcg, without.trace[i].report.ndcg);
  }
}

TEST(Trace, TsvColumns) {
  oracle::Gen gen(419);
  const Dataset ds = with_val(gen, false);
  const TuneResult r = grid_search(ds, small_grid(), ModelConfig{});
  std::istringstream in(trace_to_tsv(r, 10));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "alpha\tbeta\ts\tpreset_u\tpreset_g\tpreset_uni\thr@10\tndcg@10\tms");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), '\t'), 8);
  }
  EXPECT_EQ(rows, r.trace.size());
}
