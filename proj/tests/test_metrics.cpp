#include <gtest/gtest.h>

#include <cmath>

#include <json.hpp>

#include "ggf/metrics.hpp"
#include "oracle.hpp"

using namespace ggf;

namespace {

// Instance whose positive sits at 1-based rank `rank` among n candidates.
std::pair<EvalInstance, DenseRowd> at_rank(Index rank, Index n) {
  EvalInstance inst{Role::kGroup, 0, rank - 1, {}};
  DenseRowd s(static_cast<Eigen::Index>(n));
  for (Index i = 0; i < n; ++i) s[static_cast<Eigen::Index>(i)] = static_cast<double>(n - i);
  return {inst, s};
}

EvalReport single(Index rank, std::vector<Index> ks) {
  return report_from_ranks({rank}, Protocol::kFull, std::move(ks));
}

}  // namespace

TEST(ClosedForms, NdcgAndHr) {
  EXPECT_EQ(single(1, {10}).ndcg_at(10), 1.0);
  EXPECT_EQ(single(1, {10}).hr_at(10), 1.0);
  EXPECT_EQ(single(3, {10}).ndcg_at(10), 0.5);
  EXPECT_EQ(single(11, {10}).ndcg_at(10), 0.0);
  EXPECT_EQ(single(11, {10}).hr_at(10), 0.0);
  EXPECT_NEAR(single(2, {10}).ndcg_at(10), 1.0 / std::log2(3.0), 1e-15);
  EXPECT_THROW(single(1, {10}).hr_at(5), ParameterError);
}

TEST(Rank, TiesBreakByItemIndex) {
  EvalInstance inst{Role::kGroup, 0, 2, {}};
  DenseRowd s(4);
  s << 0.5, 0.9, 0.9, 0.1;
  EXPECT_EQ(rank_of_positive(s, inst), 2u);
  inst.positive = 1;
  EXPECT_EQ(rank_of_positive(s, inst), 1u);
  inst.candidates = {2, 3, 0};
  inst.positive = 2;
  EXPECT_EQ(rank_of_positive(s, inst), 1u);
}

TEST(Rank, MaskedPositiveIsProtocolError) {
  EvalInstance inst{Role::kGroup, 0, 0, {}};
  DenseRowd s(3);
  s << kMaskedScore, 1.0, kMaskedScore;
  EXPECT_THROW(rank_of_positive(s, inst), ProtocolError);
  inst.positive = 1;
  EXPECT_EQ(rank_of_positive(s, inst), 1u);
}

TEST(Rank, AgreesWithFullSortOracle) {
  oracle::Gen gen(301);
  for (int t = 0; t < 200; ++t) {
    const Index n = gen.between(2, 80);
    DenseRowd s(static_cast<Eigen::Index>(n));
    for (auto& v : s) v = static_cast<double>(gen.below(6));
    std::vector<Index> items(n);
    std::iota(items.begin(), items.end(), Index{0});
    EvalInstance inst{Role::kGroup, 0, gen.below(n), {}};
    if (gen.chance(0.5)) {
      std::shuffle(items.begin(), items.end(), gen.engine());
      items.resize(gen.between(1, n));
      if (std::find(items.begin(), items.end(), inst.positive) == items.end()) items.push_back(inst.positive);
      inst.candidates = items;
    }
    EXPECT_EQ(rank_of_positive(s, inst), oracle::rank_by_sort(s, items, inst.positive));
  }
}

TEST(Properties, HrEqualsNdcgAtOne) {
  oracle::Gen gen(303);
  for (int t = 0; t < 50; ++t) {
    std::vector<Index> ranks(gen.between(1, 40));
    for (auto& r : ranks) r = gen.between(1, 5);
    const EvalReport rep = report_from_ranks(ranks, Protocol::kSampled, {1, 5});
    EXPECT_EQ(rep.hr_at(1), rep.ndcg_at(1));
  }
}

TEST(Properties, MonotoneInKAndBounded) {
  oracle::Gen gen(305);
  for (int t = 0; t < 50; ++t) {
    std::vector<Index> ranks(gen.between(1, 40));
    for (auto& r : ranks) r = gen.between(1, 30);
    const EvalReport rep = report_from_ranks(ranks, Protocol::kFull, {20, 1, 5, 10, 5});
    EXPECT_EQ(rep.ks, (std::vector<Index>{1, 5, 10, 20}));
    for (std::size_t i = 1; i < rep.ks.size(); ++i) {
      EXPECT_LE(rep.hr[i - 1], rep.hr[i]);
      EXPECT_LE(rep.ndcg[i - 1], rep.ndcg[i]);
    }
    for (std::size_t i = 0; i < rep.ks.size(); ++i) {
      EXPECT_LE(rep.ndcg[i], rep.hr[i]);
      EXPECT_LE(rep.hr[i], 1.0);
      EXPECT_GE(rep.ndcg[i], 0.0);
    }
  }
}

TEST(Properties, InvariantUnderMonotoneTransforms) {
  oracle::Gen gen(307);
  for (int t = 0; t < 20; ++t) {
    const Index n = gen.between(5, 50);
    std::vector<EvalInstance> instances;
    std::vector<DenseRowd> rows;
    for (int i = 0; i < 10; ++i) {
      DenseRowd s(static_cast<Eigen::Index>(n));
      for (auto& v : s) v = gen.unit();
      rows.push_back(s);
      instances.push_back({Role::kGroup, static_cast<Index>(i), gen.below(n), {}});
    }
    auto eval = [&](auto transform) {
      const Scorer scorer = [&](const EvalInstance& inst) {
        ScoreRow r{Role::kGroup, inst.subject, rows[inst.subject].unaryExpr(transform), {}};
        return r;
      };
      return evaluate(scorer, instances, {1, 3, 10});
    };
    const EvalReport base = eval([](double x) { return x; });
    const EvalReport cubed = eval([](double x) { return 3.0 * x * x * x + 2.0; });
    const EvalReport logged = eval([](double x) { return std::log(x + 1e-3); });
    EXPECT_EQ(base.hr, cubed.hr);
    EXPECT_EQ(base.ndcg, cubed.ndcg);
    EXPECT_EQ(base.hr, logged.hr);
    EXPECT_EQ(base.ndcg, logged.ndcg);
  }
}

TEST(Properties, TopKShortcutAgreesWithFullSort) {
  oracle::Gen gen(309);
  for (int t = 0; t < 30; ++t) {
    const Index n = gen.between(5, 60);
    ScoreRow row;
    row.scores = DenseRowd(static_cast<Eigen::Index>(n));
    for (auto& v : row.scores) v = static_cast<double>(gen.below(8));
    const EvalInstance inst{Role::kGroup, 0, gen.below(n), {}};
    const Index r = rank_of_positive(row.scores, inst);
    for (const Index k : {1, 5, 10}) {
      const TopK top = top_k(row, k);
      const bool hit = std::find(top.items.begin(), top.items.end(), inst.positive) != top.items.end();
      EXPECT_EQ(hit, r <= static_cast<Index>(k));
    }
  }
}

TEST(Evaluate, OverDatasetInstancesAndErrors) {
  const auto [inst, s] = at_rank(3, 10);
  const Scorer scorer = [&](const EvalInstance&) { return ScoreRow{Role::kGroup, 0, s, {}}; };
  const EvalReport rep = evaluate(scorer, {inst, inst}, {10, 1});
  EXPECT_EQ(rep.n_instances, 2u);
  EXPECT_EQ(rep.protocol, Protocol::kFull);
  EXPECT_EQ(rep.ndcg_at(10), 0.5);
  EXPECT_EQ(rep.hr_at(1), 0.0);
  EXPECT_THROW(evaluate(scorer, {}, {10}), ProtocolError);
  EvalInstance sampled = inst;
  sampled.candidates = {inst.positive, 0};
  EXPECT_THROW(evaluate(scorer, {inst, sampled}, {10}), ProtocolError);
  const Scorer failing = [](const EvalInstance&) -> ScoreRow { throw IndexError("boom"); };
  EXPECT_THROW(evaluate(failing, {inst}, {10}), IndexError);
  EXPECT_THROW(evaluate(scorer, {inst}, {}), ParameterError);
  EXPECT_THROW(evaluate(scorer, {inst}, {0}), ParameterError);
}

TEST(Compare, SelfAndHandComputed) {
  const EvalReport a = report_from_ranks({1, 2, 11, 4}, Protocol::kSampled, {10});
  const ReportDelta self = compare_reports(a, a);
  EXPECT_EQ(self.hr_delta, std::vector<double>{0.0});
  EXPECT_EQ(self.ndcg_relative, std::vector<double>{0.0});

  EvalReport x = a, y = a;
  x.hr = {0.9028};
  y.hr = {0.7757};
  const ReportDelta d = compare_reports(x, y);
  EXPECT_NEAR(d.hr_delta[0], 0.1271, 1e-12);
  EXPECT_NEAR(d.hr_relative[0], 0.1271 / 0.7757, 1e-12);
  EXPECT_NEAR(d.hr_relative[0], 0.164, 5e-4);

  EvalReport full = a;
  full.protocol = Protocol::kFull;
  EXPECT_THROW(compare_reports(a, full), ParameterError);
  EvalReport other_k = report_from_ranks({1}, Protocol::kSampled, {5});
  EXPECT_THROW(compare_reports(a, other_k), ParameterError);
}

TEST(Serialize, JsonAndTsvFieldNames) {
  EvalReport rep = report_from_ranks({1, 3}, Protocol::kSampled, {5, 10});
  rep.wall_clock_ms["scoring"] = 12.5;
  const auto j = nlohmann::json::parse(report_to_json(rep));
  EXPECT_EQ(j.at("protocol"), "sampled");
  EXPECT_EQ(j.at("n_instances"), 2);
  EXPECT_EQ(j.at("hr@10"), 1.0);
  EXPECT_EQ(j.at("ndcg@5"), 0.75);
  EXPECT_FALSE(j.contains("scoring"));
  const std::string tsv = report_to_tsv(rep);
  EXPECT_EQ(tsv.substr(0, tsv.find('\n')), "protocol\tn_instances\thr@5\tndcg@5\thr@10\tndcg@10");
  EXPECT_EQ(nlohmann::json::parse(timings_to_json(rep)).at("scoring"), 12.5);
}

TEST(Parse, KList) {
  EXPECT_EQ(parse_k_list("5,10,20"), (std::vector<Index>{5, 10, 20}));
  EXPECT_THROW(parse_k_list("5,,10"), ParameterError);
  EXPECT_THROW(parse_k_list("0"), ParameterError);
  EXPECT_THROW(parse_k_list("a"), ParameterError);
}
