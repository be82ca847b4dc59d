#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ggf/dataset.hpp"
#include "ggf/recommend.hpp"

namespace ggf {

enum class Protocol {
  kSampled,  // rank the positive among its listed candidates
  kFull,     // rank the positive among all unmasked items
};

std::string_view protocol_name(Protocol p);

// HR@k and NDCG@k for a single held-out positive per instance:
//   HR@k   = mean [rank ≤ k]
//   NDCG@k = mean [rank ≤ k] / log2(rank + 1)
struct EvalReport {
  Protocol protocol = Protocol::kSampled;
  std::vector<Index> ks;
  std::vector<double> hr;
  std::vector<double> ndcg;
  Index n_instances = 0;
  std::map<std::string, double> wall_clock_ms;

  double hr_at(Index k) const;
  double ndcg_at(Index k) const;
};

// Scores for the subject of an instance.
using Scorer = std::function<ScoreRow(const EvalInstance&)>;

// 1-based rank of the instance's positive under `scores`, with ties broken by
// ascending item index. Throws ProtocolError when the positive is masked.
Index rank_of_positive(const DenseRowd& scores, const EvalInstance& inst);

EvalReport report_from_ranks(const std::vector<Index>& ranks, Protocol protocol, std::vector<Index> ks);

// Scores run in parallel over instances; aggregation order is fixed.
EvalReport evaluate(const Scorer& scorer, const std::vector<EvalInstance>& instances,
                    std::vector<Index> ks);

struct ReportDelta {
  std::vector<Index> ks;
  std::vector<double> hr_delta;       // a − b
  std::vector<double> ndcg_delta;
  std::vector<double> hr_relative;    // (a − b) / b
  std::vector<double> ndcg_relative;
};

// Differences of `a` relative to the baseline `b`. Throws ParameterError when
// protocols or k lists differ.
ReportDelta compare_reports(const EvalReport& a, const EvalReport& b);

// {"protocol", "n_instances", "hr@k", "ndcg@k", ...}; timings are left out so
// that reports are reproducible byte for byte.
std::string report_to_json(const EvalReport& r);
// Header row and one value row.
std::string report_to_tsv(const EvalReport& r);
std::string timings_to_json(const EvalReport& r);

std::vector<Index> parse_k_list(std::string_view text);

}  // namespace ggf
