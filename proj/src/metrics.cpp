#include "ggf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include <fmt/core.h>
#include <json.hpp>

namespace ggf {
namespace {

// Neumaier-compensated sum in input order.
double compensated_sum(const std::vector<double>& xs) {
  double sum = 0.0;
  double comp = 0.0;
  for (const double x : xs) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

std::size_t k_slot(const std::vector<Index>& ks, Index k) {
  const auto it = std::find(ks.begin(), ks.end(), k);
  if (it == ks.end()) throw ParameterError(fmt::format("report has no @{} entry", k));
  return static_cast<std::size_t>(it - ks.begin());
}

double relative(double a, double b) {
  if (b != 0.0) return (a - b) / b;
  return a == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

std::string_view protocol_name(Protocol p) { return p == Protocol::kSampled ? "sampled" : "full"; }

double EvalReport::hr_at(Index k) const { return hr[k_slot(ks, k)]; }
double EvalReport::ndcg_at(Index k) const { return ndcg[k_slot(ks, k)]; }

Index rank_of_positive(const DenseRowd& scores, const EvalInstance& inst) {
  const auto n = static_cast<Index>(scores.size());
  if (inst.positive >= n) throw IndexError("positive item out of range");
  if (scores[static_cast<Eigen::Index>(inst.positive)] == kMaskedScore) {
    throw ProtocolError(fmt::format("positive item {} of subject {} is masked", inst.positive, inst.subject));
  }
  Index rank = 1;
  auto visit = [&](Index i) {
    if (i != inst.positive && scores[static_cast<Eigen::Index>(i)] != kMaskedScore &&
        ranks_before(scores, i, inst.positive)) {
      ++rank;
    }
  };
  if (inst.all_items()) {
    for (Index i = 0; i < n; ++i) visit(i);
  } else {
    for (const Index i : inst.candidates) visit(i);
  }
  return rank;
}

EvalReport report_from_ranks(const std::vector<Index>& ranks, Protocol protocol, std::vector<Index> ks) {
  if (ranks.empty()) throw ProtocolError("no evaluation instances");
  if (ks.empty()) throw ParameterError("empty k list");
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  if (ks.front() < 1) throw ParameterError("k must be >= 1");
  EvalReport r;
  r.protocol = protocol;
  r.ks = ks;
  r.n_instances = ranks.size();
  std::vector<double> hits(ranks.size());
  std::vector<double> gains(ranks.size());
  for (const Index k : ks) {
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      const bool hit = ranks[i] <= k;
      hits[i] = hit ? 1.0 : 0.0;
      gains[i] = hit ? 1.0 / std::log2(static_cast<double>(ranks[i]) + 1.0) : 0.0;
    }
    const auto n = static_cast<double>(ranks.size());
    r.hr.push_back(compensated_sum(hits) / n);
    r.ndcg.push_back(compensated_sum(gains) / n);
  }
  return r;
}

EvalReport evaluate(const Scorer& scorer, const std::vector<EvalInstance>& instances, std::vector<Index> ks) {
  if (instances.empty()) throw ProtocolError("no evaluation instances");
  const bool sampled = !instances.front().all_items();
  for (const auto& inst : instances) {
    if (inst.all_items() == sampled) {
      throw ProtocolError("instances mix sampled candidates with full ranking");
    }
  }
  std::vector<Index> ranks(instances.size(), 0);
  std::vector<std::exception_ptr> errors(instances.size());
  parallel_for(instances.size(), [&](Index i, int) {
    try {
      ranks[i] = rank_of_positive(scorer(instances[i]).scores, instances[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return report_from_ranks(ranks, sampled ? Protocol::kSampled : Protocol::kFull, std::move(ks));
}

ReportDelta compare_reports(const EvalReport& a, const EvalReport& b) {
  if (a.protocol != b.protocol) throw ParameterError("cannot compare reports from different protocols");
  if (a.ks != b.ks) throw ParameterError("cannot compare reports with different k lists");
  ReportDelta d;
  d.ks = a.ks;
  for (std::size_t i = 0; i < a.ks.size(); ++i) {
    d.hr_delta.push_back(a.hr[i] - b.hr[i]);
    d.ndcg_delta.push_back(a.ndcg[i] - b.ndcg[i]);
    d.hr_relative.push_back(relative(a.hr[i], b.hr[i]));
    d.ndcg_relative.push_back(relative(a.ndcg[i], b.ndcg[i]));
  }
  return d;
}

std::string report_to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["protocol"] = protocol_name(r.protocol);
  j["n_instances"] = r.n_instances;
  for (std::size_t i = 0; i < r.ks.size(); ++i) {
    j[fmt::format("hr@{}", r.ks[i])] = r.hr[i];
    j[fmt::format("ndcg@{}", r.ks[i])] = r.ndcg[i];
  }
  return j.dump(2) + "\n";
}

std::string report_to_tsv(const EvalReport& r) {
  std::string head = "protocol\tn_instances";
  std::string row = fmt::format("{}\t{}", protocol_name(r.protocol), r.n_instances);
  for (std::size_t i = 0; i < r.ks.size(); ++i) {
    head += fmt::format("\thr@{0}\tndcg@{0}", r.ks[i]);
    row += fmt::format("\t{:.6f}\t{:.6f}", r.hr[i], r.ndcg[i]);
  }
  return head + "\n" + row + "\n";
}

std::string timings_to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  for (const auto& [phase, ms] : r.wall_clock_ms) j[phase] = ms;
  return j.dump(2) + "\n";
}

std::vector<Index> parse_k_list(std::string_view text) {
  std::vector<Index> ks;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string tok(text.substr(pos, comma - pos));
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (tok.empty() || used != tok.size() || v < 1) {
      throw ParameterError(fmt::format("invalid k list '{}'", text));
    }
    ks.push_back(static_cast<Index>(v));
    pos = comma + 1;
  }
  return ks;
}

}  // namespace ggf
