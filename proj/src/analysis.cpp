#include "ggf/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <fmt/core.h>
#include <json.hpp>

namespace ggf {

std::vector<double> uniform_edges(double lo, double hi, Index bins) {
  if (bins < 1) throw ParameterError("need at least one histogram bin");
  if (!(hi > lo)) hi = lo + 1.0;
  std::vector<double> edges(bins + 1);
  for (Index i = 0; i <= bins; ++i) {
    edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  }
  edges.back() = hi;
  return edges;
}

Histogram make_histogram(const std::vector<double>& values, std::vector<double> edges) {
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end())) {
    throw ParameterError("histogram edges must be ascending with at least two entries");
  }
  if (values.empty()) throw ParameterError("cannot histogram an empty set");
  const Index bins = edges.size() - 1;
  std::vector<double> counts(bins, 0.0);
  for (const double v : values) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    Index bin = it == edges.begin() ? 0 : static_cast<Index>(it - edges.begin()) - 1;
    counts[std::min(bin, bins - 1)] += 1.0;
  }
  for (double& c : counts) c /= static_cast<double>(values.size());
  return {std::move(edges), std::move(counts)};
}

std::vector<double> graph_eigenvalues(const SparseMatrixd& graph, Index cap) {
  if (graph.rows() != graph.cols()) throw DimensionError("eigenvalues need a square matrix");
  if (graph.rows() > cap) {
    throw ResourceError(fmt::format("{} nodes exceed the dense eigensolver cap of {}", graph.rows(), cap));
  }
  if (graph.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(graph.to_dense(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
  const Eigen::VectorXd& ev = solver.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end());
  return out;
}

Spectrum spectrum(const SimilarityGraph& graph, Index bins, Index cap) {
  Spectrum s{std::string(view_name(graph.view)), graph_eigenvalues(graph.matrix, cap), {}};
  if (s.eigenvalues.empty()) throw ParameterError("empty graph has no spectrum");
  s.histogram = make_histogram(
      s.eigenvalues, uniform_edges(std::min(0.0, s.eigenvalues.front()), s.eigenvalues.back(), bins));
  return s;
}

Spectrum spectrum(const SimilarityGraph& graph, std::vector<double> edges, Index cap) {
  Spectrum s{std::string(view_name(graph.view)), graph_eigenvalues(graph.matrix, cap), {}};
  s.histogram = make_histogram(s.eigenvalues, std::move(edges));
  return s;
}

Spectrum rebin(const Spectrum& s, std::vector<double> edges) {
  Spectrum out = s;
  out.histogram = make_histogram(s.eigenvalues, std::move(edges));
  return out;
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q, double eps) {
  if (p.size() != q.size() || p.empty()) throw ParameterError("distributions must have the same bins");
  if (!(eps > 0.0)) throw ParameterError("smoothing must be positive");
  double zp = 0.0;
  double zq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0 || q[i] < 0.0) throw DomainError("densities must be nonnegative");
    zp += p[i] + eps;
    zq += q[i] + eps;
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = (p[i] + eps) / zp;
    const double qi = (q[i] + eps) / zq;
    kl += pi * std::log(pi / qi);
  }
  return kl;
}

double kl_divergence(const Spectrum& p, const Spectrum& q, double eps) {
  if (p.histogram.edges != q.histogram.edges) {
    throw ParameterError(fmt::format("spectra '{}' and '{}' use different bin edges", p.label, q.label));
  }
  return kl_divergence(p.histogram.density, q.histogram.density, eps);
}

double smoothness(const Eigen::VectorXd& x, const SparseMatrixd& graph) {
  if (graph.rows() != graph.cols() || static_cast<Index>(x.size()) != graph.rows()) {
    throw DimensionError("smoothness: signal length must match a square graph");
  }
  // Σ_i Σ_j A_ij x_i (x_i − x_j) equals xᵀDx − xᵀAx and is exactly zero on
  // constant signals.
  double total = 0.0;
  for (Index i = 0; i < graph.rows(); ++i) {
    const double xi = x[static_cast<Eigen::Index>(i)];
    const auto cols = graph.row_cols(i);
    const auto vals = graph.row_values(i);
    double row = 0.0;
    for (std::size_t p = 0; p < cols.size(); ++p) row += vals[p] * (xi - x[cols[p]]);
    total += xi * row;
  }
  return total;
}

namespace {

Index checked_items(const Dataset& ds) {
  if (ds.n_items > kSmoothnessCheckMaxItems) {
    throw ResourceError(fmt::format("{} items exceed the dense-solve limit of {}", ds.n_items, kSmoothnessCheckMaxItems));
  }
  return ds.n_items;
}

}  // namespace

Eigen::MatrixXd mixed_laplacian(const Dataset& ds, const ModelConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(checked_items(ds));
  const ViewGraphs graphs = build_graphs(ds, cfg);
  const auto w = cfg.weights();
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd mix = Eigen::MatrixXd::Zero(n, n);
  for (int v = 0; v < 3; ++v) {
    if (w[v] == 0.0) continue;
    mix += w[v] * (identity - graphs[v]->matrix.to_dense());
  }
  return mix;
}

SmoothnessCheck verify_smoothness_solution(const Dataset& ds, const ModelConfig& cfg, double lambda, Index group) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ParameterError("lambda must be >= 0");
  for (const View v : kAllViews) {
    if (cfg.filter_for(v).coefficients != std::vector<double>{1.0}) {
      throw ParameterError("the smoothness correspondence is checked with linear filters only");
    }
  }
  const auto n = static_cast<Eigen::Index>(checked_items(ds));
  ModelConfig plain = cfg;
  plain.mask_seen = false;

  const Eigen::VectorXd r = ds.signal(Role::kGroup, group).transpose();
  const Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(n, n) + lambda * mixed_laplacian(ds, plain);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible()) throw NumericalError("smoothness system is singular");

  SmoothnessCheck check;
  check.lambda = lambda;
  check.alpha = cfg.alpha;
  check.beta = cfg.beta;
  check.exact = lu.solve(r);
  const double r_norm = r.norm();
  const double res = (system * check.exact - r).norm();
  check.residual = r_norm > 0.0 ? res / r_norm : res;

  const Model model = build_model(ds, plain);
  const Eigen::VectorXd aggregated = score_group(ds, model, group).scores.transpose();
  check.filtered = (1.0 - lambda) * r + lambda * aggregated;
  const double exact_norm = check.exact.norm();
  const double err = (check.filtered - check.exact).norm();
  check.relative_error = exact_norm > 0.0 ? err / exact_norm : err;
  return check;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

PhaseTiming summarize(std::string name, std::vector<double> samples) {
  PhaseTiming t{std::move(name), samples, 0.0, 0.0};
  std::sort(samples.begin(), samples.end());
  t.min_ms = samples.front();
  const std::size_t mid = samples.size() / 2;
  t.median_ms = samples.size() % 2 == 1 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
  return t;
}

}  // namespace

BenchReport bench(const Dataset& ds, const ModelConfig& cfg, Index repetitions, std::vector<Index> ks,
                  const FilterOptions& options, Role role) {
  if (repetitions < 1) throw ParameterError("repetitions must be >= 1");
  const std::vector<EvalInstance> instances = select_role(ds.test, role);
  if (instances.empty()) throw ProtocolError("test split has no instances for this role");
  const bool sampled = !instances.front().all_items();
  std::vector<std::vector<double>> samples(5);
  BenchReport out;
  out.repetitions = repetitions;
  for (Index rep = 0; rep < repetitions; ++rep) {
    const auto t_total = Clock::now();
    auto t = Clock::now();
    const ViewGraphs graphs = build_graphs(ds, cfg);
    samples[0].push_back(ms_since(t));

    t = Clock::now();
    const Model model = build_model(graphs, cfg, options);
    samples[1].push_back(ms_since(t));

    t = Clock::now();
    std::vector<ScoreRow> rows(instances.size());
    parallel_for(instances.size(), [&](Index i, int) {
      rows[i] = score_subject(ds, model, role, instances[i].subject);
    });
    samples[2].push_back(ms_since(t));

    t = Clock::now();
    std::vector<Index> ranks(instances.size());
    for (std::size_t i = 0; i < instances.size(); ++i) ranks[i] = rank_of_positive(rows[i].scores, instances[i]);
    out.report = report_from_ranks(ranks, sampled ? Protocol::kSampled : Protocol::kFull, ks);
    samples[3].push_back(ms_since(t));
    samples[4].push_back(ms_since(t_total));
  }
  const char* names[] = {"graph_build", "filter", "scoring", "metrics", "total"};
  for (int i = 0; i < 5; ++i) out.phases.push_back(summarize(names[i], samples[i]));
  return out;
}

std::string bench_to_json(const BenchReport& b) {
  nlohmann::ordered_json j;
  j["repetitions"] = b.repetitions;
  for (const auto& p : b.phases) {
    j["phases"][p.phase] = {{"samples_ms", p.samples_ms}, {"min_ms", p.min_ms}, {"median_ms", p.median_ms}};
  }
  return j.dump(2) + "\n";
}

std::string bench_to_tsv(const BenchReport& b) {
  std::string out = "phase\tmin_ms\tmedian_ms\n";
  for (const auto& p : b.phases) out += fmt::format("{}\t{:.3f}\t{:.3f}\n", p.phase, p.min_ms, p.median_ms);
  return out;
}

std::string spectrum_to_tsv(const Spectrum& s) {
  std::string out = "bin_lo\tbin_hi\tdensity\n";
  for (std::size_t i = 0; i < s.histogram.density.size(); ++i) {
    out += fmt::format("{:.17g}\t{:.17g}\t{:.17g}\n", s.histogram.edges[i], s.histogram.edges[i + 1],
                       s.histogram.density[i]);
  }
  return out;
}

}  // namespace ggf
