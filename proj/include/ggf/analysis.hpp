#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ggf/dataset.hpp"
#include "ggf/metrics.hpp"
#include "ggf/recommend.hpp"
#include "ggf/views.hpp"

namespace ggf {

inline constexpr Index kDenseEigenCap = 5000;

struct Histogram {
  std::vector<double> edges;    // bins + 1 ascending edges
  std::vector<double> density;  // fraction of values per bin, sums to 1
};

// Eigenvalue distribution of a graph.
struct Spectrum {
  std::string label;
  std::vector<double> eigenvalues;  // ascending
  Histogram histogram;
};

std::vector<double> uniform_edges(double lo, double hi, Index bins);
// Values below the first edge fall in the first bin, values at or beyond the
// last edge in the last bin.
Histogram make_histogram(const std::vector<double>& values, std::vector<double> edges);

// Dense symmetric eigendecomposition; ResourceError above `cap` nodes.
std::vector<double> graph_eigenvalues(const SparseMatrixd& graph, Index cap = kDenseEigenCap);

// Histogram over `bins` uniform bins on [min(0, λ_min), λ_max].
Spectrum spectrum(const SimilarityGraph& graph, Index bins = 50, Index cap = kDenseEigenCap);
Spectrum spectrum(const SimilarityGraph& graph, std::vector<double> edges, Index cap = kDenseEigenCap);
Spectrum rebin(const Spectrum& s, std::vector<double> edges);

// Σ p_i ln(p_i / q_i) after adding `eps` to every bin and renormalizing.
double kl_divergence(const std::vector<double>& p, const std::vector<double>& q, double eps = 1e-10);
// Throws ParameterError when the bin edges differ.
double kl_divergence(const Spectrum& p, const Spectrum& q, double eps = 1e-10);

// xᵀ(D − A)x with D = diag(A1).
double smoothness(const Eigen::VectorXd& x, const SparseMatrixd& graph);

// Compares the filtered scores of one group with the minimizer of
//   ‖s − r‖² + λ sᵀ((1 − α − β) L_u + α L_g + β L_uni) s,   L_v = I − P_v
// i.e. s* = (I + λ L_mix)^{-1} r. With linear filters the aggregated score
// r P_mix enters through the first-order expansion
//   s* ≈ (1 − λ) r + λ r P_mix,
// which is what `filtered` holds; its error vanishes as λ → 0.
struct SmoothnessCheck {
  double lambda = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  Eigen::VectorXd exact;
  Eigen::VectorXd filtered;
  double relative_error = 0.0;
  double residual = 0.0;  // ‖(I + λL)s* − r‖ / ‖r‖
};

inline constexpr Index kSmoothnessCheckMaxItems = 500;

SmoothnessCheck verify_smoothness_solution(const Dataset& ds, const ModelConfig& cfg, double lambda,
                                        Index group = 0);
// Laplacian mix Σ_v w_v (I − P_v) over the configured views (dense).
Eigen::MatrixXd mixed_laplacian(const Dataset& ds, const ModelConfig& cfg);

struct PhaseTiming {
  std::string phase;
  std::vector<double> samples_ms;
  double min_ms = 0.0;
  double median_ms = 0.0;
};

struct BenchReport {
  Index repetitions = 0;
  std::vector<PhaseTiming> phases;  // graph_build, filter, scoring, metrics, total
  EvalReport report;                // from the last repetition
};

BenchReport bench(const Dataset& ds, const ModelConfig& cfg, Index repetitions, std::vector<Index> ks,
                  const FilterOptions& options = {}, Role role = Role::kGroup);

std::string bench_to_json(const BenchReport& b);
std::string bench_to_tsv(const BenchReport& b);
std::string spectrum_to_tsv(const Spectrum& s);

}  // namespace ggf
