#include "ggf/filter.hpp"

#include <charconv>
#include <cmath>

#include <fmt/core.h>
#include <fmt/ranges.h>

namespace ggf {

void FilterSpec::validate() const {
  if (coefficients.empty()) throw ParameterError("filter needs at least one coefficient");
  bool any_nonzero = false;
  for (const double c : coefficients) {
    if (!std::isfinite(c)) throw ParameterError("filter coefficients must be finite");
    any_nonzero |= c != 0.0;
  }
  if (!any_nonzero) throw ParameterError("filter coefficients are all zero");
}

double FilterSpec::response(double mu) const {
  double out = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) out = (out + *it) * mu;
  return out;
}

std::string FilterSpec::label() const {
  if (!preset_name.empty()) return preset_name;
  return fmt::format("{}", fmt::join(coefficients, ","));
}

FilterSpec preset(std::string_view name, const std::array<double, 3>& cubic) {
  FilterSpec spec;
  if (name == "linear") spec.coefficients = {1.0};
  else if (name == "second_order") spec.coefficients = {2.0, -1.0};
  else if (name == "cubic") spec.coefficients.assign(cubic.begin(), cubic.end());
  else throw ParameterError(fmt::format("unknown filter preset '{}'", name));
  spec.preset_name = std::string(name);
  spec.validate();
  return spec;
}

FilterSpec parse_filter(std::string_view text, const std::array<double, 3>& cubic) {
  if (text == "linear" || text == "second_order" || text == "cubic") return preset(text, cubic);
  FilterSpec spec;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string token(text.substr(pos, comma - pos));
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (token.empty() || used != token.size()) {
      throw ParameterError(fmt::format("'{}' is neither a filter preset nor a coefficient list", text));
    }
    spec.coefficients.push_back(value);
    pos = comma + 1;
  }
  spec.validate();
  return spec;
}

namespace {

SparseMatrixd scaled(double c, const SparseMatrixd& m) {
  if (c == 1.0) return m;
  std::vector<double> values(m.values());
  for (double& v : values) v *= c;
  return SparseMatrixd::from_csr(m.rows(), m.cols(), m.row_ptr(), m.col_idx(), std::move(values));
}

}  // namespace

AppliedFilter AppliedFilter::materialize(std::shared_ptr<const SimilarityGraph> graph, FilterSpec spec,
                                         Index nnz_cap) {
  spec.validate();
  const SparseMatrixd& p = graph->matrix;
  const auto& c = spec.coefficients;
  auto check_budget = [&](Index nnz) {
    if (nnz > nnz_cap) {
      throw ResourceError(fmt::format(
          "materialized {}-view filter needs {} stored entries, over the cap of {}; "
          "use the matvec-chain strategy",
          view_name(graph->view), nnz, nnz_cap));
    }
  };
  check_budget(p.nnz());
  // Horner: Q_K = c_K P, Q_k = c_k P + Q_{k+1} P, f(P) = Q_1.
  SparseMatrixd q = scaled(c.back(), p);
  for (std::size_t k = c.size() - 1; k-- > 0;) {
    check_budget(spmm_nnz(q, p));
    q = add_scaled(1.0, spmm(q, p), c[k], p);
  }
  if (c.size() > 1) q = add_scaled(0.5, q, 0.5, transpose(q));
  AppliedFilter out(std::move(graph), std::move(spec), FilterStrategy::kMaterialized);
  out.materialized_ = std::move(q);
  return out;
}

AppliedFilter AppliedFilter::chain(std::shared_ptr<const SimilarityGraph> graph, FilterSpec spec) {
  spec.validate();
  return AppliedFilter(std::move(graph), std::move(spec), FilterStrategy::kMatvecChain);
}

AppliedFilter AppliedFilter::make(std::shared_ptr<const SimilarityGraph> graph, FilterSpec spec,
                                  const FilterOptions& options) {
  if (options.strategy == FilterStrategy::kMatvecChain) return chain(std::move(graph), std::move(spec));
  if (options.strategy == FilterStrategy::kMaterialized) {
    return materialize(std::move(graph), std::move(spec), options.nnz_cap);
  }
  if (graph->n_items() > options.max_materialized_items) return chain(std::move(graph), std::move(spec));
  try {
    return materialize(graph, spec, options.nnz_cap);
  } catch (const ResourceError&) {
    return chain(std::move(graph), std::move(spec));
  }
}

DenseRowd AppliedFilter::apply(const DenseRowd& signal) const {
  const SparseMatrixd& p = graph_->matrix;
  if (static_cast<Index>(signal.size()) != p.rows()) {
    throw DimensionError(fmt::format("signal has length {}, graph has {} items", signal.size(), p.rows()));
  }
  if (materialized_) return spmv_row(signal, *materialized_);
  DenseRowd power = signal;
  DenseRowd out = DenseRowd::Zero(signal.size());
  for (const double c : spec_.coefficients) {
    power = spmv_row(power, p);
    if (c != 0.0) out += c * power;
  }
  return out;
}

DenseMatrixd AppliedFilter::apply_rows(const DenseMatrixd& signals) const {
  if (static_cast<Index>(signals.cols()) != graph_->n_items()) {
    throw DimensionError("signal batch width does not match graph size");
  }
  DenseMatrixd out(signals.rows(), signals.cols());
  parallel_for(static_cast<Index>(signals.rows()), [&](Index r, int) {
    const auto row = static_cast<Eigen::Index>(r);
    out.row(row) = apply(signals.row(row));
  });
  return out;
}

const SparseMatrixd& AppliedFilter::matrix() const {
  if (!materialized_) throw ParameterError("filter is applied as a mat-vec chain, no matrix stored");
  return *materialized_;
}

}  // namespace ggf
