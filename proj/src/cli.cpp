#include "ggf/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "ggf/analysis.hpp"
#include "ggf/cache.hpp"
#include "ggf/config.hpp"
#include "ggf/dataset.hpp"
#include "ggf/error.hpp"
#include "ggf/metrics.hpp"
#include "ggf/parallel.hpp"
#include "ggf/recommend.hpp"
#include "ggf/tune.hpp"

namespace ggf {

namespace fs = std::filesystem;

namespace {

constexpr Index kDefaultNegatives = 100;

// Flags shared by every command. Unset optionals fall back to the config file
// and then to the defaults below.
struct Flags {
  std::optional<std::string> dataset;
  std::optional<std::string> format;
  std::string config;
  std::string out;
  std::optional<std::string> cache_dir;
  std::optional<std::string> role;
  std::optional<std::string> negatives;
  std::optional<std::string> k;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> ablate;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> s;
  std::optional<std::string> filter_u;
  std::optional<std::string> filter_g;
  std::optional<std::string> filter_uni;
  std::optional<std::string> cubic;
  std::optional<bool> mask_seen;
  std::optional<bool> use_membership;
  int threads = 0;

  // tune
  std::string grid = "default";
  std::optional<std::string> alphas;
  std::optional<std::string> betas;
  std::optional<std::string> ss;
  std::optional<std::string> presets;
  std::string metric = "ndcg";
  Index target_k = 10;
  // spectrum
  Index bins = 50;
  Index eigen_cap = kDenseEigenCap;
  // bench
  Index repetitions = 5;
};

// Fully resolved settings of one invocation.
struct Settings {
  fs::path dataset;
  std::string format;
  std::optional<fs::path> cache_dir;
  Role role = Role::kGroup;
  std::string negatives;  // "" keeps file candidates, "full", or a count
  std::vector<Index> ks = {5, 10, 20};
  std::uint64_t seed = 0;
  Ablation ablation = Ablation::kNone;
  ModelConfig model;
  bool mask_explicit = false;
  std::array<double, 3> cubic = kDefaultCubic;
  Json grid;
};

std::vector<double> parse_doubles(std::string_view text, const char* what) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss{std::string(text)};
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParameterError(fmt::format("{}: '{}' is not a number", what, item));
    }
  }
  if (out.empty()) throw ParameterError(fmt::format("{}: empty list", what));
  return out;
}

Role parse_role(std::string_view name) {
  if (name == "group" || name == "g") return Role::kGroup;
  if (name == "member" || name == "u") return Role::kMember;
  throw ParameterError(fmt::format("unknown role '{}' (group or member)", name));
}

std::string_view role_name(Role r) { return r == Role::kGroup ? "group" : "member"; }

void check_negatives(const std::string& n) {
  if (n.empty() || n == "full") return;
  if (n.find_first_not_of("0123456789") != std::string::npos || std::stoull(n) == 0) {
    throw ParameterError(fmt::format("--negatives takes a positive count or 'full', got '{}'", n));
  }
}

fs::path resolve_dataset(const std::string& given) {
  fs::path p(given);
  if (fs::exists(p) || p.is_absolute()) return p;
  if (const char* root = std::getenv("GGF_DATA_DIR"); root && *root) {
    fs::path candidate = fs::path(root) / p;
    if (fs::exists(candidate)) return candidate;
  }
  return p;
}

Settings resolve(const Flags& f) {
  Settings st;
  Json file = Json::object();
  if (!f.config.empty()) file = read_json_file(f.config);
  if (!file.is_object()) throw ParameterError("config file must hold a JSON object");

  static const std::set<std::string> run_keys = {"dataset", "format",  "negatives", "k",       "seed",
                                                 "role",    "ablate",  "cache_dir", "grid"};
  Json model_keys = Json::object();
  for (const auto& [key, value] : file.items()) {
    if (!run_keys.contains(key)) model_keys[key] = value;
  }
  auto str = [&](const char* key) -> std::optional<std::string> {
    if (!file.contains(key)) return std::nullopt;
    const auto& v = file.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_array()) {
      std::string joined;
      for (const auto& x : v) joined += (joined.empty() ? "" : ",") + x.dump();
      return joined;
    }
    throw ParameterError(fmt::format("config key '{}' has an unsupported type", key));
  };

  const auto dataset = f.dataset ? f.dataset : str("dataset");
  if (!dataset) throw ParameterError("--dataset is required");
  st.dataset = resolve_dataset(*dataset);
  if (!fs::exists(st.dataset)) throw IoError(fmt::format("dataset {} does not exist", st.dataset.string()));
  st.format = f.format ? *f.format : str("format").value_or("auto");
  if (st.format == "auto") st.format = fs::is_directory(st.dataset) ? "agree" : "canonical";
  if (st.format != "agree" && st.format != "canonical") {
    throw ParameterError(fmt::format("--format must be agree or canonical, got '{}'", st.format));
  }
  if (const auto c = f.cache_dir ? f.cache_dir : str("cache_dir")) st.cache_dir = *c;
  st.role = parse_role(f.role ? *f.role : str("role").value_or("group"));
  st.negatives = f.negatives ? *f.negatives : str("negatives").value_or("");
  if (st.negatives == "files") st.negatives.clear();
  check_negatives(st.negatives);
  if (const auto k = f.k ? f.k : str("k")) st.ks = parse_k_list(*k);
  if (f.seed) {
    st.seed = *f.seed;
  } else if (file.contains("seed")) {
    if (!file.at("seed").is_number_unsigned()) throw ParameterError("config key 'seed' must be a nonnegative integer");
    st.seed = file.at("seed").get<std::uint64_t>();
  }
  const std::string ablate = f.ablate ? *f.ablate : str("ablate").value_or("none");
  const auto ab = parse_ablation(ablate);
  if (!ab) throw ParameterError(fmt::format("unknown ablation '{}' (m, g, uni, a or none)", ablate));
  st.ablation = *ab;
  if (file.contains("grid")) st.grid = file.at("grid");

  if (f.cubic) {
    const auto c = parse_doubles(*f.cubic, "--cubic");
    if (c.size() != 3) throw ParameterError("--cubic takes three coefficients");
    st.cubic = {c[0], c[1], c[2]};
    model_keys["cubic"] = c;
  } else if (model_keys.contains("cubic")) {
    const auto& c = model_keys.at("cubic");
    if (!c.is_array() || c.size() != 3) throw ParameterError("'cubic' must list three coefficients");
    for (std::size_t i = 0; i < 3; ++i) st.cubic[i] = c[i].get<double>();
  }

  // Flags override file keys; the merged object is validated once.
  if (f.alpha) model_keys["alpha"] = *f.alpha;
  if (f.beta) model_keys["beta"] = *f.beta;
  if (f.s) model_keys["s"] = *f.s;
  if (f.filter_u) model_keys["filter_u"] = *f.filter_u;
  if (f.filter_g) model_keys["filter_g"] = *f.filter_g;
  if (f.filter_uni) model_keys["filter_uni"] = *f.filter_uni;
  if (f.use_membership) model_keys["use_membership"] = *f.use_membership;
  if (f.mask_seen) model_keys["mask_seen"] = *f.mask_seen;
  st.mask_explicit = model_keys.contains("mask_seen");

  ModelConfig defaults;
  defaults.alpha = 0.3;
  defaults.beta = 0.3;
  const ModelConfig cfg = model_config_from_json(model_keys, defaults);
  st.model = apply_ablation(cfg, st.ablation);
  st.model.validate();
  return st;
}

struct Loaded {
  Dataset ds;
  Protocol protocol = Protocol::kSampled;
};

bool split_has_candidates(const std::vector<EvalInstance>& list) {
  return std::all_of(list.begin(), list.end(), [](const EvalInstance& i) { return !i.all_items(); });
}

Dataset load_dataset(const Settings& st, std::ostream& err) {
  if (st.format == "agree") return load_agree_format(st.dataset);
  CanonicalLoad loaded = load_canonical(st.dataset);
  if (loaded.duplicates_dropped > 0) {
    err << fmt::format("note: dropped {} duplicate interactions\n", loaded.duplicates_dropped);
  }
  return std::move(loaded.dataset);
}

// Applies the negative-sampling setting split by split. Without an explicit
// setting, candidate lists shipped with the data are kept and splits lacking
// them are sampled with the default count.
Dataset apply_protocol(Dataset ds, const std::string& negatives, std::uint64_t seed) {
  if (negatives == "full") return with_full_ranking(ds);
  if (!negatives.empty()) return sample_negatives(ds, std::stoull(negatives), seed);
  const bool val_ok = split_has_candidates(ds.val);
  const bool test_ok = split_has_candidates(ds.test);
  if (val_ok && test_ok) return ds;
  Dataset sampled = sample_negatives(ds, kDefaultNegatives, seed);
  if (!val_ok) ds.val = std::move(sampled.val);
  if (!test_ok) ds.test = std::move(sampled.test);
  return ds;
}

Protocol protocol_of(const std::vector<EvalInstance>& list) {
  return !list.empty() && list.front().all_items() ? Protocol::kFull : Protocol::kSampled;
}

Loaded load_for_eval(Settings& st, const std::vector<EvalInstance> Dataset::*split, std::ostream& err) {
  Loaded l;
  l.ds = apply_protocol(load_dataset(st, err), st.negatives, st.seed);
  l.protocol = protocol_of(select_role(l.ds.*split, st.role));
  if (!st.mask_explicit) st.model.mask_seen = l.protocol == Protocol::kFull;
  return l;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
    out << content;
    if (!out.flush()) throw IoError(fmt::format("write to {} failed", path.string()));
  }
  fs::rename(tmp, path);
}

Json effective_config(const Settings& st) {
  Json j;
  j["dataset"] = st.dataset.string();
  j["format"] = st.format;
  j["role"] = std::string(role_name(st.role));
  j["negatives"] = st.negatives.empty() ? "files" : st.negatives;
  j["k"] = st.ks;
  j["seed"] = st.seed;
  j["ablate"] = std::string(ablation_name(st.ablation));
  j["cubic"] = st.cubic;
  const Json model = model_config_to_json(st.model);
  for (const auto& [key, value] : model.items()) j[key] = value;
  return j;
}

std::string summary_line(const EvalReport& r) {
  std::string s = fmt::format("{} n={}", protocol_name(r.protocol), r.n_instances);
  for (std::size_t i = 0; i < r.ks.size(); ++i) {
    s += fmt::format(" HR@{}={:.4f} NDCG@{}={:.4f}", r.ks[i], r.hr[i], r.ks[i], r.ndcg[i]);
  }
  return s;
}

using Clock = std::chrono::steady_clock;
double ms_since(Clock::time_point t) { return std::chrono::duration<double, std::milli>(Clock::now() - t).count(); }

std::optional<GraphCache> open_cache(const Settings& st, const Dataset& ds) {
  if (!st.cache_dir) return std::nullopt;
  return std::optional<GraphCache>(std::in_place, *st.cache_dir, ds);
}

GraphSource source_of(std::optional<GraphCache>& cache) {
  return cache ? cache->source() : GraphSource{};
}

// Top-k recommendations of every distinct test subject. Training items are
// always excluded here since they are not recommendations.
std::string rankings_tsv(const Dataset& ds, const Model& model, Role role, const std::vector<EvalInstance>& test,
                         Index k) {
  std::set<Index> subjects;
  for (const auto& inst : test) subjects.insert(inst.subject);
  const std::vector<Index> order(subjects.begin(), subjects.end());
  std::vector<std::string> chunks(order.size());
  parallel_for(order.size(), [&](Index i, int) {
    ScoreRow row = score_subject(ds, model, role, order[i]);
    if (!model.config.mask_seen) mask_training_items(ds, row);
    const TopK top = top_k(row, k);
    std::string chunk;
    for (std::size_t r = 0; r < top.items.size(); ++r) {
      chunk += fmt::format("{}\t{}\t{}\t{:.17g}\n", order[i], r + 1, top.items[r], top.scores[r]);
    }
    chunks[i] = std::move(chunk);
  });
  std::string out = "subject_id\trank\titem_id\tscore\n";
  for (const auto& c : chunks) out += c;
  return out;
}

EvalReport evaluate_model(const Dataset& ds, const Model& model, Role role,
                          const std::vector<EvalInstance>& instances, const std::vector<Index>& ks) {
  const Scorer scorer = [&](const EvalInstance& inst) { return score_subject(ds, model, role, inst.subject); };
  return evaluate(scorer, instances, ks);
}

void write_report(const fs::path& dir, const std::string& stem, const EvalReport& r) {
  write_file(dir / (stem + ".json"), report_to_json(r));
  write_file(dir / (stem + ".tsv"), report_to_tsv(r));
}

int cmd_prepare(const Flags& f, std::ostream& out, std::ostream& err) {
  Settings st = resolve(f);
  Dataset ds = load_dataset(st, err);
  if (!st.negatives.empty()) ds = apply_protocol(std::move(ds), st.negatives, st.seed);
  const fs::path dir(f.out);
  std::ostringstream canonical;
  write_canonical(canonical, ds);
  write_file(dir / "dataset.tsv", canonical.str());
  const std::string line = format_stats(stats(ds));
  write_file(dir / "stats.txt", line + "\n");
  out << line << "\n";
  return kExitOk;
}

int cmd_run(const Flags& f, std::ostream& out, std::ostream& err) {
  Settings st = resolve(f);
  const auto t_load = Clock::now();
  const Loaded l = load_for_eval(st, &Dataset::test, err);
  const double load_ms = ms_since(t_load);
  const auto instances = select_role(l.ds.test, st.role);
  if (instances.empty()) throw ProtocolError(fmt::format("test split has no {} instances", role_name(st.role)));

  auto cache = open_cache(st, l.ds);
  auto t = Clock::now();
  const ViewGraphs graphs = build_graphs(l.ds, st.model, source_of(cache));
  const double graph_ms = ms_since(t);
  t = Clock::now();
  const Model model = build_model(graphs, st.model);
  const double filter_ms = ms_since(t);
  t = Clock::now();
  EvalReport report = evaluate_model(l.ds, model, st.role, instances, st.ks);
  const double eval_ms = ms_since(t);
  t = Clock::now();
  const std::string rankings = rankings_tsv(l.ds, model, st.role, instances, *std::max_element(st.ks.begin(), st.ks.end()));
  report.wall_clock_ms["load"] = load_ms;
  report.wall_clock_ms["graph_build"] = graph_ms;
  report.wall_clock_ms["filter"] = filter_ms;
  report.wall_clock_ms["evaluate"] = eval_ms;
  report.wall_clock_ms["rankings"] = ms_since(t);
  if (cache) {
    report.wall_clock_ms["cache_hits"] = static_cast<double>(cache->hits());
    report.wall_clock_ms["cache_misses"] = static_cast<double>(cache->misses());
  }

  const fs::path dir(f.out);
  write_file(dir / "config.json", effective_config(st).dump(2) + "\n");
  write_report(dir, "report", report);
  write_file(dir / "rankings.tsv", rankings);
  write_file(dir / "timing.json", timings_to_json(report));
  out << summary_line(report) << "\n";
  return kExitOk;
}

std::vector<FilterSpec> parse_presets(const std::string& text, const std::array<double, 3>& cubic) {
  std::vector<FilterSpec> out;
  std::string item;
  std::stringstream ss(text);
  // Presets are separated by ';' so that coefficient lists can use commas.
  const char sep = text.find(';') != std::string::npos ? ';' : ',';
  if (sep == ',') {
    while (std::getline(ss, item, ',')) out.push_back(preset(item, cubic));
  } else {
    while (std::getline(ss, item, ';')) out.push_back(parse_filter(item, cubic));
  }
  return out;
}

TuneGrid resolve_grid(const Flags& f, const Settings& st) {
  TuneGrid grid = f.grid == "singleton" ? TuneGrid::singleton(st.model) : TuneGrid::defaults();
  if (f.grid != "default" && f.grid != "singleton") {
    throw ParameterError(fmt::format("--grid must be default or singleton, got '{}'", f.grid));
  }
  if (st.grid.is_object()) {
    for (const auto& [key, value] : st.grid.items()) {
      if (key == "alphas") grid.alphas = value.get<std::vector<double>>();
      else if (key == "betas") grid.betas = value.get<std::vector<double>>();
      else if (key == "ss") grid.ss = value.get<std::vector<double>>();
      else if (key == "presets") {
        std::vector<FilterSpec> specs;
        for (const auto& p : value) specs.push_back(filter_from_json(p, st.cubic));
        grid.filters = {specs, specs, specs};
      } else {
        throw ParameterError(fmt::format("unknown grid key '{}'", key));
      }
    }
  } else if (!st.grid.is_null()) {
    throw ParameterError("config key 'grid' must be an object");
  }
  if (f.alphas) grid.alphas = parse_doubles(*f.alphas, "--alphas");
  if (f.betas) grid.betas = parse_doubles(*f.betas, "--betas");
  if (f.ss) grid.ss = parse_doubles(*f.ss, "--ss");
  if (f.presets) {
    const auto specs = parse_presets(*f.presets, st.cubic);
    grid.filters = {specs, specs, specs};
  }
  grid.validate();
  return grid;
}

int cmd_tune(const Flags& f, std::ostream& out, std::ostream& err) {
  Settings st = resolve(f);
  const Loaded l = load_for_eval(st, &Dataset::val, err);
  const TuneGrid grid = resolve_grid(f, st);

  TuneOptions opt;
  if (f.metric == "ndcg") opt.metric = TargetMetric::kNdcg;
  else if (f.metric == "hr") opt.metric = TargetMetric::kHr;
  else throw ParameterError(fmt::format("--metric must be hr or ndcg, got '{}'", f.metric));
  opt.k = f.target_k;
  opt.report_ks = st.ks;
  if (std::find(opt.report_ks.begin(), opt.report_ks.end(), opt.k) == opt.report_ks.end()) {
    opt.report_ks.push_back(opt.k);
  }
  opt.role = st.role;
  opt.seed = st.seed;
  auto cache = open_cache(st, l.ds);
  opt.graphs = source_of(cache);

  const auto t = Clock::now();
  const TuneResult result = grid_search(l.ds, grid, st.model, opt);
  const double tune_ms = ms_since(t);
  if (result.cache_checked && !result.cache_check_passed) {
    throw NumericalError(fmt::format("grid point {} differs when rebuilt from scratch", result.cache_check_index));
  }

  Settings best = st;
  best.model = result.best;
  const auto test = select_role(l.ds.test, st.role);
  const fs::path dir(f.out);
  write_file(dir / "trace.tsv", trace_to_tsv(result, opt.k));
  write_file(dir / "best_config.json", model_config_to_json(result.best).dump(2) + "\n");
  write_report(dir, "val_report", result.best_report);
  write_file(dir / "config.json", effective_config(best).dump(2) + "\n");
  out << fmt::format("grid points: {}  best: alpha={} beta={} s={} filters={}/{}/{}\n", result.trace.size(),
                     result.best.alpha, result.best.beta, result.best.s, result.best.filter_u.label(),
                     result.best.filter_g.label(), result.best.filter_uni.label());
  out << "val  " << summary_line(result.best_report) << "\n";

  EvalReport report;
  if (!test.empty()) {
    const Model model = build_model(build_graphs(l.ds, result.best, opt.graphs), result.best);
    report = evaluate_model(l.ds, model, st.role, test, st.ks);
    write_report(dir, "report", report);
    out << "test " << summary_line(report) << "\n";
  }
  report.wall_clock_ms["tune"] = tune_ms;
  write_file(dir / "timing.json", timings_to_json(report));
  return kExitOk;
}

int cmd_spectrum(const Flags& f, std::ostream& out, std::ostream& err) {
  Settings st = resolve(f);
  const Dataset ds = load_dataset(st, err);
  auto cache = open_cache(st, ds);
  std::vector<std::shared_ptr<const SimilarityGraph>> graphs;
  std::vector<std::vector<double>> eig;
  for (const View v : kAllViews) {
    const double s = st.model.s_for(v);
    graphs.push_back(cache ? cache->get(v, s, st.model.use_membership)
                           : std::make_shared<const SimilarityGraph>(build_view(ds, v, s, st.model.use_membership)));
    eig.push_back(graph_eigenvalues(graphs.back()->matrix, f.eigen_cap));
  }
  if (eig.front().empty()) throw ProtocolError("dataset has no items");
  // Shared edges make the histograms directly comparable.
  double lo = 0.0;
  double hi = eig.front().back();
  for (const auto& e : eig) {
    lo = std::min(lo, e.front());
    hi = std::max(hi, e.back());
  }
  const auto edges = uniform_edges(lo, hi, f.bins);
  std::vector<Spectrum> spectra;
  const fs::path dir(f.out);
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    Spectrum sp{std::string(view_name(graphs[i]->view)), eig[i], make_histogram(eig[i], edges)};
    write_file(dir / fmt::format("spectrum_{}.tsv", sp.label), spectrum_to_tsv(sp));
    std::string values;
    for (const double x : sp.eigenvalues) values += fmt::format("{:.17g}\n", x);
    write_file(dir / fmt::format("eigenvalues_{}.tsv", sp.label), values);
    spectra.push_back(std::move(sp));
  }
  std::string kl = "p\tq\tkl\n";
  for (const auto& p : spectra) {
    for (const auto& q : spectra) {
      if (&p == &q) continue;
      const double d = kl_divergence(p, q);
      kl += fmt::format("{}\t{}\t{:.17g}\n", p.label, q.label, d);
      out << fmt::format("KL({} || {}) = {:.4f}\n", p.label, q.label, d);
    }
  }
  write_file(dir / "kl.tsv", kl);
  write_file(dir / "config.json", effective_config(st).dump(2) + "\n");
  return kExitOk;
}

int cmd_bench(const Flags& f, std::ostream& out, std::ostream& err) {
  Settings st = resolve(f);
  const Loaded l = load_for_eval(st, &Dataset::test, err);
  const BenchReport b = bench(l.ds, st.model, f.repetitions, st.ks, {}, st.role);
  const fs::path dir(f.out);
  write_file(dir / "bench.json", bench_to_json(b));
  write_file(dir / "bench.tsv", bench_to_tsv(b));
  write_report(dir, "report", b.report);
  write_file(dir / "config.json", effective_config(st).dump(2) + "\n");
  for (const auto& p : b.phases) {
    out << fmt::format("{:<12} min {:>10.3f} ms  median {:>10.3f} ms\n", p.phase, p.min_ms, p.median_ms);
  }
  return kExitOk;
}

void add_common(CLI::App* cmd, Flags& f, bool model_flags) {
  cmd->add_option("--dataset", f.dataset, "Dataset directory (agree) or file (canonical); relative paths also "
                                          "resolve under $GGF_DATA_DIR");
  cmd->add_option("--format", f.format, "agree or canonical (default: by path type)");
  cmd->add_option("--config", f.config, "JSON config file; flags take precedence");
  cmd->add_option("--out", f.out, "Output directory")->required();
  cmd->add_option("--seed", f.seed, "Seed for negative sampling and cache spot checks");
  cmd->add_option("--negatives", f.negatives,
                  "Negatives per positive, 'full' for full ranking or 'files' for shipped candidates");
  cmd->add_option("--threads", f.threads, "Worker threads (0: runtime default)");
  if (!model_flags) return;
  cmd->add_option("--cache-dir", f.cache_dir, "Directory for reusable graph snapshots");
  cmd->add_option("--role", f.role, "Evaluate group or member instances");
  cmd->add_option("--k", f.k, "Cutoffs, e.g. 5,10,20");
  cmd->add_option("--alpha", f.alpha, "Group-view weight");
  cmd->add_option("--beta", f.beta, "Unified-view weight");
  cmd->add_option("--s", f.s, "Hadamard exponent of every view");
  cmd->add_option("--filter-u", f.filter_u, "Member-view filter: preset or coefficients");
  cmd->add_option("--filter-g", f.filter_g, "Group-view filter");
  cmd->add_option("--filter-uni", f.filter_uni, "Unified-view filter");
  cmd->add_option("--cubic", f.cubic, "Coefficients of the cubic preset, c1,c2,c3");
  cmd->add_option("--ablate", f.ablate, "Drop one ingredient: m, g, uni, a or none");
  cmd->add_option("--mask-seen", f.mask_seen, "Exclude training items when ranking (true/false)");
  cmd->add_option("--use-membership", f.use_membership, "Augment views with group membership (true/false)");
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const ResourceError*>(&e)) return kExitResource;
  if (dynamic_cast<const ParameterError*>(&e)) return kExitUsage;
  return kExitData;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Training-free group recommendation by multi-view graph filtering", "ggf"};
  app.require_subcommand(1);
  Flags f;

  auto* prepare = app.add_subcommand("prepare", "Convert a dataset to the canonical format and print statistics");
  add_common(prepare, f, false);
  auto* run = app.add_subcommand("run", "Score and evaluate the test split");
  add_common(run, f, true);
  auto* tune = app.add_subcommand("tune", "Grid-search hyperparameters on the validation split");
  add_common(tune, f, true);
  tune->add_option("--grid", f.grid, "default or singleton");
  tune->add_option("--alphas", f.alphas, "Comma-separated alpha values");
  tune->add_option("--betas", f.betas, "Comma-separated beta values");
  tune->add_option("--ss", f.ss, "Comma-separated s values");
  tune->add_option("--presets", f.presets, "Filter choices for every view, e.g. linear,second_order");
  tune->add_option("--metric", f.metric, "Selection metric: hr or ndcg");
  tune->add_option("--target-k", f.target_k, "Cutoff of the selection metric");
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Eigenvalue histograms of the three views and their KL divergences");
  add_common(spectrum_cmd, f, true);
  spectrum_cmd->add_option("--bins", f.bins, "Histogram bins");
  spectrum_cmd->add_option("--eigen-cap", f.eigen_cap, "Largest graph handed to the dense eigensolver");
  auto* bench_cmd = app.add_subcommand("bench", "Time graph building, filtering, scoring and metrics");
  add_common(bench_cmd, f, true);
  bench_cmd->add_option("--repetitions", f.repetitions, "Number of timed repetitions");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("ggf");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    set_num_threads(f.threads);
    if (prepare->parsed()) return cmd_prepare(f, out, err);
    if (run->parsed()) return cmd_run(f, out, err);
    if (tune->parsed()) return cmd_tune(f, out, err);
    if (spectrum_cmd->parsed()) return cmd_spectrum(f, out, err);
    return cmd_bench(f, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return kExitResource;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace ggf
