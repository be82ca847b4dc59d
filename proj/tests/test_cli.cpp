#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ggf/cli.hpp"

using namespace ggf;
namespace fs = std::filesystem;

namespace {

const fs::path kTiny = fs::path(GGF_TEST_DATA) / "tiny";

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ggf_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::trunc) << text; }

std::size_t lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

}  // namespace

TEST(Prepare, WritesCanonicalFileAndStats) {
  const fs::path out = scratch("prepare");
  const Outcome o = cli({"prepare", "--dataset", kTiny.string(), "--out", out.string()});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.out, "members=3 items=6 groups=2 m-i=11 g-i=8\n");
  EXPECT_EQ(slurp(out / "dataset.tsv"), slurp(fs::path(GGF_TEST_DATA) / "tiny.tsv"));
  EXPECT_EQ(slurp(out / "stats.txt"), o.out);
}

TEST(Prepare, IdempotentOnItsOwnOutput) {
  const fs::path a = scratch("prepare_a");
  const fs::path b = scratch("prepare_b");
  ASSERT_EQ(cli({"prepare", "--dataset", kTiny.string(), "--out", a.string()}).code, 0);
  ASSERT_EQ(cli({"prepare", "--dataset", (a / "dataset.tsv").string(), "--out", b.string()}).code, 0);
  EXPECT_EQ(slurp(a / "dataset.tsv"), slurp(b / "dataset.tsv"));
}

TEST(Prepare, CorruptLineIsDataErrorWithLocation) {
  const fs::path dir = scratch("corrupt");
  fs::copy(kTiny, dir / "tiny", fs::copy_options::recursive);
  write(dir / "tiny" / "groupMember.txt", "0 0,1\n1 zz\n");
  const Outcome o = cli({"prepare", "--dataset", (dir / "tiny").string(), "--out", (dir / "out").string()});
  EXPECT_EQ(o.code, kExitData);
  EXPECT_NE(o.err.find("groupMember.txt:2"), std::string::npos) << o.err;
}

TEST(Run, WritesArtifacts) {
  const fs::path out = scratch("run");
  const Outcome o = cli({"run", "--dataset", kTiny.string(), "--out", out.string(), "--k", "1,3"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.out.rfind("sampled n=2", 0), 0u) << o.out;
  for (const char* f : {"config.json", "report.json", "report.tsv", "rankings.tsv", "timing.json"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
    EXPECT_FALSE(fs::exists(out / (std::string(f) + ".tmp"))) << f;
  }
  const auto report = nlohmann::json::parse(slurp(out / "report.json"));
  EXPECT_EQ(report.at("n_instances"), 2);
  EXPECT_TRUE(report.contains("ndcg@3"));
  const std::string rankings = slurp(out / "rankings.tsv");
  EXPECT_EQ(rankings.substr(0, rankings.find('\n')), "subject_id\trank\titem_id\tscore");
  // Two groups with three recommendations each; training items never appear.
  EXPECT_EQ(lines(rankings), 1u + 2u * 3u);
  std::istringstream in(rankings);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream row(line);
    int subject, rank, item;
    row >> subject >> rank >> item;
    if (subject == 0) EXPECT_TRUE(item != 0 && item != 1) << line;
    if (subject == 1) EXPECT_TRUE(item != 2 && item != 3) << line;
  }
  const auto cfg = nlohmann::json::parse(slurp(out / "config.json"));
  EXPECT_EQ(cfg.at("alpha"), 0.3);
  EXPECT_EQ(cfg.at("negatives"), "files");
  EXPECT_EQ(cfg.at("mask_seen"), false);
}

TEST(Run, ByteIdenticalAcrossRepeatsAndThreads) {
  std::vector<std::string> base = {"run", "--dataset", kTiny.string(), "--negatives", "full", "--filter-g", "second_order"};
  std::string first_report, first_rankings;
  for (const char* threads : {"1", "1", "3"}) {
    const fs::path out = scratch(std::string("repeat_") + threads);
    auto args = base;
    args.insert(args.end(), {"--out", out.string(), "--threads", threads});
    ASSERT_EQ(cli(args).code, 0);
    if (first_report.empty()) {
      first_report = slurp(out / "report.json");
      first_rankings = slurp(out / "rankings.tsv");
      continue;
    }
    EXPECT_EQ(slurp(out / "report.json"), first_report);
    EXPECT_EQ(slurp(out / "rankings.tsv"), first_rankings);
  }
  EXPECT_NE(first_report.find("\"full\""), std::string::npos);
}

TEST(Run, MemberRole) {
  const fs::path out = scratch("member");
  const Outcome o = cli({"run", "--dataset", kTiny.string(), "--out", out.string(), "--role", "member"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(nlohmann::json::parse(slurp(out / "report.json")).at("n_instances"), 3);
}

TEST(Run, AblationFlagEqualsExplicitViews) {
  const fs::path dir = scratch("ablate");
  write(dir / "views.json", R"({"enabled_views": ["group", "unified"]})");
  ASSERT_EQ(cli({"run", "--dataset", kTiny.string(), "--out", (dir / "a").string(), "--ablate", "group-gf-m"}).code, 0);
  ASSERT_EQ(cli({"run", "--dataset", kTiny.string(), "--out", (dir / "b").string(), "--config",
                 (dir / "views.json").string()})
                .code,
            0);
  EXPECT_EQ(slurp(dir / "a" / "report.json"), slurp(dir / "b" / "report.json"));
  EXPECT_EQ(slurp(dir / "a" / "rankings.tsv"), slurp(dir / "b" / "rankings.tsv"));
  const auto cfg = nlohmann::json::parse(slurp(dir / "a" / "config.json"));
  EXPECT_EQ(cfg.at("ablate"), "m");
}

TEST(Run, WarmCacheMatchesColdRun) {
  const fs::path dir = scratch("cache");
  const std::vector<std::string> base = {"run", "--dataset", kTiny.string(), "--cache-dir", (dir / "cache").string()};
  auto cold = base, warm = base, none = base;
  cold.insert(cold.end(), {"--out", (dir / "cold").string()});
  warm.insert(warm.end(), {"--out", (dir / "warm").string()});
  ASSERT_EQ(cli(cold).code, 0);
  ASSERT_EQ(cli(warm).code, 0);
  ASSERT_EQ(cli({"run", "--dataset", kTiny.string(), "--out", (dir / "plain").string()}).code, 0);
  EXPECT_EQ(slurp(dir / "cold" / "report.json"), slurp(dir / "warm" / "report.json"));
  EXPECT_EQ(slurp(dir / "cold" / "rankings.tsv"), slurp(dir / "warm" / "rankings.tsv"));
  EXPECT_EQ(slurp(dir / "plain" / "rankings.tsv"), slurp(dir / "warm" / "rankings.tsv"));
  const auto cold_t = nlohmann::json::parse(slurp(dir / "cold" / "timing.json"));
  const auto warm_t = nlohmann::json::parse(slurp(dir / "warm" / "timing.json"));
  EXPECT_EQ(cold_t.at("cache_misses"), 3.0);
  EXPECT_EQ(warm_t.at("cache_hits"), 3.0);
  EXPECT_EQ(warm_t.at("cache_misses"), 0.0);
}

TEST(Config, FlagsOverrideFileAndAreEchoed) {
  const fs::path dir = scratch("config");
  write(dir / "cfg.json", R"({"alpha": 0.6, "beta": 0.1, "k": [2], "filter_g": "second_order", "seed": 9})");
  const Outcome o = cli({"run", "--dataset", kTiny.string(), "--out", (dir / "out").string(), "--config",
                         (dir / "cfg.json").string(), "--beta", "0.2"});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto cfg = nlohmann::json::parse(slurp(dir / "out" / "config.json"));
  EXPECT_EQ(cfg.at("alpha"), 0.6);
  EXPECT_EQ(cfg.at("beta"), 0.2);
  EXPECT_EQ(cfg.at("seed"), 9);
  EXPECT_EQ(cfg.at("k"), nlohmann::json::array({2}));
  EXPECT_EQ(cfg.at("filter_g").at("preset"), "second_order");
  EXPECT_TRUE(nlohmann::json::parse(slurp(dir / "out" / "report.json")).contains("hr@2"));

  // The echoed config reproduces the run.
  write(dir / "echo.json", slurp(dir / "out" / "config.json"));
  ASSERT_EQ(cli({"run", "--out", (dir / "again").string(), "--config", (dir / "echo.json").string()}).code, 0);
  EXPECT_EQ(slurp(dir / "again" / "report.json"), slurp(dir / "out" / "report.json"));
  EXPECT_EQ(slurp(dir / "again" / "config.json"), slurp(dir / "out" / "config.json"));
}

TEST(Tune, SingletonGridWritesOneTraceRow) {
  const fs::path out = scratch("tune");
  const Outcome o = cli({"tune", "--dataset", kTiny.string(), "--out", out.string(), "--grid", "singleton"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(lines(slurp(out / "trace.tsv")), 2u);
  for (const char* f : {"best_config.json", "val_report.json", "val_report.tsv", "config.json", "report.json",
                        "report.tsv", "timing.json"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const auto best = nlohmann::json::parse(slurp(out / "best_config.json"));
  EXPECT_EQ(best.at("alpha"), 0.3);
}

TEST(Tune, CustomAxesAndPresets) {
  const fs::path out = scratch("tune_axes");
  const Outcome o = cli({"tune", "--dataset", kTiny.string(), "--out", out.string(), "--alphas", "0,0.5",
                         "--betas", "0", "--ss", "1", "--presets", "linear", "--metric", "hr", "--target-k", "1"});
  ASSERT_EQ(o.code, 0) << o.err;
  const std::string trace = slurp(out / "trace.tsv");
  EXPECT_EQ(lines(trace), 3u);
  EXPECT_NE(trace.find("hr@1"), std::string::npos);
}

TEST(Tune, MissingValidationIsDataError) {
  const fs::path dir = scratch("noval");
  fs::copy(kTiny, dir / "tiny", fs::copy_options::recursive);
  fs::remove(dir / "tiny" / "groupRatingVal.txt");
  fs::remove(dir / "tiny" / "groupRatingValNegative.txt");
  const Outcome o = cli({"tune", "--dataset", (dir / "tiny").string(), "--out", (dir / "out").string()});
  EXPECT_EQ(o.code, kExitData) << o.err;
}

TEST(Spectrum, WritesThreeHistogramsAndSixDivergences) {
  const fs::path out = scratch("spectrum");
  const Outcome o = cli({"spectrum", "--dataset", kTiny.string(), "--out", out.string(), "--bins", "5"});
  ASSERT_EQ(o.code, 0) << o.err;
  for (const char* v : {"member", "group", "unified"}) {
    const std::string h = slurp(out / (std::string("spectrum_") + v + ".tsv"));
    EXPECT_EQ(lines(h), 6u) << v;
    EXPECT_EQ(lines(slurp(out / (std::string("eigenvalues_") + v + ".tsv"))), 6u) << v;
  }
  EXPECT_EQ(lines(slurp(out / "kl.tsv")), 7u);
  EXPECT_EQ(lines(o.out), 6u);
  // Shared edges across the three views.
  const auto first_col = [&](const char* v) {
    std::istringstream in(slurp(out / (std::string("spectrum_") + v + ".tsv")));
    std::string line, col;
    std::vector<std::string> lo;
    std::getline(in, line);
    while (std::getline(in, line)) lo.push_back(line.substr(0, line.find('\t')));
    return lo;
  };
  EXPECT_EQ(first_col("member"), first_col("group"));
  EXPECT_EQ(first_col("member"), first_col("unified"));
}

TEST(Bench, RepetitionsGiveSamples) {
  const fs::path out = scratch("bench");
  const Outcome o = cli({"bench", "--dataset", kTiny.string(), "--out", out.string(), "--repetitions", "5"});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto j = nlohmann::json::parse(slurp(out / "bench.json"));
  EXPECT_EQ(j.at("repetitions"), 5);
  for (const char* phase : {"graph_build", "filter", "scoring", "metrics", "total"}) {
    EXPECT_EQ(j.at("phases").at(phase).at("samples_ms").size(), 5u) << phase;
  }
  EXPECT_TRUE(fs::exists(out / "report.json"));
}

TEST(ExitCodes, UsageDataAndResource) {
  const fs::path out = scratch("exit");
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"run", "--dataset", kTiny.string()}).code, kExitUsage);
  EXPECT_EQ(cli({"run", "--dataset", kTiny.string(), "--out", out.string(), "--alpha", "0.8", "--beta", "0.5"}).code,
            kExitUsage);
  EXPECT_EQ(cli({"run", "--dataset", kTiny.string(), "--out", out.string(), "--negatives", "-3"}).code, kExitUsage);
  EXPECT_EQ(cli({"run", "--dataset", kTiny.string(), "--out", out.string(), "--ablate", "x"}).code, kExitUsage);
  EXPECT_EQ(cli({"run", "--dataset", (out / "missing").string(), "--out", out.string()}).code, kExitData);
  // Four negatives per positive cannot be drawn from six items.
  EXPECT_EQ(cli({"run", "--dataset", kTiny.string(), "--out", out.string(), "--negatives", "4"}).code, kExitData);
  EXPECT_EQ(cli({"spectrum", "--dataset", kTiny.string(), "--out", out.string(), "--eigen-cap", "2"}).code,
            kExitResource);
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
}

TEST(Dataset, ResolvesUnderDataDirectory) {
  const fs::path out = scratch("datadir");
  ::setenv("GGF_DATA_DIR", GGF_TEST_DATA, 1);
  const Outcome o = cli({"prepare", "--dataset", "tiny", "--out", out.string()});
  ::unsetenv("GGF_DATA_DIR");
  EXPECT_EQ(o.code, 0) << o.err;
}
