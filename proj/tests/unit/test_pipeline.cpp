#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cyclescan/pipeline.hpp"
#include "test_support.hpp"

using namespace cyclescan;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("cyclescan_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_synth(const fs::path& dir, const std::string& name, const SynthSpec& spec) {
  const auto path = dir / (name + ".csv");
  std::ofstream out(path);
  write_prices_csv(out, to_prices(generate(spec, name)));
  return path;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SynthSpec fgn_spec(std::size_t n, double h, std::uint64_t seed) {
  SynthSpec s;
  s.kind = SynthKind::Fgn;
  s.n = n;
  s.hurst = h;
  s.seed = seed;
  return s;
}

}  // namespace

TEST(RunMarket, FgnSmoke) {
  const auto dir = temp_dir("smoke");
  RunConfig cfg;
  cfg.tddma.step = 50;
  const auto rep = run_market(cfg, {write_synth(dir, "fgn", fgn_spec(8192, 0.6, 1)).string(), "fgn", MarketGroup::Emerging});
  EXPECT_EQ(rep.n_prices, 8193u);
  EXPECT_TRUE(rep.hurst_vector.complete());
  ASSERT_TRUE(rep.local_hurst);
  EXPECT_NEAR(rep.global_hurst.h, 0.6, 0.1);
  write_market_report(rep, dir / "out");
  for (const char* f : {"scalegram.csv", "peaks.csv", "tddma.csv", "fluctuation.csv", "hurst_vector.json", "report.json"})
    EXPECT_TRUE(fs::exists(dir / "out" / "fgn" / f)) << f;
  const auto hv = nlohmann::json::parse(slurp(dir / "out" / "fgn" / "hurst_vector.json"));
  EXPECT_EQ(hv["fgn"].size(), kIntervalCount);
}

TEST(RunMarket, UnreadableFileIsAnIngestError) {
  RunConfig cfg;
  try {
    run_market(cfg, {"/nonexistent/x.csv", "x", MarketGroup::Emerging});
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "ingest");
    EXPECT_EQ(e.market_id(), "x");
  }
}

TEST(RunMarket, ShortSeriesSkipsTddmaWithNote) {
  const auto dir = temp_dir("short");
  RunConfig cfg;
  const auto rep = run_market(cfg, {write_synth(dir, "s", fgn_spec(600, 0.5, 2)).string(), "s", MarketGroup::Emerging});
  EXPECT_FALSE(rep.local_hurst);
  EXPECT_FALSE(rep.tddma_note.empty());
}

TEST(RunCohort, DeterministicReports) {
  const auto dir = temp_dir("determinism");
  RunConfig cfg;
  cfg.tddma.step = 100;
  cfg.jobs = 2;
  for (int k = 0; k < 3; ++k) {
    const auto id = "m" + std::to_string(k);
    cfg.inputs.push_back({write_synth(dir, id, fgn_spec(2048, 0.4 + 0.1 * k, 10 + k)).string(), id,
                          kMarketGroups[static_cast<std::size_t>(k)]});
  }
  cfg.output_dir = dir / "a";
  write_cohort_report(run_cohort(cfg), cfg.output_dir);
  cfg.output_dir = dir / "b";
  cfg.jobs = 1;
  write_cohort_report(run_cohort(cfg), cfg.output_dir);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir / "a")) {
    if (!e.is_regular_file()) continue;
    ++files;
    const auto other = dir / "b" / fs::relative(e.path(), dir / "a");
    EXPECT_EQ(slurp(e.path()), slurp(other)) << other;
  }
  EXPECT_GE(files, 3u * 5u + 3u);
}

TEST(RunCohort, SingleMarketIsAConfigError) {
  RunConfig cfg;
  cfg.inputs.push_back({"whatever.csv", "solo", MarketGroup::Developed});
  try {
    run_cohort(cfg);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "config");
  }
}

TEST(RunCohort, SmallScaleCycleAmplitudeSeparatesGroups) {
  // Harmonic of 3.5 trading days (4.9 real days, interval I) with a different
  // amplitude per group on top of unit white noise.
  RunConfig cfg;
  cfg.run_tddma = false;
  std::vector<MarketBandMetrics> metrics;
  const double amplitude[] = {0.6, 1.2, 1.8};
  std::uint64_t seed = 1;
  for (std::size_t g = 0; g < 3; ++g) {
    for (int k = 0; k < 8; ++k) {
      ReturnSeries r;
      r.market_id = "g" + std::to_string(g) + "_" + std::to_string(k);
      r.values = cyclescan::testing::harmonic_noise(4096, {{3.5, amplitude[g], 0.3 * k}}, 1.0, seed++);
      const auto rep = analyze_returns(r, cfg, kMarketGroups[g]);
      ASSERT_TRUE(rep.intervals.present(0)) << r.market_id;
      metrics.push_back({rep.market_id, rep.group, rep.band_metrics});
    }
  }
  const auto report = group_compare(metrics);
  const auto& entry = report.entries.front();
  ASSERT_EQ(entry.interval, 0u);
  ASSERT_EQ(entry.metric, BandMetricKind::RelativeEnergy);
  EXPECT_TRUE(entry.outcome.significant);
  ASSERT_EQ(entry.outcome.pairwise.size(), 3u);
  for (const auto& p : entry.outcome.pairwise) EXPECT_TRUE(p.significant);
}

TEST(Config, Validation) {
  RunConfig cfg;
  cfg.level = 1.0;
  EXPECT_THROW(validate(cfg), Error);
  cfg.level = 0.1;
  cfg.jobs = 0;
  EXPECT_THROW(validate(cfg), Error);
  EXPECT_THROW(parse_market_group("frontier"), Error);
}

#ifdef CYCLESCAN_CLI
TEST(Cli, ExitCodes) {
  const auto dir = temp_dir("cli");
  const std::string cli = CYCLESCAN_CLI;
  const auto run = [&](const std::string& args) {
    return std::system((cli + " " + args + " > " + (dir / "log.txt").string() + " 2>&1").c_str());
  };
  EXPECT_EQ(run("synth --kind fgn --H 0.7 --N 2048 --seed 42 --out " + (dir / "a.csv").string()), 0);
  EXPECT_NO_THROW(load_prices((dir / "a.csv").string(), "a"));
  EXPECT_NE(run("analyze --input " + (dir / "missing.csv").string()), 0);
  EXPECT_NE(slurp(dir / "log.txt").find("[ingest]"), std::string::npos);
  EXPECT_EQ(run("cohort --fixtures table4 --out " + (dir / "fx").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "fx" / "cohort" / "devindex.json"));
  EXPECT_NE(run("cohort --market " + (dir / "a.csv").string() + ":a:developed --out " + (dir / "one").string()), 0);
}

TEST(Cli, SeedFromEnvironment) {
  const auto dir = temp_dir("cli_env");
  const std::string cli = CYCLESCAN_CLI;
  const auto synth = [&](const std::string& env, const std::string& extra, const std::string& out) {
    return std::system((env + " " + cli + " synth --N 256 " + extra + " --out " + (dir / out).string() + " > /dev/null").c_str());
  };
  ASSERT_EQ(synth("CYCLESCAN_SEED=7", "", "env.csv"), 0);
  ASSERT_EQ(synth("", "--seed 7", "flag.csv"), 0);
  ASSERT_EQ(synth("", "", "default.csv"), 0);
  EXPECT_EQ(slurp(dir / "env.csv"), slurp(dir / "flag.csv"));
  EXPECT_NE(slurp(dir / "env.csv"), slurp(dir / "default.csv"));
}
#endif
