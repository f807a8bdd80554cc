// cyclescan: command-line front end for the cycle / Hurst-space pipeline.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cyclescan/cyclescan.hpp"

namespace fs = std::filesystem;
using namespace cyclescan;

namespace {

struct CommonOptions {
  int lag = 1;
  int voices = 8;
  double level = 0.10;
  double prominence = 0.05;
  bool inside_coi = false;
  std::string amplitude = "abs";
  std::size_t window = 1000;
  std::size_t step = 1;
  std::size_t min_window = 200;
  bool no_tddma = false;
  std::string hurst_mode = "restricted";
  std::string direction = "canonical";
  std::string out = "out";
  unsigned jobs = 1;
};

void add_analysis_options(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--lag", o.lag, "Return lag in trading days")->check(CLI::PositiveNumber);
  cmd->add_option("--voices", o.voices, "Scale-grid voices per octave")->check(CLI::PositiveNumber);
  cmd->add_option("--level", o.level, "Significance level")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--prominence", o.prominence, "Minimum peak prominence (fraction of max)");
  cmd->add_flag("--inside-coi", o.inside_coi, "Restrict the scalegram to cells inside the cone of influence");
  cmd->add_option("--amplitude", o.amplitude, "Amplitude integrand: abs | real | power")
      ->check(CLI::IsMember({"abs", "real", "power"}));
  cmd->add_option("--window", o.window, "tdDMA window N_s");
  cmd->add_option("--step", o.step, "tdDMA step")->check(CLI::PositiveNumber);
  cmd->add_option("--min-window", o.min_window, "tdDMA minimum window N_min");
  cmd->add_flag("--no-tddma", o.no_tddma, "Skip the sliding-window DMA trace");
  cmd->add_option("--hurst-mode", o.hurst_mode, "Hurst vector estimator: restricted | tddma")
      ->check(CLI::IsMember({"restricted", "tddma"}));
  cmd->add_option("--out", o.out, "Output directory");
}

RunConfig make_config(const CommonOptions& o) {
  RunConfig cfg;
  cfg.lag = o.lag;
  cfg.voices_per_octave = o.voices;
  cfg.level = o.level;
  cfg.min_prominence = o.prominence;
  cfg.scalegram_inside_coi = o.inside_coi;
  cfg.amplitude = parse_amplitude_kind(o.amplitude);
  cfg.tddma.window = o.window;
  cfg.tddma.step = o.step;
  cfg.tddma.min_window = o.min_window;
  cfg.run_tddma = !o.no_tddma;
  cfg.hurst_mode = o.hurst_mode == "tddma" ? HurstVectorMode::TdDmaAverage : HurstVectorMode::ScaleRestricted;
  cfg.direction = parse_direction_mode(o.direction);
  cfg.output_dir = o.out;
  cfg.jobs = o.jobs;
  return cfg;
}

// "path:market_id:group"
MarketInput parse_market_spec(const std::string& spec) {
  const auto a = spec.rfind(':');
  const auto b = a == std::string::npos ? std::string::npos : spec.rfind(':', a - 1);
  if (a == std::string::npos || b == std::string::npos)
    throw Error(ErrorCode::ConfigError, "market spec must be path:market_id:group, got '" + spec + "'");
  return {spec.substr(0, b), spec.substr(b + 1, a - b - 1), parse_market_group(spec.substr(a + 1))};
}

// CSV with header path,market_id,group; relative paths resolve against the manifest's directory.
std::vector<MarketInput> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open manifest '" + path + "'");
  std::vector<MarketInput> out;
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "path,market_id,group") throw Error(ErrorCode::ConfigError, "manifest header must be 'path,market_id,group'");
  const fs::path base = fs::path(path).parent_path();
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string p, id, g;
    std::getline(ss, p, ',');
    std::getline(ss, id, ',');
    std::getline(ss, g, ',');
    fs::path fp(p);
    if (fp.is_relative()) fp = base / fp;
    out.push_back({fp.string(), id, parse_market_group(g)});
  }
  return out;
}

void print_devindex(const DevelopmentReport& rep, const HurstTable* table) {
  std::printf("%-12s %8s  %-15s %s\n", "market", "Pi", "class", "published");
  for (std::size_t k = 0; k < rep.market_ids.size(); ++k) {
    std::string published;
    if (table && table->rows[k].published_class) published = to_string(*table->rows[k].published_class);
    std::printf("%-12s %8.3f  %-15s %s%s\n", rep.market_ids[k].c_str(), rep.indices[k],
                std::string(to_string(rep.classification.classes[k])).c_str(), published.c_str(),
                rep.classification.borderline[k] ? "  (borderline)" : "");
  }
  std::printf("|Pi|max = %.4f, borders = %+.4f / %+.4f\n", rep.classification.pi_max,
              rep.classification.border_underdeveloped, rep.classification.border_developed);
}

int run_devindex_table(const HurstTable& table, const std::string& direction, const std::string& reference,
                       const fs::path& out_file) {
  const auto rep = devindex_from_table(table, parse_direction_mode(direction),
                                       reference == "computed" ? ReferenceSource::Computed : ReferenceSource::Printed);
  std::vector<std::optional<MarketGroup>> published;
  for (const auto& r : table.rows) published.push_back(r.published_class);
  print_devindex(rep, &table);
  if (!out_file.empty()) {
    detail::write_file(out_file, development_report_json(rep, published).dump(2) + "\n");
    std::printf("wrote %s\n", out_file.string().c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cyclescan: wavelet cycle detection and Hurst-space market classification"};
  app.set_config("--config", "", "Read options from an INI/TOML file (command-line flags win)");
  app.require_subcommand(1);

  // ingest
  std::string ingest_input, ingest_market = "market", ingest_out;
  int ingest_lag = 1;
  auto* ingest = app.add_subcommand("ingest", "Load a price CSV and emit its log returns");
  ingest->add_option("--input", ingest_input, "Price CSV (date,close)")->required();
  ingest->add_option("--market", ingest_market, "Market id");
  ingest->add_option("--lag", ingest_lag, "Return lag in trading days")->check(CLI::PositiveNumber);
  ingest->add_option("--out", ingest_out, "Write returns CSV here");

  // analyze
  CommonOptions analyze_opts;
  std::string analyze_input, analyze_market, analyze_group = "emerging";
  auto* analyze = app.add_subcommand("analyze", "Full per-market analysis");
  analyze->add_option("--input", analyze_input, "Price CSV (date,close)")->required();
  analyze->add_option("--market", analyze_market, "Market id (defaults to the file stem)");
  analyze->add_option("--group", analyze_group, "underdeveloped | emerging | developed");
  add_analysis_options(analyze, analyze_opts);

  // cohort
  CommonOptions cohort_opts;
  std::string manifest, fixtures, reference = "printed";
  std::vector<std::string> market_specs;
  auto* cohort = app.add_subcommand("cohort", "Analyze several markets and compare them");
  cohort->add_option("--manifest", manifest, "CSV with header path,market_id,group");
  cohort->add_option("--market", market_specs, "path:market_id:group (repeatable)");
  cohort->add_option("--fixtures", fixtures, "Skip estimation and use a bundled Hurst table")
      ->check(CLI::IsMember({"table4"}));
  cohort->add_option("--reference", reference, "Fixture reference vector: printed | computed")
      ->check(CLI::IsMember({"printed", "computed"}));
  cohort->add_option("--direction", cohort_opts.direction, "Development direction: canonical | formula")
      ->check(CLI::IsMember({"canonical", "formula"}));
  cohort->add_option("--jobs", cohort_opts.jobs, "Markets processed concurrently")->check(CLI::PositiveNumber);
  add_analysis_options(cohort, cohort_opts);

  // devindex
  std::string dev_fixtures, dev_table, dev_direction = "canonical", dev_reference = "printed", dev_out;
  auto* devindex = app.add_subcommand("devindex", "Development Index from a Hurst table");
  auto* fx = devindex->add_option("--fixtures", dev_fixtures, "Bundled table")->check(CLI::IsMember({"table4"}));
  auto* tb = devindex->add_option("--hurst-table", dev_table, "Hurst table CSV");
  fx->excludes(tb);
  devindex->add_option("--direction", dev_direction, "canonical | formula")->check(CLI::IsMember({"canonical", "formula"}));
  devindex->add_option("--reference", dev_reference, "printed | computed")->check(CLI::IsMember({"printed", "computed"}));
  devindex->add_option("--out", dev_out, "Write report JSON here");

  // synth
  std::string synth_kind = "white", synth_out, synth_market = "synthetic";
  double synth_h = 0.5, synth_noise = 1.0, synth_scale = 0.01;
  std::size_t synth_n = 8192;
  std::uint64_t synth_seed = 42;
  std::vector<double> periods, amps, phases;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic price CSV");
  synth->add_option("--kind", synth_kind, "white | fgn | harmonic | composite")
      ->check(CLI::IsMember({"white", "fgn", "harmonic", "composite"}));
  synth->add_option("--H", synth_h, "Target Hurst exponent (fgn, composite)");
  synth->add_option("--N", synth_n, "Number of returns");
  synth->add_option("--seed", synth_seed, "Seed")->envname("CYCLESCAN_SEED");
  synth->add_option("--period", periods, "Harmonic period in trading days (repeatable)");
  synth->add_option("--amp", amps, "Harmonic amplitude (repeatable, default 1)");
  synth->add_option("--phase", phases, "Harmonic phase in radians (repeatable, default 0)");
  synth->add_option("--noise", synth_noise, "Noise standard deviation");
  synth->add_option("--return-scale", synth_scale, "Multiplier applied to returns before pricing");
  synth->add_option("--market", synth_market, "Market id");
  synth->add_option("--out", synth_out, "Output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      const auto prices = load_prices(ingest_input, ingest_market);
      const auto r = log_returns(prices, ingest_lag);
      std::printf("%s: %zu prices %s..%s, %zu returns (lag %d)\n", prices.market_id.c_str(), prices.size(),
                  format_date(prices.dates.front()).c_str(), format_date(prices.dates.back()).c_str(), r.size(), r.lag);
      if (!ingest_out.empty()) {
        std::ostringstream os;
        os << "t,date,return\n";
        for (std::size_t t = 0; t < r.size(); ++t)
          os << t << ',' << format_date(prices.dates[t + static_cast<std::size_t>(r.lag)]) << ','
             << detail::fmt_double(r.values[t]) << '\n';
        detail::write_file(ingest_out, os.str());
      }
      return 0;
    }

    if (*analyze) {
      auto cfg = make_config(analyze_opts);
      validate(cfg);
      MarketInput in{analyze_input, analyze_market.empty() ? fs::path(analyze_input).stem().string() : analyze_market,
                     parse_market_group(analyze_group)};
      const auto rep = run_market(cfg, in);
      write_market_report(rep, cfg.output_dir);
      std::printf("%s: N=%zu H=%.4f (r2 %.3f), peaks=%zu\n", rep.market_id.c_str(), rep.n_returns, rep.global_hurst.h,
                  rep.global_hurst.r_squared, rep.peaks.size());
      for (std::size_t i = 0; i < kIntervalCount; ++i)
        std::printf("  %-4s present=%d h=%.3f\n", std::string(kCycleIntervals[i].roman).c_str(),
                    rep.intervals.present(i) ? 1 : 0, rep.hurst_vector.h[i]);
      return 0;
    }

    if (*cohort) {
      auto cfg = make_config(cohort_opts);
      if (!fixtures.empty()) {
        return run_devindex_table(table4_fixture(), cohort_opts.direction, reference,
                                  fs::path(cohort_opts.out) / "cohort" / "devindex.json");
      }
      if (!manifest.empty()) cfg.inputs = load_manifest(manifest);
      for (const auto& s : market_specs) cfg.inputs.push_back(parse_market_spec(s));
      const auto rep = run_cohort(cfg);
      write_cohort_report(rep, cfg.output_dir);
      print_devindex(rep.development, nullptr);
      std::printf("wrote %s\n", cfg.output_dir.string().c_str());
      return 0;
    }

    if (*devindex) {
      if (dev_fixtures.empty() && dev_table.empty()) throw Error(ErrorCode::ConfigError, "need --fixtures or --hurst-table");
      const auto table = dev_table.empty() ? table4_fixture() : load_hurst_table(dev_table);
      return run_devindex_table(table, dev_direction, dev_reference, dev_out);
    }

    if (*synth) {
      SynthSpec spec;
      spec.kind = parse_synth_kind(synth_kind);
      spec.n = synth_n;
      spec.hurst = synth_h;
      spec.noise_sigma = synth_noise;
      spec.seed = synth_seed;
      for (std::size_t i = 0; i < periods.size(); ++i)
        spec.harmonics.push_back({periods[i], i < amps.size() ? amps[i] : 1.0, i < phases.size() ? phases[i] : 0.0});
      const auto r = generate(spec, synth_market);
      std::ostringstream os;
      write_prices_csv(os, to_prices(r, synth_scale));
      detail::write_file(synth_out, os.str());
      std::printf("wrote %zu prices to %s (seed %llu)\n", r.size() + 1, synth_out.c_str(),
                  static_cast<unsigned long long>(synth_seed));
      return 0;
    }
  } catch (const StageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
