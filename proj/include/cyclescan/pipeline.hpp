#pragma once

// Per-market and cohort orchestration with CSV / JSON report output.

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cyclescan/cwt.hpp"
#include "cyclescan/devindex.hpp"
#include "cyclescan/dma.hpp"
#include "cyclescan/error.hpp"
#include "cyclescan/fixtures.hpp"
#include "cyclescan/ingest.hpp"
#include "cyclescan/market.hpp"
#include "cyclescan/peaks.hpp"
#include "cyclescan/spectral_stats.hpp"

namespace cyclescan {

struct MarketInput {
  std::string path;
  std::string market_id;
  MarketGroup group = MarketGroup::Emerging;
};

struct RunConfig {
  std::vector<MarketInput> inputs;
  int lag = 1;
  int voices_per_octave = 8;
  double a_min = 2.0;
  double level = 0.10;
  double min_prominence = 0.05;
  bool scalegram_inside_coi = false;
  AmplitudeKind amplitude = AmplitudeKind::Modulus;
  TdDmaParams tddma;
  bool run_tddma = true;
  HurstVectorMode hurst_mode = HurstVectorMode::ScaleRestricted;
  DirectionMode direction = DirectionMode::Canonical;
  std::filesystem::path output_dir = "out";
  unsigned jobs = 1;
};

inline void validate(const RunConfig& cfg) {
  detail::require(cfg.level > 0.0 && cfg.level < 1.0, ErrorCode::ConfigError, "significance level must be in (0, 1)");
  detail::require(cfg.lag >= 1, ErrorCode::ConfigError, "lag must be >= 1");
  detail::require(cfg.voices_per_octave >= 1, ErrorCode::ConfigError, "voices per octave must be >= 1");
  detail::require(cfg.jobs >= 1, ErrorCode::ConfigError, "jobs must be >= 1");
}

/// An error from one pipeline stage of one market.
class StageError : public std::runtime_error {
 public:
  StageError(std::string market_id, std::string stage, const std::string& what)
      : std::runtime_error(market_id + " [" + stage + "]: " + what), market_id_(std::move(market_id)),
        stage_(std::move(stage)) {}
  const std::string& market_id() const noexcept { return market_id_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string market_id_;
  std::string stage_;
};

struct MarketReport {
  std::string market_id;
  MarketGroup group = MarketGroup::Emerging;
  std::size_t n_prices = 0;
  std::size_t n_returns = 0;
  Scalegram scalegram;
  SignificanceResult significance;
  std::vector<Peak> peaks;
  PeakIntervalMap intervals;
  std::array<std::optional<BandMetric>, kIntervalCount> band_metrics;
  std::optional<SpectralExponent> spectral;
  HurstEstimate global_hurst;
  FluctuationCurve fluctuation;
  std::optional<LocalHurstSeries> local_hurst;
  std::string tddma_note;
  HurstVector hurst_vector;
};

namespace detail {

template <class F>
auto stage(const std::string& market, const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(market, name, e.what());
  }
}

}  // namespace detail

inline MarketReport analyze_returns(const ReturnSeries& r, const RunConfig& cfg, MarketGroup group = MarketGroup::Emerging) {
  MarketReport rep;
  rep.market_id = r.market_id;
  rep.group = group;
  rep.n_returns = r.size();
  const auto& id = r.market_id;

  const auto field = detail::stage(id, "cwt", [&] {
    const auto grid = build_scale_grid(r.size(), cfg.voices_per_octave, cfg.a_min);
    return cwt(r, grid);
  });
  rep.scalegram = detail::stage(id, "scalegram", [&] { return scalegram(field, cfg.scalegram_inside_coi); });
  rep.significance = detail::stage(id, "significance", [&] { return significance(field, cfg.level); });
  rep.peaks = detail::stage(id, "peaks", [&] {
    return detect_peaks(rep.scalegram, rep.significance, PeakOptions{cfg.min_prominence});
  });
  rep.intervals = assign_intervals(rep.peaks);
  rep.band_metrics = detail::stage(id, "band_metrics", [&] {
    auto metrics = band_metrics(scale_profile(field, cfg.amplitude));
    for (std::size_t i = 0; i < kIntervalCount; ++i)
      if (!rep.intervals.present(i)) metrics[i].reset();
    return metrics;
  });
  try {
    rep.spectral = spectral_exponent(rep.scalegram, rep.scalegram.scales.front(), rep.scalegram.scales.back());
  } catch (const Error&) {
    rep.spectral.reset();
  }

  detail::stage(id, "dma", [&] {
    const auto x = profile(r.values);
    rep.fluctuation = cdma_fluctuation(x, default_window_grid(x.size()));
    rep.global_hurst = fit_hurst(rep.fluctuation, rep.fluctuation.n_values.front(), rep.fluctuation.n_values.back());
    return 0;
  });
  if (cfg.run_tddma) {
    if (r.size() >= cfg.tddma.window)
      rep.local_hurst = detail::stage(id, "tddma", [&] { return tddma(r.values, cfg.tddma); });
    else
      rep.tddma_note = "series shorter than the tdDMA window (" + std::to_string(cfg.tddma.window) + ")";
  }
  rep.hurst_vector = detail::stage(id, "hurst_vector", [&] {
    return hurst_vector(r.values, r.market_id, cfg.hurst_mode, cfg.tddma);
  });
  return rep;
}

inline MarketReport run_market(const RunConfig& cfg, const MarketInput& input) {
  const auto prices = detail::stage(input.market_id, "ingest", [&] { return load_prices(input.path, input.market_id); });
  const auto returns = detail::stage(input.market_id, "ingest", [&] { return log_returns(prices, cfg.lag); });
  auto rep = analyze_returns(returns, cfg, input.group);
  rep.n_prices = prices.size();
  return rep;
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline nlohmann::json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << content;
}

}  // namespace detail

inline std::string scalegram_csv(const MarketReport& rep) {
  std::ostringstream os;
  os << "scale_trading_days,scale_real_days,energy,global,threshold,significant\n";
  const auto& s = rep.scalegram;
  const auto& sig = rep.significance;
  for (std::size_t j = 0; j < s.scales.size(); ++j) {
    os << detail::fmt_double(s.scales[j]) << ',' << detail::fmt_double(trading_to_real_days(s.scales[j])) << ','
       << detail::fmt_double(s.energy[j]) << ',' << detail::fmt_double(sig.global_spectrum[j]) << ','
       << detail::fmt_double(sig.scale_threshold[j]) << ',' << (sig.significant[j] ? 1 : 0) << '\n';
  }
  return os.str();
}

inline std::string peaks_csv(const MarketReport& rep) {
  std::ostringstream os;
  os << "interval,nominal_days,scale_real_days,energy,significant\n";
  for (const auto& p : rep.peaks) {
    const auto idx = interval_for_real_days(p.scale_real);
    if (idx)
      os << kCycleIntervals[*idx].roman << ',' << detail::fmt_double(kCycleIntervals[*idx].nominal_days);
    else
      os << ',';
    os << ',' << detail::fmt_double(p.scale_real) << ',' << detail::fmt_double(p.energy) << ','
       << (p.significant ? 1 : 0) << '\n';
  }
  return os.str();
}

inline std::string tddma_csv(const LocalHurstSeries& local) {
  std::ostringstream os;
  os << "center,h_local,r_squared,flagged\n";
  for (std::size_t k = 0; k < local.h.size(); ++k)
    os << local.centers[k] << ',' << detail::fmt_double(local.h[k]) << ',' << detail::fmt_double(local.r_squared[k])
       << ',' << (local.flagged[k] ? 1 : 0) << '\n';
  return os.str();
}

inline std::string fluctuation_csv(const FluctuationCurve& curve) {
  std::ostringstream os;
  os << "n,sigma\n";
  for (std::size_t k = 0; k < curve.n_values.size(); ++k)
    os << curve.n_values[k] << ',' << detail::fmt_double(curve.sigma[k]) << '\n';
  return os.str();
}

inline nlohmann::json hurst_vector_json(const HurstVector& hv) {
  nlohmann::json comps = nlohmann::json::object();
  for (std::size_t i = 0; i < kIntervalCount; ++i) {
    comps[std::to_string(i + 1)] = {
        {"interval", kCycleIntervals[i].roman},
        {"h", detail::json_number(hv.h[i])},
        {"available", hv.available[i]},
        {"n_lo", hv.n_lo[i]},
        {"n_hi", hv.n_hi[i]},
        {"r_squared", detail::json_number(hv.r_squared[i])},
    };
  }
  return nlohmann::json{{hv.market_id, comps}};
}

inline nlohmann::json market_summary_json(const MarketReport& rep) {
  nlohmann::json j;
  j["market_id"] = rep.market_id;
  j["group"] = to_string(rep.group);
  j["n_prices"] = rep.n_prices;
  j["n_returns"] = rep.n_returns;
  j["global_hurst"] = {{"h", rep.global_hurst.h},
                       {"n_lo", rep.global_hurst.n_lo},
                       {"n_hi", rep.global_hurst.n_hi},
                       {"r_squared", rep.global_hurst.r_squared},
                       {"stderr", rep.global_hurst.stderr_slope},
                       {"out_of_range", rep.global_hurst.out_of_range}};
  if (rep.spectral)
    j["spectral_exponent"] = {{"beta", rep.spectral->beta}, {"r_squared", rep.spectral->r_squared},
                              {"h_from_beta", (rep.spectral->beta + 1.0) / 2.0}};
  nlohmann::json intervals = nlohmann::json::array();
  for (std::size_t i = 0; i < kIntervalCount; ++i) {
    nlohmann::json e{{"interval", kCycleIntervals[i].roman}, {"present", rep.intervals.present(i)}};
    if (rep.intervals.present(i)) e["scale_real_days"] = rep.intervals.representative[i]->scale_real;
    if (rep.band_metrics[i]) {
      e["e_W"] = rep.band_metrics[i]->e_w;
      e["a_W"] = rep.band_metrics[i]->a_w;
    }
    intervals.push_back(e);
  }
  j["intervals"] = intervals;
  if (rep.local_hurst) {
    const auto& lh = *rep.local_hurst;
    std::size_t flagged = static_cast<std::size_t>(std::count(lh.flagged.begin(), lh.flagged.end(), true));
    j["tddma"] = {{"windows", lh.h.size()}, {"window", lh.params.window}, {"step", lh.params.step}, {"flagged", flagged}};
  } else {
    j["tddma"] = nullptr;
    if (!rep.tddma_note.empty()) j["tddma_note"] = rep.tddma_note;
  }
  return j;
}

inline void write_market_report(const MarketReport& rep, const std::filesystem::path& out_dir) {
  const auto dir = out_dir / rep.market_id;
  detail::write_file(dir / "scalegram.csv", scalegram_csv(rep));
  detail::write_file(dir / "peaks.csv", peaks_csv(rep));
  detail::write_file(dir / "fluctuation.csv", fluctuation_csv(rep.fluctuation));
  if (rep.local_hurst) detail::write_file(dir / "tddma.csv", tddma_csv(*rep.local_hurst));
  detail::write_file(dir / "hurst_vector.json", hurst_vector_json(rep.hurst_vector).dump(2) + "\n");
  detail::write_file(dir / "report.json", market_summary_json(rep).dump(2) + "\n");
}

inline nlohmann::json group_report_json(const GroupComparisonReport& rep) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : rep.entries) {
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& g : e.outcome.groups) {
      nlohmann::json gj{{"group", to_string(g.group)}, {"n", g.n}, {"mean", g.mean}};
      if (g.normality)
        gj["shapiro_wilk"] = {{"w", g.normality->w}, {"p", g.normality->p}};
      else
        gj["shapiro_wilk"] = nullptr;
      groups.push_back(gj);
    }
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : e.outcome.pairwise)
      pairs.push_back({{"first", to_string(p.first)},
                       {"second", to_string(p.second)},
                       {"statistic", detail::json_number(p.statistic)},
                       {"p_raw", p.p_raw},
                       {"p_adjusted", p.p_adjusted},
                       {"significant", p.significant}});
    nlohmann::json ej{{"interval", kCycleIntervals[e.interval].roman},
                      {"metric", to_string(e.metric)},
                      {"test", to_string(e.outcome.test)},
                      {"statistic", detail::json_number(e.outcome.statistic)},
                      {"p", e.outcome.p},
                      {"significant", e.outcome.significant},
                      {"groups", groups},
                      {"pairwise", pairs}};
    if (!e.outcome.note.empty()) ej["note"] = e.outcome.note;
    entries.push_back(ej);
  }
  return {{"alpha", rep.alpha}, {"entries", entries}};
}

inline std::string group_report_csv(const GroupComparisonReport& rep) {
  std::ostringstream os;
  os << "interval,metric,test,statistic,p,significant,mean_underdeveloped,mean_emerging,mean_developed,pairwise\n";
  for (const auto& e : rep.entries) {
    std::array<std::string, 3> means;
    for (const auto& g : e.outcome.groups) means[static_cast<std::size_t>(g.group)] = detail::fmt_double(g.mean);
    std::string pairs;
    for (const auto& p : e.outcome.pairwise) {
      if (!pairs.empty()) pairs += ';';
      pairs += std::string(to_string(p.first)) + "-" + std::string(to_string(p.second)) + ":" +
               detail::fmt_double(p.p_adjusted);
    }
    os << kCycleIntervals[e.interval].roman << ',' << to_string(e.metric) << ',' << to_string(e.outcome.test) << ','
       << detail::fmt_double(e.outcome.statistic) << ',' << detail::fmt_double(e.outcome.p) << ','
       << (e.outcome.significant ? 1 : 0) << ',' << means[0] << ',' << means[1] << ',' << means[2] << ',' << pairs
       << '\n';
  }
  return os.str();
}

inline nlohmann::json development_report_json(const DevelopmentReport& rep,
                                              const std::vector<std::optional<MarketGroup>>& published = {}) {
  auto vec = [](const HurstSpaceVector& v) {
    nlohmann::json a = nlohmann::json::array();
    for (double x : v) a.push_back(x);
    return a;
  };
  nlohmann::json markets = nlohmann::json::array();
  for (std::size_t k = 0; k < rep.market_ids.size(); ++k) {
    nlohmann::json m{{"market_id", rep.market_ids[k]},
                     {"unit_vector", vec(rep.units[k].s)},
                     {"development_index", rep.indices[k]},
                     {"class", to_string(rep.classification.classes[k])},
                     {"borderline", static_cast<bool>(rep.classification.borderline[k])}};
    if (k < published.size() && published[k]) m["published_class"] = to_string(*published[k]);
    markets.push_back(m);
  }
  return {{"reference_vector", vec(rep.reference)},
          {"computed_reference_vector", vec(rep.computed_reference.m)},
          {"reference_stability",
           {{"leave_one_out_max_delta", rep.computed_reference.leave_one_out_max_delta},
            {"threshold", rep.computed_reference.stability_threshold},
            {"stable", rep.computed_reference.stable}}},
          {"direction", {{"mode", to_string(rep.direction.source)}, {"e", vec(rep.direction.e)}}},
          {"pi_max", rep.classification.pi_max},
          {"borders",
           {{"developed", rep.classification.border_developed},
            {"underdeveloped", rep.classification.border_underdeveloped},
            {"borderline_band", rep.classification.borderline_band}}},
          {"similarity", rep.similarity},
          {"markets", markets}};
}

// ---------------------------------------------------------------------------
// Cohort

struct CohortReport {
  std::vector<MarketReport> markets;
  GroupComparisonReport group_stats;
  DevelopmentReport development;
};

/// Runs every market (up to cfg.jobs at a time), then the group comparison
/// and the Development Index over the cohort. Output order follows
/// cfg.inputs regardless of scheduling.
inline CohortReport run_cohort(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.inputs.size() < 2)
    throw StageError("cohort", "config", "cohort statistics need at least 2 markets, got " + std::to_string(cfg.inputs.size()));
  CohortReport rep;
  rep.markets.resize(cfg.inputs.size());
  for (std::size_t start = 0; start < cfg.inputs.size(); start += cfg.jobs) {
    const std::size_t end = std::min(cfg.inputs.size(), start + cfg.jobs);
    std::vector<std::future<MarketReport>> batch;
    for (std::size_t k = start; k < end; ++k)
      batch.push_back(std::async(std::launch::async, [&cfg, k] { return run_market(cfg, cfg.inputs[k]); }));
    for (std::size_t k = start; k < end; ++k) rep.markets[k] = batch[k - start].get();
  }

  std::vector<MarketBandMetrics> metrics;
  std::vector<HurstVector> vectors;
  for (const auto& m : rep.markets) {
    metrics.push_back({m.market_id, m.group, m.band_metrics});
    vectors.push_back(m.hurst_vector);
  }
  rep.group_stats = detail::stage("cohort", "group_stats", [&] { return group_compare(metrics); });
  rep.development = detail::stage("cohort", "devindex", [&] { return development_report(vectors, cfg.direction); });
  return rep;
}

inline void write_cohort_report(const CohortReport& rep, const std::filesystem::path& out_dir) {
  for (const auto& m : rep.markets) write_market_report(m, out_dir);
  detail::write_file(out_dir / "cohort" / "groupstats.json", group_report_json(rep.group_stats).dump(2) + "\n");
  detail::write_file(out_dir / "cohort" / "groupstats.csv", group_report_csv(rep.group_stats));
  detail::write_file(out_dir / "cohort" / "devindex.json", development_report_json(rep.development).dump(2) + "\n");
}

enum class ReferenceSource { Printed, Computed };

/// Development Index straight from a Hurst table. With the printed
/// reference, the table's `m_i` row is used for the unit vectors.
inline DevelopmentReport devindex_from_table(const HurstTable& table, DirectionMode mode, ReferenceSource ref) {
  std::optional<HurstSpaceVector> override_ref;
  if (ref == ReferenceSource::Printed) {
    detail::require(table.printed_reference.has_value(), ErrorCode::ConfigError,
                    "Hurst table has no m_i row; use the computed reference");
    override_ref = table.printed_reference;
  }
  return development_report(table.vectors(), mode, override_ref);
}

}  // namespace cyclescan
