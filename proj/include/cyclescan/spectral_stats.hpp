#pragma once

// Relative energy content and relative amplitude of the scale bands under
// each cycle interval, and the per-interval group comparison of those
// metrics across markets.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cyclescan/cwt.hpp"
#include "cyclescan/error.hpp"
#include "cyclescan/intervals.hpp"
#include "cyclescan/market.hpp"
#include "cyclescan/stats.hpp"

namespace cyclescan {

/// What the amplitude integral accumulates per cell.
enum class AmplitudeKind { Modulus, RealPart, Power };

inline AmplitudeKind parse_amplitude_kind(const std::string& s) {
  if (s == "abs") return AmplitudeKind::Modulus;
  if (s == "real") return AmplitudeKind::RealPart;
  if (s == "power") return AmplitudeKind::Power;
  throw Error(ErrorCode::ConfigError, "unknown amplitude kind '" + s + "'");
}

/// Per-scale integrands after the time integral, sampled on the field's grid:
///   energy[j]    = (1/t) * trapz_b |W(a_j, b)|^2 / a_j^2
///   amplitude[j] = (1/t) * trapz_b  A(W(a_j, b)) / a_j^2
/// with unit time step and t the series duration (n_times - 1).
struct ScaleProfile {
  std::vector<double> scales;
  std::vector<double> energy;
  std::vector<double> amplitude;
};

inline ScaleProfile scale_profile(const WaveletField& w, AmplitudeKind kind = AmplitudeKind::Modulus) {
  detail::require(w.n_times >= 2, ErrorCode::SeriesTooShort, "field needs at least 2 time samples");
  ScaleProfile sp;
  sp.scales = w.grid.scales;
  sp.energy.resize(w.n_scales());
  sp.amplitude.resize(w.n_scales());
  const double duration = static_cast<double>(w.n_times - 1);
  for (std::size_t j = 0; j < w.n_scales(); ++j) {
    double e = 0.0, a = 0.0;
    for (std::size_t b = 0; b < w.n_times; ++b) {
      const double weight = (b == 0 || b + 1 == w.n_times) ? 0.5 : 1.0;
      const auto c = w.at(j, b);
      e += weight * std::norm(c);
      switch (kind) {
        case AmplitudeKind::Modulus: a += weight * std::abs(c); break;
        case AmplitudeKind::RealPart: a += weight * c.real(); break;
        case AmplitudeKind::Power: a += weight * std::norm(c); break;
      }
    }
    const double inv_a2 = 1.0 / (sp.scales[j] * sp.scales[j]);
    sp.energy[j] = e * inv_a2 / duration;
    sp.amplitude[j] = a * inv_a2 / duration;
  }
  return sp;
}

/// Integral over [lo, hi] of the piecewise-linear interpolant of f on the
/// grid, clipped to the grid's span. Exactly additive over adjacent ranges.
inline double integrate_scales(const std::vector<double>& scales, const std::vector<double>& f, double lo, double hi) {
  if (scales.size() < 2) return 0.0;
  lo = std::max(lo, scales.front());
  hi = std::min(hi, scales.back());
  if (hi <= lo) return 0.0;
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < scales.size(); ++j) {
    const double a0 = scales[j], a1 = scales[j + 1];
    const double l = std::max(lo, a0), r = std::min(hi, a1);
    if (r <= l) continue;
    const double slope = (f[j + 1] - f[j]) / (a1 - a0);
    const double fl = f[j] + slope * (l - a0);
    const double fr = f[j] + slope * (r - a0);
    acc += 0.5 * (fl + fr) * (r - l);
  }
  return acc;
}

/// Band bounds in trading days for a cycle interval.
struct ScaleBand {
  double lo = 0.0;
  double hi = 0.0;
};

inline ScaleBand trading_band(const CycleInterval& ci) { return {real_to_trading_days(ci.lo), real_to_trading_days(ci.hi)}; }

inline bool band_has_grid_scale(const std::vector<double>& scales, const ScaleBand& band) {
  return std::any_of(scales.begin(), scales.end(), [&](double a) { return a >= band.lo && a <= band.hi; });
}

/// E_i for a band: scale integral of the energy profile.
inline double band_energy(const ScaleProfile& sp, const ScaleBand& band) {
  detail::require(band_has_grid_scale(sp.scales, band), ErrorCode::EmptyBand, "no grid scales inside the band");
  return integrate_scales(sp.scales, sp.energy, band.lo, band.hi);
}

inline double total_energy(const ScaleProfile& sp) {
  return integrate_scales(sp.scales, sp.energy, sp.scales.front(), sp.scales.back());
}

/// A_i for a band: scale integral of the amplitude profile divided by the
/// band width (clipped to the grid span).
inline double band_amplitude(const ScaleProfile& sp, const ScaleBand& band) {
  detail::require(band_has_grid_scale(sp.scales, band), ErrorCode::EmptyBand, "no grid scales inside the band");
  const double lo = std::max(band.lo, sp.scales.front());
  const double hi = std::min(band.hi, sp.scales.back());
  if (hi <= lo) return 0.0;
  return integrate_scales(sp.scales, sp.amplitude, lo, hi) / (hi - lo);
}

inline double total_amplitude(const ScaleProfile& sp) {
  const double lo = sp.scales.front(), hi = sp.scales.back();
  if (hi <= lo) return 0.0;
  return integrate_scales(sp.scales, sp.amplitude, lo, hi) / (hi - lo);
}

inline double relative_energy(const ScaleProfile& sp, const ScaleBand& band) {
  const double total = total_energy(sp);
  detail::require(total > 0.0, ErrorCode::InvalidArgument, "total energy is zero");
  return band_energy(sp, band) / total;
}

inline double relative_amplitude(const ScaleProfile& sp, const ScaleBand& band) {
  const double total = total_amplitude(sp);
  detail::require(total != 0.0, ErrorCode::InvalidArgument, "total amplitude is zero");
  return band_amplitude(sp, band) / total;
}

inline double band_energy(const WaveletField& w, const CycleInterval& ci) {
  return band_energy(scale_profile(w), trading_band(ci));
}

inline double relative_energy(const WaveletField& w, const CycleInterval& ci) {
  return relative_energy(scale_profile(w), trading_band(ci));
}

inline double relative_amplitude(const WaveletField& w, const CycleInterval& ci,
                                 AmplitudeKind kind = AmplitudeKind::Modulus) {
  return relative_amplitude(scale_profile(w, kind), trading_band(ci));
}

struct BandMetric {
  std::size_t interval = 0;  // 0-based
  double e_w = 0.0;
  double a_w = 0.0;
  double e_band = 0.0;
  double a_band = 0.0;
  double e_total = 0.0;
  double a_total = 0.0;
};

/// Metrics for every interval whose band holds at least one grid scale.
inline std::array<std::optional<BandMetric>, kIntervalCount> band_metrics(const ScaleProfile& sp) {
  std::array<std::optional<BandMetric>, kIntervalCount> out;
  const double e_total = total_energy(sp);
  const double a_total = total_amplitude(sp);
  for (std::size_t i = 0; i < kIntervalCount; ++i) {
    const auto band = trading_band(kCycleIntervals[i]);
    if (!band_has_grid_scale(sp.scales, band) || e_total <= 0.0 || a_total == 0.0) continue;
    BandMetric m;
    m.interval = i;
    m.e_band = band_energy(sp, band);
    m.a_band = band_amplitude(sp, band);
    m.e_total = e_total;
    m.a_total = a_total;
    m.e_w = m.e_band / e_total;
    m.a_w = m.a_band / a_total;
    out[i] = m;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Group comparison

enum class OmnibusTest { Anova, KruskalWallis, Skipped };

inline std::string_view to_string(OmnibusTest t) {
  switch (t) {
    case OmnibusTest::Anova: return "anova";
    case OmnibusTest::KruskalWallis: return "kruskal_wallis";
    case OmnibusTest::Skipped: return "skipped";
  }
  return "unknown";
}

struct GroupSummary {
  MarketGroup group;
  std::size_t n = 0;
  double mean = 0.0;
  /// Shapiro-Wilk result; absent when n < 3 or the sample is constant.
  std::optional<stats::ShapiroWilkResult> normality;
};

struct PairwiseComparison {
  MarketGroup first;
  MarketGroup second;
  double statistic = 0.0;
  double p_raw = 1.0;
  double p_adjusted = 1.0;
  bool significant = false;
};

struct ComparisonOutcome {
  std::vector<GroupSummary> groups;
  OmnibusTest test = OmnibusTest::Skipped;
  double statistic = 0.0;
  double p = 1.0;
  bool significant = false;
  std::vector<PairwiseComparison> pairwise;
  std::string note;
};

/// Shapiro-Wilk on each group; all normal -> ANOVA with Bonferroni t
/// post-hoc, otherwise Kruskal-Wallis with Mann-Whitney post-hoc
/// (Bonferroni-adjusted within the pair set). Post-hoc runs only when the
/// omnibus test is significant. Empty groups are dropped; a group with
/// fewer than 3 values cannot be shown normal.
inline ComparisonOutcome compare_groups(const std::vector<std::pair<MarketGroup, stats::Sample>>& input,
                                        double alpha = 0.05) {
  ComparisonOutcome out;
  std::vector<std::pair<MarketGroup, stats::Sample>> groups;
  for (const auto& g : input)
    if (!g.second.empty()) groups.push_back(g);

  bool all_normal = true;
  for (const auto& [label, sample] : groups) {
    GroupSummary s;
    s.group = label;
    s.n = sample.size();
    s.mean = stats::mean(sample);
    if (sample.size() >= 3 && *std::max_element(sample.begin(), sample.end()) > *std::min_element(sample.begin(), sample.end())) {
      s.normality = stats::shapiro_wilk(sample);
      if (s.normality->p < alpha) all_normal = false;
    } else {
      all_normal = false;
    }
    out.groups.push_back(s);
  }
  if (groups.size() < 2) {
    out.note = "fewer than two non-empty groups";
    return out;
  }

  std::vector<stats::Sample> samples;
  for (const auto& g : groups) samples.push_back(g.second);
  const bool anova_ok = all_normal && std::all_of(samples.begin(), samples.end(), [](const auto& s) { return s.size() >= 2; });

  if (anova_ok) {
    out.test = OmnibusTest::Anova;
    const auto res = stats::anova_oneway(samples);
    out.statistic = res.f;
    out.p = res.p;
    out.significant = res.p < alpha;
    if (out.significant) {
      for (const auto& pr : stats::bonferroni_pairwise(samples, alpha))
        out.pairwise.push_back({groups[pr.first].first, groups[pr.second].first, pr.statistic, pr.p_raw,
                                pr.p_adjusted, pr.significant});
    }
    return out;
  }

  out.test = OmnibusTest::KruskalWallis;
  const auto res = stats::kruskal_wallis(samples);
  out.statistic = res.h;
  out.p = res.p;
  out.significant = res.p < alpha;
  if (out.significant) {
    const double pairs = static_cast<double>(samples.size() * (samples.size() - 1) / 2);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      for (std::size_t j = i + 1; j < samples.size(); ++j) {
        const auto mw = stats::mann_whitney(samples[i], samples[j]);
        PairwiseComparison pc{groups[i].first, groups[j].first, mw.u, mw.p, std::min(1.0, mw.p * pairs), false};
        pc.significant = pc.p_adjusted < alpha;
        out.pairwise.push_back(pc);
      }
    }
  }
  return out;
}

struct MarketBandMetrics {
  std::string market_id;
  MarketGroup group = MarketGroup::Emerging;
  /// Absent where the market shows no peak in the interval.
  std::array<std::optional<BandMetric>, kIntervalCount> metrics;
};

enum class BandMetricKind { RelativeEnergy, RelativeAmplitude };

inline std::string_view to_string(BandMetricKind k) {
  return k == BandMetricKind::RelativeEnergy ? "e_W" : "a_W";
}

struct GroupComparisonEntry {
  std::size_t interval = 0;
  BandMetricKind metric = BandMetricKind::RelativeEnergy;
  ComparisonOutcome outcome;
};

struct GroupComparisonReport {
  double alpha = 0.05;
  std::vector<GroupComparisonEntry> entries;
};

inline GroupComparisonReport group_compare(const std::vector<MarketBandMetrics>& markets, double alpha = 0.05) {
  detail::require(markets.size() >= 2, ErrorCode::ConfigError, "group comparison needs at least 2 markets");
  GroupComparisonReport report;
  report.alpha = alpha;
  for (std::size_t i = 0; i < kIntervalCount; ++i) {
    for (auto kind : {BandMetricKind::RelativeEnergy, BandMetricKind::RelativeAmplitude}) {
      std::vector<std::pair<MarketGroup, stats::Sample>> groups;
      for (auto g : kMarketGroups) groups.emplace_back(g, stats::Sample{});
      for (const auto& m : markets) {
        if (!m.metrics[i]) continue;
        const double v = kind == BandMetricKind::RelativeEnergy ? m.metrics[i]->e_w : m.metrics[i]->a_w;
        groups[static_cast<std::size_t>(m.group)].second.push_back(v);
      }
      report.entries.push_back({i, kind, compare_groups(groups, alpha)});
    }
  }
  return report;
}

}  // namespace cyclescan
