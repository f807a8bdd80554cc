#pragma once

// Scalegram peak detection and assignment to the canonical cycle intervals.

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "cyclescan/cwt.hpp"
#include "cyclescan/error.hpp"
#include "cyclescan/intervals.hpp"

namespace cyclescan {

struct Peak {
  std::size_t grid_index = 0;
  double scale_trading = 0.0;
  double scale_real = 0.0;
  double energy = 0.0;
  double prominence = 0.0;
  bool significant = false;
};

struct PeakOptions {
  /// Minimum prominence as a fraction of the scalegram maximum.
  double min_prominence = 0.05;
};

namespace detail {

// Height above the higher of the two lowest points reachable on each side
// before meeting a higher sample (or the edge).
inline double prominence(const std::vector<double>& e, std::size_t j) {
  double left_min = e[j];
  for (std::size_t k = j; k-- > 0;) {
    if (e[k] > e[j]) break;
    left_min = std::min(left_min, e[k]);
  }
  double right_min = e[j];
  for (std::size_t k = j + 1; k < e.size(); ++k) {
    if (e[k] > e[j]) break;
    right_min = std::min(right_min, e[k]);
  }
  return e[j] - std::max(left_min, right_min);
}

}  // namespace detail

/// Interior grid points strictly above both neighbours with enough
/// prominence. A peak is significant when its scale passes the global
/// spectrum test in `sig`.
inline std::vector<Peak> detect_peaks(const Scalegram& s, const SignificanceResult& sig, const PeakOptions& opts = {}) {
  detail::require(s.energy.size() == sig.significant.size(), ErrorCode::InvalidArgument,
                  "scalegram and significance use different grids");
  std::vector<Peak> peaks;
  if (s.energy.size() < 3) return peaks;
  const double emax = *std::max_element(s.energy.begin(), s.energy.end());
  if (emax <= 0.0) return peaks;
  for (std::size_t j = 1; j + 1 < s.energy.size(); ++j) {
    if (!(s.energy[j] > s.energy[j - 1] && s.energy[j] > s.energy[j + 1])) continue;
    const double prom = detail::prominence(s.energy, j);
    if (prom < opts.min_prominence * emax) continue;
    Peak p;
    p.grid_index = j;
    p.scale_trading = s.scales[j];
    p.scale_real = trading_to_real_days(s.scales[j]);
    p.energy = s.energy[j];
    p.prominence = prom;
    p.significant = sig.significant[j];
    peaks.push_back(p);
  }
  return peaks;
}

struct PeakIntervalMap {
  /// Highest-energy significant peak per interval.
  std::array<std::optional<Peak>, kIntervalCount> representative;
  /// Significant peaks outside [2, 900] real days.
  std::vector<Peak> unassigned;

  bool present(std::size_t i) const { return representative[i].has_value(); }
};

inline PeakIntervalMap assign_intervals(const std::vector<Peak>& peaks) {
  PeakIntervalMap map;
  for (const auto& p : peaks) {
    if (!p.significant) continue;
    const auto idx = interval_for_real_days(p.scale_real);
    if (!idx) {
      map.unassigned.push_back(p);
      continue;
    }
    auto& slot = map.representative[*idx];
    if (!slot || p.energy > slot->energy) slot = p;
  }
  return map;
}

/// The significant peak with the largest energy, if any.
inline std::optional<Peak> top_significant_peak(const std::vector<Peak>& peaks) {
  std::optional<Peak> best;
  for (const auto& p : peaks)
    if (p.significant && (!best || p.energy > best->energy)) best = p;
  return best;
}

}  // namespace cyclescan
