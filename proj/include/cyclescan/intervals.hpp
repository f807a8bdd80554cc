#pragma once

// The nine canonical cycle intervals, in real (calendar) days.

#include <array>
#include <optional>
#include <string_view>

#include "cyclescan/error.hpp"

namespace cyclescan {

inline constexpr std::size_t kIntervalCount = 9;

struct CycleInterval {
  int index;  // 1..9
  std::string_view roman;
  double nominal_days;
  double lo;
  double hi;
};

inline constexpr std::array<CycleInterval, kIntervalCount> kCycleIntervals{{
    {1, "I", 5, 2, 6},
    {2, "II", 7, 6, 10},
    {3, "III", 14, 10, 25},
    {4, "IV", 30, 25, 60},
    {5, "V", 90, 60, 110},
    {6, "VI", 150, 110, 190},
    {7, "VII", 210, 190, 250},
    {8, "VIII", 360, 250, 450},
    {9, "IX", 600, 450, 900},
}};

/// 5 trading days span 7 calendar days.
inline constexpr double kRealDaysPerTradingDay = 7.0 / 5.0;

inline double trading_to_real_days(double trading_days) {
  detail::require(trading_days > 0.0, ErrorCode::InvalidArgument, "scale must be positive");
  return trading_days * kRealDaysPerTradingDay;
}

inline double real_to_trading_days(double real_days) {
  detail::require(real_days > 0.0, ErrorCode::InvalidArgument, "scale must be positive");
  return real_days / kRealDaysPerTradingDay;
}

/// Interval index (0-based) containing a real-day scale. Intervals are
/// (lo, hi] except the first, which is [2, 6]; shared endpoints go to the
/// lower interval. Scales outside [2, 900] have no interval.
inline std::optional<std::size_t> interval_for_real_days(double real_days) {
  if (real_days < kCycleIntervals.front().lo || real_days > kCycleIntervals.back().hi) return std::nullopt;
  for (std::size_t i = 0; i < kIntervalCount; ++i)
    if (real_days <= kCycleIntervals[i].hi) return i;
  return std::nullopt;
}

}  // namespace cyclescan
