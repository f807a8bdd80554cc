#pragma once

// Centered detrended moving average (cDMA) fluctuation analysis: global
// Hurst fits, time-dependent (sliding window) local exponents and the
// per-interval Hurst vector.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "cyclescan/error.hpp"
#include "cyclescan/fit.hpp"
#include "cyclescan/ingest.hpp"
#include "cyclescan/intervals.hpp"

namespace cyclescan {

/// Cumulative sum of returns: the series the moving average detrends.
inline std::vector<double> profile(std::span<const double> returns) {
  std::vector<double> x(returns.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < returns.size(); ++i) {
    acc += returns[i];
    x[i] = acc;
  }
  return x;
}

inline std::size_t round_up_even(std::size_t n) { return n % 2 == 0 ? n : n + 1; }

/// Even window sizes, log-spaced at per_decade points per decade over
/// [n_min, n_max], deduplicated.
inline std::vector<std::size_t> log_window_grid(std::size_t n_min, std::size_t n_max, int per_decade = 20) {
  std::vector<std::size_t> out;
  n_min = std::max<std::size_t>(2, round_up_even(n_min));
  if (n_max < n_min) return out;
  const double step = std::pow(10.0, 1.0 / per_decade);
  for (double v = static_cast<double>(n_min); v <= static_cast<double>(n_max) + 1e-9; v *= step) {
    const auto n = round_up_even(static_cast<std::size_t>(std::llround(v)));
    if (n > n_max) break;
    if (out.empty() || out.back() != n) out.push_back(n);
  }
  return out;
}

/// Default grid for a series of length N: [4, N/4], ~20 points per decade.
inline std::vector<std::size_t> default_window_grid(std::size_t n) { return log_window_grid(4, n / 4, 20); }

struct FluctuationCurve {
  std::vector<std::size_t> n_values;
  std::vector<double> sigma;
  std::size_t n_max = 0;
};

namespace detail {

// Prefix sums are accumulated in long double so that affine profiles
// detrend to (near) exactly zero.
inline double cdma_sigma(std::span<const double> x, std::span<const long double> prefix, std::size_t n) {
  const std::size_t len = x.size();
  const std::size_t half = n / 2;
  const long double inv = 1.0L / static_cast<long double>(n + 1);
  long double acc = 0.0L;
  for (std::size_t i = half; i + half < len; ++i) {
    const long double ma = (prefix[i + half + 1] - prefix[i - half]) * inv;
    const long double y = static_cast<long double>(x[i]) - ma;
    acc += y * y;
  }
  return static_cast<double>(std::sqrt(acc / static_cast<long double>(len - n)));
}

inline std::vector<long double> prefix_sums(std::span<const double> x) {
  std::vector<long double> p(x.size() + 1, 0.0L);
  for (std::size_t i = 0; i < x.size(); ++i) p[i + 1] = p[i] + static_cast<long double>(x[i]);
  return p;
}

}  // namespace detail

/// sigma(n) = sqrt( sum_i y_n(i)^2 / (N - n) ), y_n(i) = x(i) minus the
/// centered (n+1)-point moving average at i, i in [n/2, N - n/2).
/// Odd n are rounded up to even.
inline FluctuationCurve cdma_fluctuation(std::span<const double> profile_x, std::span<const std::size_t> n_values) {
  FluctuationCurve curve;
  curve.n_max = profile_x.size();
  std::vector<std::size_t> ns;
  for (auto n : n_values) ns.push_back(std::max<std::size_t>(2, round_up_even(n)));
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  detail::require(!ns.empty(), ErrorCode::InvalidArgument, "no window sizes");
  detail::require(profile_x.size() >= 4 * ns.back(), ErrorCode::SeriesTooShort,
                  "series of length " + std::to_string(profile_x.size()) + " is too short for n = " +
                      std::to_string(ns.back()));
  const auto prefix = detail::prefix_sums(profile_x);
  curve.n_values = ns;
  curve.sigma.reserve(ns.size());
  for (auto n : ns) curve.sigma.push_back(detail::cdma_sigma(profile_x, prefix, n));
  return curve;
}

struct HurstEstimate {
  double h = 0.0;
  std::size_t n_lo = 0;
  std::size_t n_hi = 0;
  double r_squared = 0.0;
  double stderr_slope = 0.0;
  std::size_t points = 0;
  /// H outside [0, 1].
  bool out_of_range = false;
};

/// Slope of log sigma against log n over n in [n_lo, n_hi].
inline HurstEstimate fit_hurst(const FluctuationCurve& curve, std::size_t n_lo, std::size_t n_hi) {
  std::vector<double> lx, ly;
  HurstEstimate est;
  est.n_lo = n_lo;
  est.n_hi = n_hi;
  for (std::size_t k = 0; k < curve.n_values.size(); ++k) {
    const auto n = curve.n_values[k];
    if (n < n_lo || n > n_hi) continue;
    detail::require(curve.sigma[k] > 0.0, ErrorCode::ZeroFluctuation,
                    "sigma(" + std::to_string(n) + ") is zero");
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(curve.sigma[k]));
  }
  detail::require(lx.size() >= 6, ErrorCode::RangeTooNarrow,
                  "fit range [" + std::to_string(n_lo) + ", " + std::to_string(n_hi) + "] holds " +
                      std::to_string(lx.size()) + " window sizes, need >= 6");
  const auto fit = fit_line(lx, ly);
  est.h = fit.slope;
  est.r_squared = fit.r_squared;
  est.stderr_slope = fit.stderr_slope;
  est.points = fit.points;
  est.out_of_range = est.h < 0.0 || est.h > 1.0;
  return est;
}

/// Global H of a return series: cDMA on its profile over the default grid,
/// restricted to [n_lo, n_hi] (0 means the grid bound).
inline HurstEstimate hurst_global(std::span<const double> returns, std::size_t n_lo = 0, std::size_t n_hi = 0) {
  const auto x = profile(returns);
  const auto grid = default_window_grid(x.size());
  detail::require(grid.size() >= 6, ErrorCode::SeriesTooShort, "series too short for a Hurst fit");
  const auto curve = cdma_fluctuation(x, grid);
  return fit_hurst(curve, n_lo ? n_lo : grid.front(), n_hi ? n_hi : grid.back());
}

struct TdDmaParams {
  std::size_t window = 1000;   // N_s
  std::size_t step = 1;        // delta_s
  std::size_t min_window = 200;  // N_min
  double min_r_squared = 0.95;
  unsigned threads = 1;
};

struct LocalHurstSeries {
  TdDmaParams params;
  std::vector<std::size_t> centers;
  std::vector<double> h;
  std::vector<double> r_squared;
  /// Windows whose fit failed the r^2 gate.
  std::vector<bool> flagged;
};

/// Number of window positions: floor((N - N_s) / delta_s) + 1.
inline std::size_t tddma_window_count(std::size_t n, std::size_t window, std::size_t step) {
  return n < window ? 0 : (n - window) / step + 1;
}

/// Sliding-window DMA: H fitted on each window of the profile.
inline LocalHurstSeries tddma(std::span<const double> returns, const TdDmaParams& params = {}) {
  detail::require(params.step >= 1, ErrorCode::InvalidArgument, "step must be >= 1");
  detail::require(params.window >= params.min_window, ErrorCode::InvalidArgument, "window below N_min");
  detail::require(returns.size() >= params.window, ErrorCode::SeriesTooShort,
                  "series of length " + std::to_string(returns.size()) + " is shorter than the window " +
                      std::to_string(params.window));
  const auto x = profile(returns);
  const auto grid = default_window_grid(params.window);
  detail::require(grid.size() >= 6, ErrorCode::SeriesTooShort, "window too small for a Hurst fit");

  LocalHurstSeries out;
  out.params = params;
  const std::size_t count = tddma_window_count(x.size(), params.window, params.step);
  out.centers.resize(count);
  out.h.resize(count);
  out.r_squared.resize(count);
  out.flagged.resize(count);

  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t w = begin; w < count; w += stride) {
      const std::size_t start = w * params.step;
      const std::span<const double> slice(x.data() + start, params.window);
      const auto prefix = detail::prefix_sums(slice);
      std::vector<double> lx, ly;
      for (auto n : grid) {
        const double s = detail::cdma_sigma(slice, prefix, n);
        if (s <= 0.0) continue;
        lx.push_back(std::log(static_cast<double>(n)));
        ly.push_back(std::log(s));
      }
      out.centers[w] = start + params.window / 2;
      if (lx.size() < 6) {
        out.h[w] = std::nan("");
        out.r_squared[w] = 0.0;
        out.flagged[w] = true;
        continue;
      }
      const auto fit = fit_line(lx, ly);
      out.h[w] = fit.slope;
      out.r_squared[w] = fit.r_squared;
      out.flagged[w] = fit.r_squared < params.min_r_squared;
    }
  };
  const unsigned threads = std::max(1u, params.threads);
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  }
  return out;
}

enum class HurstVectorMode {
  /// One fit of the full-series sigma(n) restricted to the interval's scales.
  ScaleRestricted,
  /// Mean over sliding windows of the interval-restricted local slope.
  TdDmaAverage,
};

struct HurstVector {
  std::string market_id;
  std::array<double, kIntervalCount> h{};
  std::array<bool, kIntervalCount> available{};
  std::array<std::size_t, kIntervalCount> n_lo{};
  std::array<std::size_t, kIntervalCount> n_hi{};
  std::array<double, kIntervalCount> r_squared{};

  bool complete() const { return std::all_of(available.begin(), available.end(), [](bool b) { return b; }); }
};

/// Even window sizes used for interval i: those inside the interval's
/// trading-day range, widened around its geometric centre (in log n) until
/// at least six sizes are included. All sizes stay within [4, n_cap].
/// Empty when the interval starts above n_cap or fewer than six sizes fit.
inline std::vector<std::size_t> interval_window_sizes(const CycleInterval& ci, std::size_t n_cap) {
  constexpr std::size_t kMinPoints = 6;
  const double lo = real_to_trading_days(ci.lo);
  const double hi = real_to_trading_days(ci.hi);
  std::vector<std::size_t> all;
  for (std::size_t n = 4; n <= n_cap; n += 2) all.push_back(n);
  if (all.size() < kMinPoints || lo > static_cast<double>(n_cap)) return {};

  std::vector<std::size_t> chosen;
  for (auto n : all)
    if (static_cast<double>(n) >= lo && static_cast<double>(n) <= hi) chosen.push_back(n);
  if (chosen.size() >= kMinPoints) return chosen;

  const double centre = 0.5 * (std::log(lo) + std::log(hi));
  std::vector<std::size_t> order = all;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(std::log(static_cast<double>(a)) - centre) < std::abs(std::log(static_cast<double>(b)) - centre);
  });
  for (auto n : order) {
    if (chosen.size() >= kMinPoints) break;
    if (std::find(chosen.begin(), chosen.end(), n) == chosen.end()) chosen.push_back(n);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

/// Hurst vector from an arbitrary fluctuation function sigma(n), for a
/// series of length n_total (sizes capped at n_total / 4).
inline HurstVector hurst_vector_from(const std::function<double(std::size_t)>& sigma, std::size_t n_total,
                                     std::string market_id = {}) {
  HurstVector hv;
  hv.market_id = std::move(market_id);
  for (std::size_t i = 0; i < kIntervalCount; ++i) {
    const auto sizes = interval_window_sizes(kCycleIntervals[i], n_total / 4);
    if (sizes.empty()) {
      hv.h[i] = std::nan("");
      continue;
    }
    std::vector<double> lx, ly;
    for (auto n : sizes) {
      const double s = sigma(n);
      if (s <= 0.0) continue;
      lx.push_back(std::log(static_cast<double>(n)));
      ly.push_back(std::log(s));
    }
    if (lx.size() < 6) {
      hv.h[i] = std::nan("");
      continue;
    }
    const auto fit = fit_line(lx, ly);
    hv.h[i] = fit.slope;
    hv.r_squared[i] = fit.r_squared;
    hv.available[i] = true;
    hv.n_lo[i] = sizes.front();
    hv.n_hi[i] = sizes.back();
  }
  return hv;
}

inline HurstVector hurst_vector(std::span<const double> returns, std::string market_id = {},
                                HurstVectorMode mode = HurstVectorMode::ScaleRestricted,
                                const TdDmaParams& td = {}) {
  const auto x = profile(returns);
  if (mode == HurstVectorMode::ScaleRestricted) {
    const auto prefix = detail::prefix_sums(x);
    return hurst_vector_from([&](std::size_t n) { return detail::cdma_sigma(x, prefix, n); }, x.size(),
                             std::move(market_id));
  }

  detail::require(x.size() >= td.window, ErrorCode::SeriesTooShort, "series shorter than the tdDMA window");
  HurstVector hv;
  hv.market_id = std::move(market_id);
  const std::size_t count = tddma_window_count(x.size(), td.window, td.step);
  std::array<std::vector<std::size_t>, kIntervalCount> sizes;
  for (std::size_t i = 0; i < kIntervalCount; ++i) sizes[i] = interval_window_sizes(kCycleIntervals[i], td.window / 4);
  std::array<double, kIntervalCount> sum{}, r2sum{};
  std::array<std::size_t, kIntervalCount> used{};
  for (std::size_t w = 0; w < count; ++w) {
    const std::span<const double> slice(x.data() + w * td.step, td.window);
    const auto prefix = detail::prefix_sums(slice);
    for (std::size_t i = 0; i < kIntervalCount; ++i) {
      if (sizes[i].empty()) continue;
      std::vector<double> lx, ly;
      for (auto n : sizes[i]) {
        const double s = detail::cdma_sigma(slice, prefix, n);
        if (s <= 0.0) continue;
        lx.push_back(std::log(static_cast<double>(n)));
        ly.push_back(std::log(s));
      }
      if (lx.size() < 6) continue;
      const auto fit = fit_line(lx, ly);
      sum[i] += fit.slope;
      r2sum[i] += fit.r_squared;
      ++used[i];
    }
  }
  for (std::size_t i = 0; i < kIntervalCount; ++i) {
    if (used[i] == 0) {
      hv.h[i] = std::nan("");
      continue;
    }
    hv.h[i] = sum[i] / static_cast<double>(used[i]);
    hv.r_squared[i] = r2sum[i] / static_cast<double>(used[i]);
    hv.available[i] = true;
    hv.n_lo[i] = sizes[i].front();
    hv.n_hi[i] = sizes[i].back();
  }
  return hv;
}

}  // namespace cyclescan
