#include <gtest/gtest.h>

#include <cmath>

#include "cyclescan/cwt.hpp"
#include "cyclescan/peaks.hpp"
#include "test_support.hpp"

using namespace cyclescan;
using cyclescan::testing::harmonic_noise;

namespace {

SignificanceResult all_significant(std::size_t n) {
  SignificanceResult sig;
  sig.significant.assign(n, true);
  return sig;
}

Peak peak_at(double real_days, double energy = 1.0) {
  Peak p;
  p.scale_real = real_days;
  p.scale_trading = real_days / kRealDaysPerTradingDay;
  p.energy = energy;
  p.significant = true;
  return p;
}

// One grid step in log scale.
double step(const ScaleGrid& g) { return std::exp2(1.0 / g.voices_per_octave); }

}  // namespace

TEST(DetectPeaks, MonotoneScalegramHasNone) {
  Scalegram s;
  for (int j = 0; j < 30; ++j) {
    s.scales.push_back(2.0 * std::exp2(j / 8.0));
    s.energy.push_back(1.0 + j);
  }
  EXPECT_TRUE(detect_peaks(s, all_significant(30)).empty());
  std::reverse(s.energy.begin(), s.energy.end());
  EXPECT_TRUE(detect_peaks(s, all_significant(30)).empty());
}

TEST(DetectPeaks, ProminenceFilter) {
  Scalegram s;
  s.scales = {1, 2, 3, 4, 5, 6, 7};
  s.energy = {0, 10, 0, 0.2, 0.1, 5, 0};
  const auto peaks = detect_peaks(s, all_significant(7), {0.05});
  ASSERT_EQ(peaks.size(), 2u);
  EXPECT_EQ(peaks[0].grid_index, 1u);
  EXPECT_EQ(peaks[1].grid_index, 5u);
  EXPECT_NEAR(peaks[0].prominence, 10.0, 1e-12);
  EXPECT_NEAR(peaks[1].prominence, 5.0, 1e-12);
  EXPECT_EQ(detect_peaks(s, all_significant(7), {0.0}).size(), 3u);
}

TEST(DetectPeaks, SignificanceIsCarried) {
  Scalegram s;
  s.scales = {1, 2, 3, 4, 5};
  s.energy = {0, 3, 0, 4, 0};
  auto sig = all_significant(5);
  sig.significant[1] = false;
  const auto peaks = detect_peaks(s, sig);
  ASSERT_EQ(peaks.size(), 2u);
  EXPECT_FALSE(peaks[0].significant);
  EXPECT_TRUE(peaks[1].significant);
  EXPECT_EQ(top_significant_peak(peaks)->grid_index, 3u);
}

TEST(DetectPeaks, CosinePlusNoisePeriodTwenty) {
  const auto x = harmonic_noise(4096, {{20.0, 1.0, 0.0}}, 1.0, 42);
  const auto w = cwt(x, build_scale_grid(x.size()));
  const auto s = scalegram(w);
  const auto peaks = detect_peaks(s, significance(w));
  std::size_t significant = 0;
  for (const auto& p : peaks) significant += p.significant;
  EXPECT_EQ(significant, 1u);
  const auto top = top_significant_peak(peaks);
  ASSERT_TRUE(top);
  // Real-day period 28; the scalegram peak sits at that period's Morlet scale.
  const double expected_real = trading_to_real_days(morlet_scale_for_period(20.0));
  EXPECT_LE(std::abs(std::log(top->scale_real / expected_real)), std::log(step(w.grid)) + 1e-12);
  EXPECT_NEAR(trading_to_real_days(20.0), 28.0, 1e-12);
  EXPECT_EQ(assign_intervals(peaks).present(3), true);  // IV: 25-60 days
}

TEST(DetectPeaks, TwoHarmonics) {
  const auto x = harmonic_noise(8192, {{10.0, 1.0, 0.0}, {100.0, 1.0, 0.5}}, 0.5, 7);
  const auto w = cwt(x, build_scale_grid(x.size()));
  const auto peaks = detect_peaks(scalegram(w), significance(w));
  std::vector<Peak> sig;
  for (const auto& p : peaks)
    if (p.significant) sig.push_back(p);
  ASSERT_EQ(sig.size(), 2u);
  EXPECT_LE(std::abs(std::log(sig[0].scale_trading / morlet_scale_for_period(10.0))), std::log(step(w.grid)) + 1e-12);
  EXPECT_LE(std::abs(std::log(sig[1].scale_trading / morlet_scale_for_period(100.0))), std::log(step(w.grid)) + 1e-12);
}

TEST(TradingToRealDays, Conversions) {
  EXPECT_DOUBLE_EQ(trading_to_real_days(5.0), 7.0);
  EXPECT_DOUBLE_EQ(trading_to_real_days(250.0), 350.0);
  EXPECT_EQ(interval_for_real_days(350.0), 7u);  // VIII
  EXPECT_THROW(trading_to_real_days(0.0), Error);
  EXPECT_THROW(trading_to_real_days(-1.0), Error);
  EXPECT_NEAR(real_to_trading_days(trading_to_real_days(17.3)), 17.3, 1e-12);
}

TEST(Intervals, Bounds) {
  EXPECT_EQ(interval_for_real_days(2.0), 0u);
  EXPECT_EQ(interval_for_real_days(6.0), 0u);
  EXPECT_EQ(interval_for_real_days(6.0001), 1u);
  EXPECT_EQ(interval_for_real_days(10.0), 1u);
  EXPECT_EQ(interval_for_real_days(25.0), 2u);
  EXPECT_EQ(interval_for_real_days(900.0), 8u);
  EXPECT_FALSE(interval_for_real_days(1.99));
  EXPECT_FALSE(interval_for_real_days(900.5));
  for (std::size_t i = 0; i < kIntervalCount; ++i) {
    EXPECT_EQ(kCycleIntervals[i].index, i + 1);
    EXPECT_EQ(interval_for_real_days(kCycleIntervals[i].nominal_days), i);
    if (i) {
      EXPECT_EQ(kCycleIntervals[i].lo, kCycleIntervals[i - 1].hi);
    }
  }
}

TEST(AssignIntervals, BoundaryPeakGoesToFirstInterval) {
  const auto map = assign_intervals({peak_at(6.0)});
  EXPECT_TRUE(map.present(0));
  EXPECT_FALSE(map.present(1));
}

TEST(AssignIntervals, PresenceMatrix) {
  const auto map = assign_intervals({peak_at(7), peak_at(30), peak_at(600)});
  for (std::size_t i = 0; i < kIntervalCount; ++i) EXPECT_EQ(map.present(i), i == 1 || i == 3 || i == 8) << i;
}

TEST(AssignIntervals, NothingSignificant) {
  auto p = peak_at(30);
  p.significant = false;
  const auto map = assign_intervals({p});
  for (std::size_t i = 0; i < kIntervalCount; ++i) EXPECT_FALSE(map.present(i));
  EXPECT_FALSE(top_significant_peak({p}));
}

TEST(AssignIntervals, HighestEnergyRepresentsAndOutliersAreKept) {
  const auto map = assign_intervals({peak_at(30, 1.0), peak_at(40, 5.0), peak_at(1.5), peak_at(1200)});
  ASSERT_TRUE(map.present(3));
  EXPECT_DOUBLE_EQ(map.representative[3]->scale_real, 40.0);
  EXPECT_EQ(map.unassigned.size(), 2u);
}
