#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "cyclescan/dma.hpp"
#include "test_support.hpp"

using namespace cyclescan;
using cyclescan::testing::fgn;
using cyclescan::testing::white;

TEST(Profile, CumulativeSum) {
  const std::vector<double> r{1, -2, 3.5};
  EXPECT_EQ(profile(r), (std::vector<double>{1, -1, 2.5}));
}

TEST(WindowGrid, EvenAndIncreasing) {
  const auto g = default_window_grid(8192);
  EXPECT_EQ(g.front(), 4u);
  EXPECT_LE(g.back(), 2048u);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_EQ(g[i] % 2, 0u);
    if (i) {
      EXPECT_GT(g[i], g[i - 1]);
    }
  }
}

TEST(CdmaFluctuation, ConstantProfileIsFlat) {
  const std::vector<double> x(1000, 3.25);
  const auto c = cdma_fluctuation(x, default_window_grid(x.size()));
  for (double s : c.sigma) EXPECT_NEAR(s, 0.0, 1e-9);
  EXPECT_THROW(fit_hurst(c, 4, 250), Error);
}

TEST(CdmaFluctuation, LinearTrendIsRemoved) {
  std::vector<double> x(2000);
  std::iota(x.begin(), x.end(), 0.0);
  const auto c = cdma_fluctuation(x, default_window_grid(x.size()));
  for (double s : c.sigma) EXPECT_NEAR(s, 0.0, 1e-7);
}

TEST(CdmaFluctuation, MatchesDirectDefinition) {
  const auto r = white(300, 3);
  const auto x = profile(r);
  const std::vector<std::size_t> ns{4, 10, 30};
  const auto c = cdma_fluctuation(x, ns);
  for (std::size_t k = 0; k < ns.size(); ++k) {
    const std::size_t n = ns[k], half = n / 2;
    double ss = 0.0;
    for (std::size_t i = half; i + half < x.size(); ++i) {
      double m = 0.0;
      for (std::size_t t = i - half; t <= i + half; ++t) m += x[t];
      m /= static_cast<double>(n + 1);
      ss += (x[i] - m) * (x[i] - m);
    }
    EXPECT_NEAR(c.sigma[k], std::sqrt(ss / static_cast<double>(x.size() - n)), 1e-10) << n;
  }
}

TEST(CdmaFluctuation, TooShort) {
  const std::vector<double> x(30, 1.0);
  const std::vector<std::size_t> ns{4, 10};
  EXPECT_THROW(cdma_fluctuation(x, ns), Error);
}

TEST(FitHurst, ExactPowerLaw) {
  FluctuationCurve c;
  for (std::size_t n = 4; n <= 1000; n += 6) {
    c.n_values.push_back(n);
    c.sigma.push_back(2.5 * std::pow(static_cast<double>(n), 0.7));
  }
  const auto h = fit_hurst(c, 4, 1000);
  EXPECT_NEAR(h.h, 0.7, 1e-9);
  EXPECT_FALSE(h.out_of_range);
  EXPECT_THROW(fit_hurst(c, 4, 20), Error);  // fewer than six points
}

TEST(HurstGlobal, WhiteNoiseEnsemble) {
  double mean = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) mean += hurst_global(white(4096, seed)).h / 100.0;
  EXPECT_NEAR(mean, 0.5, 0.05);
}

TEST(HurstGlobal, AntiPersistentFgn) {
  std::vector<double> hs;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) hs.push_back(hurst_global(fgn(8192, 0.3, seed)).h);
  EXPECT_NEAR(cyclescan::testing::median(hs), 0.3, 0.05);
}

TEST(Tddma, StationaryFgn) {
  TdDmaParams p;
  p.step = 25;
  const auto local = tddma(fgn(6000, 0.7, 12), p);
  ASSERT_EQ(local.h.size(), tddma_window_count(6000, 1000, 25));
  double mean = 0.0;
  for (double h : local.h) {
    EXPECT_NEAR(h, 0.7, 0.1);
    mean += h / static_cast<double>(local.h.size());
  }
  EXPECT_NEAR(mean, 0.7, 0.03);
}

TEST(Tddma, DetectsChangeInScaling) {
  auto x = fgn(5000, 0.3, 1);
  const auto y = fgn(5000, 0.8, 2);
  x.insert(x.end(), y.begin(), y.end());
  TdDmaParams p;
  p.step = 50;
  const auto local = tddma(x, p);
  EXPECT_NEAR(local.h.front(), 0.3, 0.1);
  EXPECT_NEAR(local.h.back(), 0.8, 0.1);
  EXPECT_LT(local.centers.front(), 5000u);
  EXPECT_GT(local.centers.back(), 5000u);
}

TEST(Tddma, NonOverlappingWindowCount) {
  TdDmaParams p;
  p.window = 1000;
  p.step = 1000;
  const auto local = tddma(white(4500, 1), p);
  EXPECT_EQ(local.h.size(), 4u);
  EXPECT_EQ(tddma_window_count(4500, 1000, 1000), 4u);
  EXPECT_EQ(tddma_window_count(999, 1000, 1), 0u);
  EXPECT_EQ(tddma_window_count(1000, 1000, 1), 1u);
}

TEST(Tddma, ThreadsDoNotChangeOutput) {
  const auto x = white(1600, 8);
  TdDmaParams one, many;
  one.step = many.step = 7;
  many.threads = 3;
  EXPECT_EQ(tddma(x, one).h, tddma(x, many).h);
}

TEST(Tddma, RejectsBadParameters) {
  TdDmaParams p;
  p.window = 100;
  EXPECT_THROW(tddma(white(2000, 1), p), Error);
  EXPECT_THROW(tddma(white(500, 1), TdDmaParams{}), Error);
}

TEST(HurstVector, PiecewisePowerLaw) {
  // sigma(n) = n^0.4 below 50, continuing as n^0.8 above.
  const auto sigma = [](std::size_t n) {
    const double x = static_cast<double>(n);
    return x < 50 ? std::pow(x, 0.4) : std::pow(50.0, 0.4) * std::pow(x / 50.0, 0.8);
  };
  const auto hv = hurst_vector_from(sigma, 8192);
  ASSERT_TRUE(hv.complete());
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(hv.h[i], 0.4, 1e-9) << i;
  for (std::size_t i = 5; i < kIntervalCount; ++i) EXPECT_NEAR(hv.h[i], 0.8, 1e-9) << i;
  EXPECT_GT(hv.h[4], 0.4);
  EXPECT_LT(hv.h[4], 0.8);
}

TEST(HurstVector, ShortSeriesFlagsMissingComponents) {
  const auto hv = hurst_vector(white(400, 2));
  EXPECT_EQ(hv.h.size(), kIntervalCount);
  EXPECT_FALSE(hv.complete());
  EXPECT_TRUE(hv.available[0]);
  EXPECT_FALSE(hv.available[8]);
  EXPECT_TRUE(std::isnan(hv.h[8]));
}

TEST(HurstVector, IntervalWindowSizes) {
  for (const auto& ci : kCycleIntervals) {
    const auto sizes = interval_window_sizes(ci, 2048);
    ASSERT_GE(sizes.size(), 6u);
    for (auto n : sizes) {
      EXPECT_EQ(n % 2, 0u);
      EXPECT_GE(n, 4u);
      EXPECT_LE(n, 2048u);
    }
  }
  EXPECT_TRUE(interval_window_sizes(kCycleIntervals[8], 100).empty());
}

TEST(HurstVector, WhiteNoiseEnsemble) {
  std::array<double, kIntervalCount> mean{};
  const int seeds = 20;
  for (int s = 1; s <= seeds; ++s) {
    const auto hv = hurst_vector(fgn(8192, 0.5, static_cast<std::uint64_t>(s)));
    ASSERT_TRUE(hv.complete());
    for (std::size_t i = 0; i < kIntervalCount; ++i) mean[i] += hv.h[i] / seeds;
  }
  for (std::size_t i = 0; i < kIntervalCount; ++i) EXPECT_NEAR(mean[i], 0.5, 0.08) << i;
}

TEST(HurstVector, TdDmaAverageMode) {
  TdDmaParams td;
  td.step = 100;
  const auto hv = hurst_vector(fgn(4000, 0.7, 3), "x", HurstVectorMode::TdDmaAverage, td);
  for (std::size_t i = 0; i < 5; ++i) {
    ASSERT_TRUE(hv.available[i]) << i;
    EXPECT_NEAR(hv.h[i], 0.7, 0.15) << i;
  }
}
