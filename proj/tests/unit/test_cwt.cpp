#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "cyclescan/cwt.hpp"
#include "test_support.hpp"

using namespace cyclescan;
using cyclescan::testing::cosine;
using cyclescan::testing::white;

namespace {

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

std::size_t nearest_index(const std::vector<double>& scales, double a) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < scales.size(); ++j)
    if (std::abs(std::log(scales[j] / a)) < std::abs(std::log(scales[best] / a))) best = j;
  return best;
}

}  // namespace

TEST(ScaleGrid, CappedAtFifthOfLength) {
  const auto g = build_scale_grid(1000, 8);
  EXPECT_LE(g.a_max(), 200.0);
  EXPECT_DOUBLE_EQ(g.a_min(), 2.0);
  EXPECT_GT(g.a_max(), 200.0 / std::exp2(1.0 / 8.0));
}

TEST(ScaleGrid, ShortestSeries) {
  const auto g = build_scale_grid(10, 8);
  EXPECT_LE(g.a_max(), 2.0);
  EXPECT_EQ(g.size(), 1u);
  EXPECT_THROW(build_scale_grid(9, 8), Error);
}

TEST(ScaleGrid, Dyadic) {
  const auto g = build_scale_grid(5120, 1);
  std::vector<double> expected;
  for (double a = 2; a <= 1024; a *= 2) expected.push_back(a);
  ASSERT_EQ(g.size(), expected.size());
  for (std::size_t j = 0; j < g.size(); ++j) EXPECT_NEAR(g.scales[j], expected[j], 1e-9);
}

TEST(ScaleGrid, StrictlyIncreasing) {
  const auto g = build_scale_grid(4096, 12);
  for (std::size_t j = 1; j < g.size(); ++j) EXPECT_GT(g.scales[j], g.scales[j - 1]);
}

TEST(Morlet, PeriodFactor) {
  // Fourier period of a Morlet scale, w0 = 6: 4*pi / (6 + sqrt(38)).
  EXPECT_NEAR(morlet_period_factor(), 4.0 * M_PI / (6.0 + std::sqrt(38.0)), 1e-15);
  EXPECT_NEAR(morlet_period_factor(), 1.0330, 1e-4);
  EXPECT_NEAR(morlet_scale_for_period(20.0), 20.0 / 1.0330, 2e-3);
}

TEST(Cwt, ZeroSeriesGivesZeroField) {
  const std::vector<double> x(300, 0.0);
  const auto w = cwt(x, build_scale_grid(x.size()));
  for (const auto& c : w.coefficients) EXPECT_EQ(std::abs(c), 0.0);
  const auto s = scalegram(w);
  for (double e : s.energy) EXPECT_EQ(e, 0.0);
}

TEST(Cwt, Linearity) {
  const auto x = white(700, 1), y = white(700, 2);
  std::vector<double> xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xy[i] = 2.5 * x[i] - y[i];
  const auto grid = build_scale_grid(x.size());
  for (auto method : {CwtMethod::Direct, CwtMethod::Fft}) {
    CwtOptions o;
    o.method = method;
    const auto wx = cwt(x, grid, o), wy = cwt(y, grid, o), wxy = cwt(xy, grid, o);
    for (std::size_t k = 0; k < wxy.coefficients.size(); ++k)
      ASSERT_LT(std::abs(wxy.coefficients[k] - (2.5 * wx.coefficients[k] - wy.coefficients[k])), 1e-9);
  }
}

TEST(Cwt, DirectAndFftPathsAgree) {
  const auto x = white(1500, 9);
  const auto grid = build_scale_grid(x.size(), 6);
  CwtOptions direct, fast;
  direct.method = CwtMethod::Direct;
  fast.method = CwtMethod::Fft;
  const auto a = cwt(x, grid, direct), b = cwt(x, grid, fast);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.coefficients.size(); ++k)
    worst = std::max(worst, std::abs(a.coefficients[k] - b.coefficients[k]));
  EXPECT_LT(worst, 1e-9);
}

TEST(Cwt, ThreadCountDoesNotChangeOutput) {
  const auto x = white(2048, 4);
  const auto grid = build_scale_grid(x.size());
  CwtOptions one, many;
  many.threads = 3;
  EXPECT_EQ(cwt(x, grid, one).coefficients, cwt(x, grid, many).coefficients);
}

TEST(Cwt, InteriorShiftCovariance) {
  // Away from the edges, delaying the input delays the coefficients.
  const std::size_t n = 2000, shift = 37;
  const auto base = white(n + shift, 5);
  std::vector<double> x(base.begin() + shift, base.end()), y(base.begin(), base.end() - shift);
  const auto grid = build_scale_grid(n, 4);
  const auto wx = cwt(x, grid), wy = cwt(y, grid);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto reach = static_cast<std::size_t>(8.0 * grid.scales[j]) + 1;
    for (std::size_t b = reach + shift; b + reach < n; b += 17)
      ASSERT_LT(std::abs(wx.at(j, b - shift) - wy.at(j, b)), 1e-9);
  }
}

TEST(Cwt, CosineMaximisesAtMorletScale) {
  for (double period : {8.0, 20.0, 64.0, 150.0}) {
    const auto x = cosine(4096, period);
    const auto w = cwt(x, build_scale_grid(x.size(), 16));
    // Brute-force scan: mean |W| per scale over the interior.
    std::vector<double> mod(w.n_scales(), 0.0);
    for (std::size_t j = 0; j < w.n_scales(); ++j)
      for (std::size_t b = 1024; b < 3072; ++b) mod[j] += std::abs(w.at(j, b));
    const auto predicted = nearest_index(w.grid.scales, period * (6.0 + std::sqrt(38.0)) / (4.0 * M_PI));
    EXPECT_LE(std::abs(static_cast<long>(argmax(mod)) - static_cast<long>(predicted)), 1) << "period " << period;
    const auto s = scalegram(w);
    EXPECT_LE(std::abs(static_cast<long>(argmax(s.energy)) - static_cast<long>(predicted)), 1) << "period " << period;
  }
}

TEST(Cwt, ConeOfInfluence) {
  const auto w = cwt(white(400, 1), build_scale_grid(400));
  EXPECT_DOUBLE_EQ(w.coi.front(), 0.0);
  EXPECT_DOUBLE_EQ(w.coi.back(), 0.0);
  EXPECT_FALSE(w.inside_coi(0, 0));
  EXPECT_TRUE(w.inside_coi(0, 200));
  for (std::size_t b = 0; b < 200; ++b) EXPECT_LE(w.coi[b], w.coi[b + 1]);
}

TEST(Scalegram, InsideCoiIsNoLargerThanFull) {
  const auto w = cwt(white(1024, 8), build_scale_grid(1024));
  const auto full = scalegram(w), inner = scalegram(w, true);
  for (std::size_t j = 0; j < full.energy.size(); ++j) EXPECT_LE(inner.energy[j], full.energy[j]);
}

TEST(Scalegram, WhiteNoiseIsFlat) {
  const std::size_t n = 4096;
  const auto grid = build_scale_grid(n);
  std::vector<double> mean_energy(grid.size(), 0.0);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto s = scalegram(cwt(white(n, seed), grid));
    for (std::size_t j = 0; j < grid.size(); ++j) mean_energy[j] += s.energy[j] / 100.0;
  }
  const double avg = std::accumulate(mean_energy.begin(), mean_energy.end(), 0.0) / static_cast<double>(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j)
    EXPECT_NEAR(mean_energy[j] / avg, 1.0, 0.15) << "scale " << grid.scales[j];
}

TEST(Significance, MultiplierAtTenPercent) {
  EXPECT_NEAR(significance_multiplier(0.10), 2.302585, 1e-6);
  for (double level : {0.01, 0.05, 0.10, 0.3, 0.5}) {
    // chi2 with 2 dof is exponential with mean 2: quantile is -2 ln(level).
    EXPECT_NEAR(significance_multiplier(level), -2.0 * std::log(level) / 2.0, 1e-9);
    boost::math::chi_squared chi2(2.0);
    EXPECT_NEAR(significance_multiplier(level), boost::math::quantile(chi2, 1.0 - level) / 2.0, 1e-12);
  }
  EXPECT_THROW(significance_multiplier(0.0), Error);
  EXPECT_THROW(significance_multiplier(1.0), Error);
}

TEST(Significance, ConstantPowerIsNeverSignificant) {
  // Constant |W|^2 equals its own time mean; the cell test needs power above
  // mean * (-ln level), which exceeds 1 for every level below 1/e.
  WaveletField w;
  w.grid = build_scale_grid(512, 4);
  w.n_times = 512;
  w.coefficients.assign(w.grid.size() * w.n_times, std::complex<double>(0.6, 0.8));
  w.coi.assign(w.n_times, 1e9);
  for (double level : {0.01, 0.05, 0.10, 0.2, 0.3}) {
    const auto sig = significance(w, level);
    EXPECT_EQ(sig.cell_fraction(), 0.0) << level;
    for (bool s : sig.significant) EXPECT_FALSE(s) << level;
  }
}

TEST(Significance, WhiteNoiseCellFalsePositiveRate) {
  const std::size_t n = 2048;
  const auto grid = build_scale_grid(n);
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) total += significance(cwt(white(n, seed), grid), 0.10).cell_fraction();
  EXPECT_NEAR(total / 100.0, 0.10, 0.05);
}

TEST(Significance, HarmonicScaleIsFlagged) {
  const auto x = cyclescan::testing::harmonic_noise(4096, {{40.0, 1.0, 0.0}}, 1.0, 3);
  const auto w = cwt(x, build_scale_grid(x.size()));
  const auto sig = significance(w);
  const auto j = nearest_index(w.grid.scales, morlet_scale_for_period(40.0));
  EXPECT_TRUE(sig.significant[j]);
  std::size_t flagged = 0;
  for (bool s : sig.significant) flagged += s;
  EXPECT_LT(flagged, w.n_scales() / 3);
}

TEST(SpectralExponent, ExactPowerLaw) {
  Scalegram s;
  for (double a = 2; a < 1000; a *= 1.1) {
    s.scales.push_back(a);
    s.energy.push_back(3.7 * a);
  }
  const auto fit = spectral_exponent(s, 2, 1000);
  EXPECT_NEAR(fit.beta, 1.0, 1e-6);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  EXPECT_THROW(spectral_exponent(s, 10, 12), Error);
}

TEST(SpectralExponent, WhiteNoiseIsScaleFlat) {
  const std::size_t n = 4096;
  const auto grid = build_scale_grid(n);
  double beta = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed)
    beta += spectral_exponent(scalegram(cwt(white(n, seed), grid)), 8, n / 16.0).beta / 20.0;
  EXPECT_NEAR(beta, 0.0, 0.15);
}

TEST(SpectralExponent, FgnSlope) {
  const std::size_t n = 8192;
  const auto grid = build_scale_grid(n);
  double beta = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed)
    beta += spectral_exponent(scalegram(cwt(cyclescan::testing::fgn(n, 0.8, seed), grid)), 8, n / 16.0).beta / 10.0;
  EXPECT_NEAR(beta, 0.6, 0.2);
}
