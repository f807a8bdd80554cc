#pragma once

// Morlet continuous wavelet transform, scalegram, global-spectrum
// significance and spectral-exponent fits.

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <thread>
#include <vector>

#include "cyclescan/error.hpp"
#include "cyclescan/fft.hpp"
#include "cyclescan/fit.hpp"
#include "cyclescan/ingest.hpp"

namespace cyclescan {

inline constexpr double kMorletOmega0 = 6.0;

/// Fourier period of a Morlet wavelet at unit scale: 4*pi / (w0 + sqrt(2 + w0^2)).
inline double morlet_period_factor(double omega0 = kMorletOmega0) {
  return 4.0 * std::numbers::pi / (omega0 + std::sqrt(2.0 + omega0 * omega0));
}

/// Scale at which a harmonic of the given period maximizes the scalegram.
inline double morlet_scale_for_period(double period, double omega0 = kMorletOmega0) {
  return period / morlet_period_factor(omega0);
}

struct ScaleGrid {
  std::vector<double> scales;
  int voices_per_octave = 8;

  double a_min() const { return scales.front(); }
  double a_max() const { return scales.back(); }
  std::size_t size() const noexcept { return scales.size(); }
};

/// Log-spaced scales a_min * 2^(j / voices) up to N / 5.
inline ScaleGrid build_scale_grid(std::size_t n, int voices_per_octave = 8, double a_min = 2.0) {
  detail::require(n >= 10, ErrorCode::SeriesTooShort,
                  "scale grid needs N >= 10, got " + std::to_string(n));
  detail::require(voices_per_octave >= 1, ErrorCode::InvalidArgument, "voices_per_octave must be >= 1");
  detail::require(a_min >= 1.0, ErrorCode::InvalidArgument, "a_min must be >= 1");
  const double a_max = static_cast<double>(n) / 5.0;
  ScaleGrid grid;
  grid.voices_per_octave = voices_per_octave;
  for (int j = 0;; ++j) {
    const double a = a_min * std::exp2(static_cast<double>(j) / voices_per_octave);
    if (a > a_max * (1.0 + 1e-12)) break;
    grid.scales.push_back(std::min(a, a_max));
  }
  detail::require(!grid.scales.empty(), ErrorCode::SeriesTooShort, "N / 5 is below a_min");
  return grid;
}

struct WaveletField {
  ScaleGrid grid;
  std::size_t n_times = 0;
  /// Row-major: coefficients[j * n_times + b].
  std::vector<std::complex<double>> coefficients;
  /// Largest scale not affected by the zero-padded edges, per time index.
  std::vector<double> coi;

  std::size_t n_scales() const noexcept { return grid.size(); }
  std::span<const std::complex<double>> row(std::size_t j) const {
    return {coefficients.data() + j * n_times, n_times};
  }
  std::span<std::complex<double>> row(std::size_t j) { return {coefficients.data() + j * n_times, n_times}; }
  const std::complex<double>& at(std::size_t j, std::size_t b) const { return coefficients[j * n_times + b]; }
  double power(std::size_t j, std::size_t b) const { return std::norm(at(j, b)); }
  bool inside_coi(std::size_t j, std::size_t b) const { return grid.scales[j] <= coi[b]; }
};

enum class CwtMethod { Auto, Direct, Fft };

struct CwtOptions {
  CwtMethod method = CwtMethod::Auto;
  /// Rows are independent; output is identical for any thread count.
  unsigned threads = 1;
  /// Wavelet support is truncated at |t - b| <= support * a.
  double support = 8.0;
};

namespace detail {

inline std::complex<double> morlet(double eta, double omega0) {
  static const double norm = std::pow(std::numbers::pi, -0.25);
  return norm * std::exp(-0.5 * eta * eta) * std::complex<double>(std::cos(omega0 * eta), std::sin(omega0 * eta));
}

// g(d) = conj(psi(d / a)) / sqrt(a) for d in [-m, m], stored at index d + m.
inline std::vector<std::complex<double>> morlet_kernel(double a, std::size_t m, double omega0) {
  std::vector<std::complex<double>> g(2 * m + 1);
  const double inv_sqrt_a = 1.0 / std::sqrt(a);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = static_cast<double>(i) - static_cast<double>(m);
    g[i] = std::conj(morlet(d / a, omega0)) * inv_sqrt_a;
  }
  return g;
}

inline std::size_t kernel_half_width(double a, std::size_t n, double support) {
  const auto m = static_cast<std::size_t>(std::ceil(support * a));
  return std::min(m, n - 1);
}

inline void cwt_row_direct(std::span<const double> x, double a, double support,
                           std::span<std::complex<double>> out) {
  const std::size_t n = x.size();
  const std::size_t m = kernel_half_width(a, n, support);
  const auto g = morlet_kernel(a, m, kMorletOmega0);
  for (std::size_t b = 0; b < n; ++b) {
    const std::size_t k_lo = b >= m ? b - m : 0;
    const std::size_t k_hi = std::min(n - 1, b + m);
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t k = k_lo; k <= k_hi; ++k) acc += x[k] * g[k + m - b];
    out[b] = acc;
  }
}

// Linear (zero-padded) correlation via a transform of size >= 2N.
inline void cwt_row_fft(const fft::Buffer& x_hat, std::size_t n, double a, double support,
                        std::span<std::complex<double>> out) {
  const std::size_t p = x_hat.size();
  const std::size_t m = kernel_half_width(a, n, support);
  const auto g = morlet_kernel(a, m, kMorletOmega0);
  fft::Buffer h(p);
  // h(d) = g(-d), wrapped into [0, p)
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto d = static_cast<std::ptrdiff_t>(m) - static_cast<std::ptrdiff_t>(i);
    const auto idx = static_cast<std::size_t>((d % static_cast<std::ptrdiff_t>(p) + static_cast<std::ptrdiff_t>(p)) %
                                              static_cast<std::ptrdiff_t>(p));
    h[idx] = g[i];
  }
  fft::forward(h);
  for (std::size_t f = 0; f < p; ++f) h[f] *= x_hat[f];
  fft::backward(h);
  const double inv_p = 1.0 / static_cast<double>(p);
  for (std::size_t b = 0; b < n; ++b) out[b] = h[b] * inv_p;
}

}  // namespace detail

/// W(a,b) = sum_k R(k) conj(psi((k - b) / a)) / sqrt(a), Morlet w0 = 6,
/// zero padding beyond both ends.
inline WaveletField cwt(std::span<const double> x, const ScaleGrid& grid, const CwtOptions& opts = {}) {
  const std::size_t n = x.size();
  detail::require(n >= 10, ErrorCode::SeriesTooShort, "cwt needs at least 10 samples");
  detail::require(!grid.scales.empty(), ErrorCode::InvalidArgument, "empty scale grid");
  detail::require(grid.a_max() <= static_cast<double>(n) / 5.0 * (1.0 + 1e-12), ErrorCode::InvalidArgument,
                  "scale grid exceeds N / 5 for this series");

  WaveletField field;
  field.grid = grid;
  field.n_times = n;
  field.coefficients.assign(grid.size() * n, {0.0, 0.0});
  field.coi.resize(n);
  for (std::size_t b = 0; b < n; ++b) {
    const double edge = static_cast<double>(std::min(b, n - 1 - b));
    field.coi[b] = std::min(edge / std::numbers::sqrt2, grid.a_max());
  }

  const bool use_fft = opts.method == CwtMethod::Fft || (opts.method == CwtMethod::Auto && n > 512);
  fft::Buffer x_hat(use_fft ? fft::next_pow2(2 * n) : 1);
  if (use_fft) {
    for (std::size_t i = 0; i < n; ++i) x_hat[i] = {x[i], 0.0};
    fft::forward(x_hat);
  }

  auto work = [&](std::size_t j_begin, std::size_t j_step) {
    for (std::size_t j = j_begin; j < grid.size(); j += j_step) {
      if (use_fft)
        detail::cwt_row_fft(x_hat, n, grid.scales[j], opts.support, field.row(j));
      else
        detail::cwt_row_direct(x, grid.scales[j], opts.support, field.row(j));
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(grid.size())));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  }
  return field;
}

inline WaveletField cwt(const ReturnSeries& r, const ScaleGrid& grid, const CwtOptions& opts = {}) {
  return cwt(std::span<const double>(r.values), grid, opts);
}

struct Scalegram {
  std::vector<double> scales;
  std::vector<double> energy;
};

/// E_W(a) = sum_b |W(a,b)|^2 with unit time step; optionally only cells inside the coi.
inline Scalegram scalegram(const WaveletField& w, bool inside_coi_only = false) {
  Scalegram s;
  s.scales = w.grid.scales;
  s.energy.assign(w.n_scales(), 0.0);
  for (std::size_t j = 0; j < w.n_scales(); ++j) {
    double acc = 0.0;
    for (std::size_t b = 0; b < w.n_times; ++b) {
      if (inside_coi_only && !w.inside_coi(j, b)) continue;
      acc += w.power(j, b);
    }
    s.energy[j] = acc;
  }
  return s;
}

/// chi2_2(1 - level) / 2: the cell-power multiplier over the background.
inline double significance_multiplier(double level) {
  detail::require(level > 0.0 && level < 1.0, ErrorCode::InvalidArgument, "level must be in (0, 1)");
  boost::math::chi_squared chi2(2.0);
  return boost::math::quantile(chi2, 1.0 - level) / 2.0;
}

struct SignificanceResult {
  double level = 0.10;
  double cell_multiplier = 0.0;
  /// Time mean of |W|^2 per scale; background for the local (cell) test.
  std::vector<double> global_spectrum;
  /// Cell threshold per scale: global_spectrum * cell_multiplier.
  std::vector<double> threshold;
  /// Power-law background fitted to the global spectrum (scale test).
  std::vector<double> background;
  /// Global-spectrum threshold per scale for the time-averaged test.
  std::vector<double> scale_threshold;
  std::vector<bool> significant;
  /// Row-major local map, 1 where |W|^2 > threshold[j].
  std::vector<std::uint8_t> cell_significant;
  std::size_t n_times = 0;

  bool cell(std::size_t j, std::size_t b) const { return cell_significant[j * n_times + b] != 0; }
  double cell_fraction() const {
    if (cell_significant.empty()) return 0.0;
    std::size_t hits = 0;
    for (auto c : cell_significant) hits += c;
    return static_cast<double>(hits) / static_cast<double>(cell_significant.size());
  }
};

namespace detail {

// Decorrelation factor for time-averaged Morlet power.
inline constexpr double kMorletGamma = 2.32;

// Power law fitted to the global spectrum: slope by least squares in log-log
// with weights proportional to each scale's dof, then the amplitude set so
// that the weighted mean of spectrum / background is 1 (the log of a scaled
// chi-square variable is biased low when dof is small).
inline std::vector<double> power_law_background(const std::vector<double>& scales, const std::vector<double>& spectrum,
                                                const std::vector<double>& dof, const std::vector<bool>& exclude) {
  std::vector<double> lx, ly, wt;
  for (std::size_t j = 0; j < scales.size(); ++j) {
    if (spectrum[j] > 0.0 && !exclude[j]) {
      lx.push_back(std::log(scales[j]));
      ly.push_back(std::log(spectrum[j]));
      wt.push_back(dof[j]);
    }
  }
  std::vector<double> bg(scales.size(), 0.0);
  double slope = 0.0;
  if (lx.size() >= 3) {
    double sw = 0.0, mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sw += wt[i];
      mx += wt[i] * lx[i];
      my += wt[i] * ly[i];
    }
    mx /= sw;
    my /= sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxx += wt[i] * (lx[i] - mx) * (lx[i] - mx);
      sxy += wt[i] * (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx > 0.0) slope = sxy / sxx;
  }
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < scales.size(); ++j) {
    if (exclude[j]) continue;
    num += dof[j] * spectrum[j] / std::pow(scales[j], slope);
    den += dof[j];
  }
  const double amplitude = den > 0.0 ? num / den : 0.0;
  for (std::size_t j = 0; j < scales.size(); ++j) bg[j] = amplitude * std::pow(scales[j], slope);
  return bg;
}

}  // namespace detail

/// Local cells are tested against the global spectrum of their scale with a
/// chi-square(2) law. Whole scales are tested by comparing the global
/// spectrum with a power-law background fitted to it, using the
/// time-averaged chi-square law (dof grows with N / a).
inline SignificanceResult significance(const WaveletField& w, double level = 0.10) {
  SignificanceResult res;
  res.level = level;
  res.cell_multiplier = significance_multiplier(level);
  res.n_times = w.n_times;
  const std::size_t ns = w.n_scales();
  res.global_spectrum.assign(ns, 0.0);
  res.threshold.assign(ns, 0.0);
  for (std::size_t j = 0; j < ns; ++j) {
    double acc = 0.0;
    for (std::size_t b = 0; b < w.n_times; ++b) acc += w.power(j, b);
    res.global_spectrum[j] = acc / static_cast<double>(w.n_times);
    res.threshold[j] = res.global_spectrum[j] * res.cell_multiplier;
  }

  res.cell_significant.assign(ns * w.n_times, 0);
  for (std::size_t j = 0; j < ns; ++j)
    for (std::size_t b = 0; b < w.n_times; ++b)
      res.cell_significant[j * w.n_times + b] = w.power(j, b) > res.threshold[j] ? 1 : 0;

  std::vector<double> factor(ns), dof(ns);
  for (std::size_t j = 0; j < ns; ++j) {
    const double ratio = static_cast<double>(w.n_times) / (detail::kMorletGamma * w.grid.scales[j]);
    dof[j] = 2.0 * std::sqrt(1.0 + ratio * ratio);
    boost::math::chi_squared chi2(dof[j]);
    factor[j] = boost::math::quantile(chi2, 1.0 - level) / dof[j];
  }

  // Two passes: the second refits the background without the scales flagged by the first.
  std::vector<bool> exclude(ns, false);
  for (int pass = 0; pass < 2; ++pass) {
    res.background = detail::power_law_background(w.grid.scales, res.global_spectrum, dof, exclude);
    res.scale_threshold.resize(ns);
    res.significant.assign(ns, false);
    for (std::size_t j = 0; j < ns; ++j) {
      res.scale_threshold[j] = res.background[j] * factor[j];
      res.significant[j] = res.global_spectrum[j] > res.scale_threshold[j];
    }
    if (std::count(res.significant.begin(), res.significant.end(), true) + 3 > static_cast<std::ptrdiff_t>(ns))
      break;
    exclude = res.significant;
  }
  return res;
}

struct SpectralExponent {
  double beta = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Least-squares slope of log E_W(a) against log a over [lo, hi].
inline SpectralExponent spectral_exponent(const Scalegram& s, double lo, double hi) {
  std::vector<double> lx, ly;
  for (std::size_t j = 0; j < s.scales.size(); ++j) {
    if (s.scales[j] >= lo && s.scales[j] <= hi) {
      detail::require(s.energy[j] > 0.0, ErrorCode::RangeTooNarrow, "non-positive energy inside fit range");
      lx.push_back(std::log(s.scales[j]));
      ly.push_back(std::log(s.energy[j]));
    }
  }
  detail::require(lx.size() >= 5, ErrorCode::RangeTooNarrow,
                  "fit range holds " + std::to_string(lx.size()) + " scales, need >= 5");
  const auto fit = fit_line(lx, ly);
  return {fit.slope, fit.intercept, fit.r_squared, fit.points};
}

}  // namespace cyclescan
