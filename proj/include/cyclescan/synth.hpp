#pragma once

// Seeded synthetic return series used as oracles for the estimators.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cyclescan/error.hpp"
#include "cyclescan/fft.hpp"
#include "cyclescan/ingest.hpp"

namespace cyclescan {

/// Generator versioning: bump when the bit stream for a given seed changes.
inline constexpr const char* kRngAlgorithm = "mt19937_64/53-bit-uniform/marsaglia-polar v1";

/// mt19937_64 (fully specified by the standard) with explicit uniform and
/// Gaussian transforms, so a seed reproduces the same stream on every
/// standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class SynthKind { White, Fgn, Harmonic, Composite };

inline SynthKind parse_synth_kind(const std::string& s) {
  if (s == "white") return SynthKind::White;
  if (s == "fgn") return SynthKind::Fgn;
  if (s == "harmonic") return SynthKind::Harmonic;
  if (s == "composite") return SynthKind::Composite;
  throw Error(ErrorCode::InvalidSpec, "unknown synth kind '" + s + "'");
}

struct Harmonic {
  double period = 0.0;  // trading days
  double amplitude = 1.0;
  double phase = 0.0;   // radians
};

struct SynthSpec {
  SynthKind kind = SynthKind::White;
  std::size_t n = 1024;
  double hurst = 0.5;
  std::vector<Harmonic> harmonics;
  /// White: ignored (unit variance). Harmonic: additive Gaussian noise.
  /// Composite: standard deviation of the fGn background.
  double noise_sigma = 1.0;
  std::uint64_t seed = 42;
};

inline void validate(const SynthSpec& spec) {
  detail::require(spec.n >= 16, ErrorCode::InvalidSpec, "N must be >= 16");
  if (spec.kind == SynthKind::Fgn || spec.kind == SynthKind::Composite)
    detail::require(spec.hurst > 0.0 && spec.hurst < 1.0, ErrorCode::InvalidSpec, "H must lie in (0, 1)");
  if (spec.kind == SynthKind::Harmonic || spec.kind == SynthKind::Composite) {
    detail::require(!spec.harmonics.empty(), ErrorCode::InvalidSpec, "no harmonic components");
    for (const auto& h : spec.harmonics)
      detail::require(h.period > 0.0 && h.period < static_cast<double>(spec.n) / 2.0, ErrorCode::InvalidSpec,
                      "harmonic period must lie in (0, N/2)");
  }
  detail::require(spec.noise_sigma >= 0.0, ErrorCode::InvalidSpec, "noise_sigma must be >= 0");
}

/// Spectral synthesis: Gaussian Fourier coefficients with power f^-(2H-1),
/// generated at twice the padded length and truncated to N. Output is
/// rescaled to zero mean and unit sample variance.
inline std::vector<double> fractional_gaussian_noise(std::size_t n, double hurst, Rng& rng) {
  const std::size_t m = 2 * fft::next_pow2(n);
  fft::Buffer spec(m);
  const double gamma = 2.0 * hurst - 1.0;
  for (std::size_t k = 1; k <= m / 2; ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(m);
    const double amp = std::sqrt(0.5 * std::pow(f, -gamma));
    const double re = rng.gaussian() * amp;
    const double im = k == m / 2 ? 0.0 : rng.gaussian() * amp;
    spec[k] = {re, im};
    if (k != m / 2) spec[m - k] = {re, -im};
  }
  fft::backward(spec);
  std::vector<double> out(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = spec[i].real();
    mean += out[i];
  }
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (auto& v : out) {
    v -= mean;
    var += v * v;
  }
  const double sd = std::sqrt(var / static_cast<double>(n));
  for (auto& v : out) v /= sd;
  return out;
}

inline ReturnSeries generate(const SynthSpec& spec, std::string market_id = "synthetic") {
  validate(spec);
  Rng rng(spec.seed);
  ReturnSeries out;
  out.market_id = std::move(market_id);
  out.values.assign(spec.n, 0.0);

  switch (spec.kind) {
    case SynthKind::White:
      for (auto& v : out.values) v = rng.gaussian();
      break;
    case SynthKind::Fgn:
      out.values = fractional_gaussian_noise(spec.n, spec.hurst, rng);
      break;
    case SynthKind::Harmonic:
      for (auto& v : out.values) v = spec.noise_sigma * rng.gaussian();
      break;
    case SynthKind::Composite: {
      out.values = fractional_gaussian_noise(spec.n, spec.hurst, rng);
      for (auto& v : out.values) v *= spec.noise_sigma;
      break;
    }
  }
  if (spec.kind == SynthKind::Harmonic || spec.kind == SynthKind::Composite) {
    for (std::size_t t = 0; t < spec.n; ++t) {
      double s = 0.0;
      for (const auto& h : spec.harmonics)
        s += h.amplitude * std::cos(2.0 * std::numbers::pi * static_cast<double>(t) / h.period + h.phase);
      out.values[t] += s;
    }
  }
  return out;
}

/// Integrates returns into a price path on a Monday-to-Friday calendar
/// starting 2000-01-03, so synthetic data can flow through the CSV ingest.
/// Returns are multiplied by return_scale first (unit-variance generator
/// output would otherwise overflow exp() on long persistent paths).
inline PriceSeries to_prices(const ReturnSeries& r, double return_scale = 0.01, double start_price = 100.0) {
  using namespace std::chrono;
  PriceSeries p;
  p.market_id = r.market_id;
  sys_days day = sys_days{year{2000} / January / 3};
  auto push_day = [&](double value) {
    while (weekday{day} == Saturday || weekday{day} == Sunday) day += days{1};
    p.dates.emplace_back(day);
    p.values.push_back(value);
    day += days{1};
  };
  double price = start_price;
  push_day(price);
  for (double v : r.values) {
    price *= std::exp(return_scale * v);
    push_day(price);
  }
  return p;
}

}  // namespace cyclescan
