#pragma once

// Hurst-space classification: reference vector, relative unit vectors,
// cosine-similarity matrix, development direction and the Development
// Index (projection of each unit vector on that direction).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cyclescan/dma.hpp"
#include "cyclescan/error.hpp"
#include "cyclescan/intervals.hpp"
#include "cyclescan/market.hpp"

namespace cyclescan {

using HurstSpaceVector = std::array<double, kIntervalCount>;

inline double dot(const HurstSpaceVector& a, const HurstSpaceVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < kIntervalCount; ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const HurstSpaceVector& a) { return std::sqrt(dot(a, a)); }

struct ReferenceVector {
  HurstSpaceVector m{};
  std::size_t n_markets = 0;
  /// Largest componentwise change of m when any single market is left out.
  double leave_one_out_max_delta = 0.0;
  /// Whether that change stays below stability_threshold (reported only).
  bool stable = false;
  double stability_threshold = 0.01;
};

inline ReferenceVector reference_vector(std::span<const HurstVector> hs, double stability_threshold = 0.01) {
  detail::require(hs.size() >= 2, ErrorCode::InvalidArgument, "reference vector needs at least 2 markets");
  for (const auto& h : hs)
    detail::require(h.complete(), ErrorCode::IncompleteVector, "Hurst vector of '" + h.market_id + "' is incomplete");
  ReferenceVector ref;
  ref.n_markets = hs.size();
  ref.stability_threshold = stability_threshold;
  HurstSpaceVector sum{};
  for (const auto& h : hs)
    for (std::size_t i = 0; i < kIntervalCount; ++i) sum[i] += h.h[i];
  const auto n = static_cast<double>(hs.size());
  for (std::size_t i = 0; i < kIntervalCount; ++i) ref.m[i] = sum[i] / n;
  for (const auto& h : hs) {
    for (std::size_t i = 0; i < kIntervalCount; ++i) {
      const double loo = (sum[i] - h.h[i]) / (n - 1.0);
      ref.leave_one_out_max_delta = std::max(ref.leave_one_out_max_delta, std::abs(loo - ref.m[i]));
    }
  }
  ref.stable = ref.leave_one_out_max_delta < stability_threshold;
  return ref;
}

struct UnitVector {
  std::string market_id;
  HurstSpaceVector s{};
};

/// s = (h - m) / |h - m|.
inline UnitVector unit_vector(const HurstVector& h, const HurstSpaceVector& m) {
  detail::require(h.complete(), ErrorCode::IncompleteVector, "Hurst vector of '" + h.market_id + "' is incomplete");
  UnitVector u;
  u.market_id = h.market_id;
  HurstSpaceVector d{};
  for (std::size_t i = 0; i < kIntervalCount; ++i) d[i] = h.h[i] - m[i];
  const double len = norm(d);
  detail::require(len >= 1e-12, ErrorCode::DegenerateVector,
                  "Hurst vector of '" + h.market_id + "' coincides with the reference vector");
  for (std::size_t i = 0; i < kIntervalCount; ++i) u.s[i] = d[i] / len;
  return u;
}

/// H[a][b] = s_a . s_b.
inline std::vector<std::vector<double>> similarity_matrix(std::span<const UnitVector> units) {
  const std::size_t n = units.size();
  std::vector<std::vector<double>> h(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      const double v = std::clamp(dot(units[a].s, units[b].s), -1.0, 1.0);
      h[a][b] = v;
      h[b][a] = v;
    }
  }
  return h;
}

enum class DirectionMode { Canonical, Formula };

inline DirectionMode parse_direction_mode(const std::string& s) {
  if (s == "canonical") return DirectionMode::Canonical;
  if (s == "formula") return DirectionMode::Formula;
  throw Error(ErrorCode::ConfigError, "unknown direction mode '" + s + "'");
}

inline std::string_view to_string(DirectionMode m) { return m == DirectionMode::Canonical ? "canonical" : "formula"; }

/// Published development direction for the 18-market dataset. Not unit
/// norm (|e| ~ 1.44); kept verbatim.
inline constexpr HurstSpaceVector kCanonicalDirection{-0.19, -0.40, -0.37, -0.45, -0.45, -0.57, -0.60, -0.59, -0.56};

struct DevelopmentDirection {
  HurstSpaceVector e{};
  DirectionMode source = DirectionMode::Canonical;
};

/// Formula mode: e = (-1 - m) / |-1 - m|, the direction from the reference
/// point towards the all-(-1) corner of Hurst space.
inline DevelopmentDirection development_direction(const HurstSpaceVector& m, DirectionMode mode) {
  DevelopmentDirection dir;
  dir.source = mode;
  if (mode == DirectionMode::Canonical) {
    dir.e = kCanonicalDirection;
    return dir;
  }
  HurstSpaceVector d{};
  for (std::size_t i = 0; i < kIntervalCount; ++i) d[i] = -1.0 - m[i];
  const double len = norm(d);
  detail::require(len > 0.0, ErrorCode::DegenerateVector, "development direction is undefined for m = -1");
  for (std::size_t i = 0; i < kIntervalCount; ++i) dir.e[i] = d[i] / len;
  return dir;
}

inline double development_index(const UnitVector& s, const DevelopmentDirection& e) { return dot(s.s, e.e); }

struct Classification {
  double pi_max = 0.0;
  double border_developed = 0.0;       // +|Pi|max / 2
  double border_underdeveloped = 0.0;  // -|Pi|max / 2
  double borderline_band = 0.01;
  std::vector<MarketGroup> classes;
  std::vector<bool> borderline;
};

/// Pi > +|Pi|max/2 developed, Pi < -|Pi|max/2 underdeveloped, else emerging.
/// Values within the borderline band of either border are emerging.
inline Classification classify(std::span<const double> indices, double borderline_band = 0.01) {
  detail::require(!indices.empty(), ErrorCode::InvalidArgument, "no development indices to classify");
  Classification c;
  c.borderline_band = borderline_band;
  for (double p : indices) c.pi_max = std::max(c.pi_max, std::abs(p));
  c.border_developed = c.pi_max / 2.0;
  c.border_underdeveloped = -c.pi_max / 2.0;
  for (double p : indices) {
    const bool near = std::abs(p - c.border_developed) <= borderline_band ||
                      std::abs(p - c.border_underdeveloped) <= borderline_band;
    MarketGroup g = MarketGroup::Emerging;
    if (!near) {
      if (p > c.border_developed)
        g = MarketGroup::Developed;
      else if (p < c.border_underdeveloped)
        g = MarketGroup::Underdeveloped;
    }
    c.classes.push_back(g);
    c.borderline.push_back(near);
  }
  return c;
}

struct DevelopmentReport {
  std::vector<std::string> market_ids;
  ReferenceVector computed_reference;
  /// Reference vector actually used for the unit vectors.
  HurstSpaceVector reference{};
  std::vector<UnitVector> units;
  std::vector<std::vector<double>> similarity;
  DevelopmentDirection direction;
  std::vector<double> indices;
  Classification classification;
};

/// Full chain from Hurst vectors. When `reference_override` is given it
/// replaces the computed mean for the unit vectors (the computed mean is
/// still reported).
inline DevelopmentReport development_report(std::span<const HurstVector> hs, DirectionMode mode,
                                            std::optional<HurstSpaceVector> reference_override = std::nullopt) {
  DevelopmentReport rep;
  rep.computed_reference = reference_vector(hs);
  rep.reference = reference_override.value_or(rep.computed_reference.m);
  for (const auto& h : hs) {
    rep.market_ids.push_back(h.market_id);
    rep.units.push_back(unit_vector(h, rep.reference));
  }
  rep.similarity = similarity_matrix(rep.units);
  rep.direction = development_direction(rep.reference, mode);
  for (const auto& u : rep.units) rep.indices.push_back(development_index(u, rep.direction));
  rep.classification = classify(rep.indices);
  return rep;
}

/// Mean off-diagonal similarity between members of `rows` and `cols`
/// (index sets into the matrix; shared indices skip the diagonal).
inline double mean_block_similarity(const std::vector<std::vector<double>>& sim, std::span<const std::size_t> rows,
                                    std::span<const std::size_t> cols) {
  double acc = 0.0;
  std::size_t cnt = 0;
  for (auto a : rows)
    for (auto b : cols) {
      if (a == b) continue;
      acc += sim[a][b];
      ++cnt;
    }
  return cnt ? acc / static_cast<double>(cnt) : 0.0;
}

}  // namespace cyclescan
