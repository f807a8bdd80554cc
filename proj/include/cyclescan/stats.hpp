#pragma once

// Small-sample group statistics: Shapiro-Wilk normality, one-way ANOVA with
// Bonferroni post-hoc, Kruskal-Wallis and Mann-Whitney.

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "cyclescan/error.hpp"

namespace cyclescan::stats {

using Sample = std::vector<double>;

inline double mean(std::span<const double> x) {
  return x.empty() ? 0.0 : std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

inline double normal_quantile(double p) { return boost::math::quantile(boost::math::normal(), p); }
inline double normal_upper_tail(double z) { return boost::math::cdf(boost::math::complement(boost::math::normal(), z)); }
inline double chi2_upper_tail(double x, double dof) {
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), x));
}

// ---------------------------------------------------------------------------
// Shapiro-Wilk (Royston 1995, algorithm AS R94)

struct ShapiroWilkResult {
  double w = 0.0;
  double p = 0.0;
};

namespace detail {

inline double poly(std::span<const double> c, double x) {
  double r = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) r = r * x + c[i];
  return r;
}

}  // namespace detail

/// Coefficients a_1..a_{n/2} for the lower half of the ordered sample
/// (applied with a negative sign to the lower order statistics).
inline std::vector<double> shapiro_wilk_coefficients(std::size_t n) {
  const std::size_t half = n / 2;
  std::vector<double> a(half);
  if (n == 3) {
    a[0] = std::sqrt(0.5);
    return a;
  }
  static constexpr double c1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
  static constexpr double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
  const double an = static_cast<double>(n);
  std::vector<double> m(half);
  double summ2 = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    m[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
    summ2 += m[i] * m[i];
  }
  summ2 *= 2.0;
  const double ssumm2 = std::sqrt(summ2);
  const double rsn = 1.0 / std::sqrt(an);
  const double a1 = detail::poly(c1, rsn) - m[0] / ssumm2;

  std::size_t first;
  double fac;
  if (n > 5) {
    const double a2 = -m[1] / ssumm2 + detail::poly(c2, rsn);
    fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
    a[1] = a2;
    first = 2;
  } else {
    fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
    first = 1;
  }
  a[0] = a1;
  for (std::size_t i = first; i < half; ++i) a[i] = -m[i] / fac;
  return a;
}

inline ShapiroWilkResult shapiro_wilk(std::span<const double> sample) {
  const std::size_t n = sample.size();
  cyclescan::detail::require(n >= 3, ErrorCode::SampleTooSmall,
                             "Shapiro-Wilk needs n >= 3, got " + std::to_string(n));
  cyclescan::detail::require(n <= 5000, ErrorCode::InvalidArgument, "Shapiro-Wilk supports n <= 5000");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double range = x.back() - x.front();
  cyclescan::detail::require(range > 1e-19 * std::max(1.0, std::abs(x.front())), ErrorCode::InvalidArgument,
                             "Shapiro-Wilk is undefined for a constant sample");

  const auto a = shapiro_wilk_coefficients(n);
  const double xbar = mean(x);
  double num = 0.0, ssq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) num += a[i] * (x[n - 1 - i] - x[i]);
  for (double v : x) ssq += (v - xbar) * (v - xbar);
  ShapiroWilkResult res;
  res.w = std::min(1.0, num * num / ssq);

  const double an = static_cast<double>(n);
  if (n == 3) {
    constexpr double pi6 = 1.90985931710274;  // 6 / pi
    constexpr double stqr = 1.04719755119660;  // pi / 3
    res.p = std::clamp(pi6 * (std::asin(std::sqrt(res.w)) - stqr), 0.0, 1.0);
    return res;
  }
  static constexpr double g[] = {-2.273, 0.459};
  static constexpr double c3[] = {0.544, -0.39978, 0.025054, -6.714e-4};
  static constexpr double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
  static constexpr double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
  static constexpr double c6[] = {-0.4803, -0.082676, 0.0030302};

  const double w1 = 1.0 - res.w;
  if (w1 <= 0.0) {
    res.p = 1.0;
    return res;
  }
  double y = std::log(w1);
  double mu, sigma;
  if (n <= 11) {
    const double gamma = detail::poly(g, an);
    if (y >= gamma) {
      res.p = 1e-99;
      return res;
    }
    y = -std::log(gamma - y);
    mu = detail::poly(c3, an);
    sigma = std::exp(detail::poly(c4, an));
  } else {
    const double xx = std::log(an);
    mu = detail::poly(c5, xx);
    sigma = std::exp(detail::poly(c6, xx));
  }
  res.p = normal_upper_tail((y - mu) / sigma);
  return res;
}

// ---------------------------------------------------------------------------
// One-way ANOVA and Bonferroni post-hoc

struct AnovaResult {
  double f = 0.0;
  double df_between = 0.0;
  double df_within = 0.0;
  double p = 1.0;
  /// Zero within-group variance everywhere and equal means: F := 0.
  bool degenerate = false;
  /// Zero within-group variance with differing means: F = inf, p = 0.
  bool exact_separation = false;
};

namespace detail {

inline void require_groups(std::span<const Sample> groups, std::size_t min_size, const char* what) {
  cyclescan::detail::require(groups.size() >= 2, ErrorCode::SampleTooSmall, std::string(what) + " needs >= 2 groups");
  for (const auto& g : groups)
    cyclescan::detail::require(g.size() >= min_size, ErrorCode::SampleTooSmall,
                               std::string(what) + " needs groups of size >= " + std::to_string(min_size));
}

struct Decomposition {
  double ss_between = 0.0;
  double ss_within = 0.0;
  std::size_t total = 0;
};

inline Decomposition decompose(std::span<const Sample> groups) {
  Decomposition d;
  double grand = 0.0;
  for (const auto& g : groups) {
    grand += std::accumulate(g.begin(), g.end(), 0.0);
    d.total += g.size();
  }
  grand /= static_cast<double>(d.total);
  for (const auto& g : groups) {
    const double m = mean(g);
    d.ss_between += static_cast<double>(g.size()) * (m - grand) * (m - grand);
    for (double v : g) d.ss_within += (v - m) * (v - m);
  }
  return d;
}

// Relative tolerance for treating a sum of squares as zero.
inline bool negligible(double ss, std::span<const Sample> groups) {
  double scale = 0.0;
  for (const auto& g : groups)
    for (double v : g) scale = std::max(scale, std::abs(v));
  return ss <= 1e-24 * std::max(1.0, scale * scale);
}

}  // namespace detail

inline AnovaResult anova_oneway(std::span<const Sample> groups) {
  detail::require_groups(groups, 2, "ANOVA");
  const auto d = detail::decompose(groups);
  AnovaResult res;
  const auto k = static_cast<double>(groups.size());
  res.df_between = k - 1.0;
  res.df_within = static_cast<double>(d.total) - k;
  if (detail::negligible(d.ss_within, groups)) {
    if (detail::negligible(d.ss_between, groups)) {
      res.degenerate = true;
      res.f = 0.0;
      res.p = 1.0;
    } else {
      res.exact_separation = true;
      res.f = std::numeric_limits<double>::infinity();
      res.p = 0.0;
    }
    return res;
  }
  res.f = (d.ss_between / res.df_between) / (d.ss_within / res.df_within);
  boost::math::fisher_f dist(res.df_between, res.df_within);
  res.p = boost::math::cdf(boost::math::complement(dist, res.f));
  return res;
}

struct PairwiseResult {
  std::size_t first = 0;
  std::size_t second = 0;
  double statistic = 0.0;
  double p_raw = 1.0;
  double p_adjusted = 1.0;
  bool significant = false;
};

/// Pairwise t tests on the pooled within-group variance (df = N - k);
/// p multiplied by the number of pairs, capped at 1.
inline std::vector<PairwiseResult> bonferroni_pairwise(std::span<const Sample> groups, double alpha = 0.05) {
  detail::require_groups(groups, 2, "Bonferroni");
  const auto d = detail::decompose(groups);
  const double df = static_cast<double>(d.total - groups.size());
  const double mse = d.ss_within / df;
  const bool zero_var = detail::negligible(d.ss_within, groups);
  const double pairs = static_cast<double>(groups.size() * (groups.size() - 1) / 2);
  std::vector<PairwiseResult> out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      PairwiseResult r;
      r.first = i;
      r.second = j;
      const double diff = mean(groups[i]) - mean(groups[j]);
      if (zero_var) {
        const bool same = std::abs(diff) <= 1e-12 * std::max({1.0, std::abs(mean(groups[i])), std::abs(mean(groups[j]))});
        r.statistic = same ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
        r.p_raw = same ? 1.0 : 0.0;
      } else {
        const double se = std::sqrt(mse * (1.0 / static_cast<double>(groups[i].size()) +
                                           1.0 / static_cast<double>(groups[j].size())));
        r.statistic = diff / se;
        boost::math::students_t t(df);
        r.p_raw = 2.0 * boost::math::cdf(boost::math::complement(t, std::abs(r.statistic)));
      }
      r.p_adjusted = std::min(1.0, r.p_raw * pairs);
      r.significant = r.p_adjusted < alpha;
      out.push_back(r);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rank tests

/// Midranks (1-based) of the pooled values, plus the tie term sum(t^3 - t).
struct Ranking {
  std::vector<double> ranks;
  double tie_term = 0.0;
  bool has_ties = false;
};

inline Ranking midranks(std::span<const double> pooled) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
  Ranking r;
  r.ranks.resize(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r.ranks[order[k]] = rank;
    const auto t = static_cast<double>(j - i + 1);
    if (t > 1.0) {
      r.tie_term += t * t * t - t;
      r.has_ties = true;
    }
    i = j + 1;
  }
  return r;
}

struct KruskalWallisResult {
  double h = 0.0;
  double df = 0.0;
  double p = 1.0;
};

inline KruskalWallisResult kruskal_wallis(std::span<const Sample> groups) {
  detail::require_groups(groups, 1, "Kruskal-Wallis");
  std::vector<double> pooled;
  for (const auto& g : groups) pooled.insert(pooled.end(), g.begin(), g.end());
  const auto n = static_cast<double>(pooled.size());
  const auto rk = midranks(pooled);
  KruskalWallisResult res;
  res.df = static_cast<double>(groups.size()) - 1.0;
  const double correction = 1.0 - rk.tie_term / (n * n * n - n);
  if (correction <= 0.0) return res;  // every value tied

  double acc = 0.0;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    double rsum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) rsum += rk.ranks[offset + i];
    acc += rsum * rsum / static_cast<double>(g.size());
    offset += g.size();
  }
  res.h = std::max(0.0, (12.0 / (n * (n + 1.0)) * acc - 3.0 * (n + 1.0)) / correction);
  res.p = chi2_upper_tail(res.h, res.df);
  return res;
}

/// Null distribution of U for sample sizes (n, m) without ties:
/// counts[u] = number of rank splits giving U = u, u in [0, n*m].
inline std::vector<double> mann_whitney_null_counts(std::size_t n, std::size_t m) {
  // f(i, j, u) = f(i-1, j, u-j) + f(i, j-1, u)
  std::vector<std::vector<std::vector<double>>> f(
      n + 1, std::vector<std::vector<double>>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= m; ++j) {
      f[i][j].assign(i * j + 1, 0.0);
      if (i == 0 || j == 0) {
        f[i][j][0] = 1.0;
        continue;
      }
      for (std::size_t u = 0; u <= i * j; ++u) {
        double v = 0.0;
        if (u >= j && u - j < f[i - 1][j].size()) v += f[i - 1][j][u - j];
        if (u < f[i][j - 1].size()) v += f[i][j - 1][u];
        f[i][j][u] = v;
      }
    }
  }
  return f[n][m];
}

struct MannWhitneyResult {
  /// U of the first sample: number of (x, y) pairs with x > y, ties count 1/2.
  double u = 0.0;
  double p = 1.0;
  bool exact = false;
};

/// Two-sided. Exact null distribution when min(n, m) <= 8 and there are no
/// ties; otherwise normal approximation with tie and continuity corrections.
inline MannWhitneyResult mann_whitney(std::span<const double> x, std::span<const double> y) {
  cyclescan::detail::require(!x.empty() && !y.empty(), ErrorCode::SampleTooSmall, "Mann-Whitney needs non-empty samples");
  const std::size_t n = x.size(), m = y.size();
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  const auto rk = midranks(pooled);
  double rx = 0.0;
  for (std::size_t i = 0; i < n; ++i) rx += rk.ranks[i];
  MannWhitneyResult res;
  const double nm = static_cast<double>(n * m);
  res.u = rx - static_cast<double>(n * (n + 1)) / 2.0;
  const double u_small = std::min(res.u, nm - res.u);

  if (!rk.has_ties && std::min(n, m) <= 8) {
    const auto counts = mann_whitney_null_counts(n, m);
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    double tail = 0.0;
    for (std::size_t u = 0; u < counts.size() && static_cast<double>(u) <= u_small + 1e-9; ++u) tail += counts[u];
    res.p = std::min(1.0, 2.0 * tail / total);
    res.exact = true;
    return res;
  }
  const double big_n = static_cast<double>(n + m);
  const double var = nm / 12.0 * ((big_n + 1.0) - rk.tie_term / (big_n * (big_n - 1.0)));
  if (var <= 0.0) return res;
  const double z = std::max(0.0, std::abs(res.u - nm / 2.0) - 0.5) / std::sqrt(var);
  res.p = std::min(1.0, 2.0 * normal_upper_tail(z));
  return res;
}

}  // namespace cyclescan::stats
