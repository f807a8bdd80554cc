#pragma once

// Daily closure-price CSV ingestion and log returns.
//
// Input format: UTF-8, header `date,close`, ISO dates, decimal prices.
// Missing trading days are not imputed; the series is contiguous in
// trading-day index.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cyclescan/error.hpp"

namespace cyclescan {

using Date = std::chrono::year_month_day;

struct PriceSeries {
  std::string market_id;
  std::vector<Date> dates;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
};

struct ReturnSeries {
  std::string market_id;
  std::vector<double> values;
  int lag = 1;

  std::size_t size() const noexcept { return values.size(); }
};

inline std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

inline bool parse_iso_date(std::string_view s, Date& out) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  int y = 0, m = 0, d = 0;
  if (!parse_int(s.substr(0, 4), y) || !parse_int(s.substr(5, 2), m) || !parse_int(s.substr(8, 2), d))
    return false;
  out = Date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
             std::chrono::day{static_cast<unsigned>(d)}};
  return out.ok();
}

inline bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace detail

/// Parses price rows from a stream. Rows may arrive in any date order;
/// the result is sorted ascending. A repeated date is a ParseError.
inline PriceSeries parse_prices(std::istream& in, std::string market_id) {
  PriceSeries out;
  out.market_id = std::move(market_id);

  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<std::pair<Date, double>> rows;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = detail::trim(line);
    if (line_no == 1 && view.size() >= 3 && static_cast<unsigned char>(view[0]) == 0xEF)
      view.remove_prefix(3);  // BOM
    if (view.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (view == "date,close") continue;
      throw Error(ErrorCode::ParseError, "line 1: expected header 'date,close'");
    }
    const auto comma = view.find(',');
    if (comma == std::string_view::npos || view.find(',', comma + 1) != std::string_view::npos)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected two fields");
    const auto date_text = detail::trim(view.substr(0, comma));
    const auto close_text = detail::trim(view.substr(comma + 1));

    Date date;
    if (!detail::parse_iso_date(date_text, date))
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": bad date '" + std::string(date_text) + "'");
    double close = 0.0;
    if (!detail::parse_double(close_text, close) || !std::isfinite(close))
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": bad price '" + std::string(close_text) + "'");
    if (close <= 0.0)
      throw Error(ErrorCode::NonPositivePrice,
                  "line " + std::to_string(line_no) + ": price " + std::string(close_text));
    rows.emplace_back(date, close);
  }

  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].first == rows[i - 1].first)
      throw Error(ErrorCode::ParseError, "duplicate date " + format_date(rows[i].first));
  }
  if (rows.size() < 2)
    throw Error(ErrorCode::EmptySeries, "fewer than 2 valid rows in '" + out.market_id + "'");

  out.dates.reserve(rows.size());
  out.values.reserve(rows.size());
  for (const auto& [d, v] : rows) {
    out.dates.push_back(d);
    out.values.push_back(v);
  }
  return out;
}

inline PriceSeries load_prices(const std::string& path, std::string market_id) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  return parse_prices(in, std::move(market_id));
}

/// R(t) = ln(S(t + lag) / S(t)).
inline ReturnSeries log_returns(const PriceSeries& prices, int lag = 1) {
  detail::require(lag >= 1, ErrorCode::InvalidArgument, "lag must be >= 1");
  detail::require(prices.size() > static_cast<std::size_t>(lag), ErrorCode::SeriesTooShort,
                  "series of length " + std::to_string(prices.size()) + " is too short for lag " +
                      std::to_string(lag));
  ReturnSeries out;
  out.market_id = prices.market_id;
  out.lag = lag;
  const auto n = prices.size() - static_cast<std::size_t>(lag);
  out.values.resize(n);
  for (std::size_t t = 0; t < n; ++t)
    out.values[t] = std::log(prices.values[t + lag] / prices.values[t]);
  return out;
}

inline void write_prices_csv(std::ostream& os, const PriceSeries& prices) {
  os << "date,close\n";
  char buf[64];
  for (std::size_t i = 0; i < prices.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", prices.values[i]);
    os << format_date(prices.dates[i]) << ',' << buf << '\n';
  }
}

}  // namespace cyclescan
