#pragma once

// Published per-interval Hurst vectors of 18 stock market indices (two
// decimals, as printed), their printed reference row, and a reader for
// Hurst tables in the same CSV layout.

#include <array>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cyclescan/devindex.hpp"
#include "cyclescan/dma.hpp"
#include "cyclescan/error.hpp"
#include "cyclescan/market.hpp"

namespace cyclescan {

struct HurstTableRow {
  std::string market_id;
  std::optional<MarketGroup> prior_group;
  std::optional<MarketGroup> published_class;
  HurstSpaceVector h{};
};

struct HurstTable {
  std::vector<HurstTableRow> rows;
  /// Row labelled `m_i`, when present.
  std::optional<HurstSpaceVector> printed_reference;

  std::vector<HurstVector> vectors() const {
    std::vector<HurstVector> out;
    for (const auto& r : rows) {
      HurstVector hv;
      hv.market_id = r.market_id;
      hv.h = r.h;
      hv.available.fill(true);
      out.push_back(hv);
    }
    return out;
  }
};

inline constexpr std::string_view kHurstTableHeader = "market_id,prior_group,table5_class,h1,h2,h3,h4,h5,h6,h7,h8,h9";

inline HurstTable parse_hurst_table(std::istream& in) {
  HurstTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != kHurstTableHeader)
        throw Error(ErrorCode::ParseError, "Hurst table header must be '" + std::string(kHurstTableHeader) + "'");
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (line.back() == ',') fields.emplace_back();
    if (fields.size() != 12)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 12 fields");
    HurstSpaceVector h{};
    for (std::size_t i = 0; i < kIntervalCount; ++i) {
      try {
        std::size_t used = 0;
        h[i] = std::stod(fields[3 + i], &used);
        if (used != fields[3 + i].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad value '" + fields[3 + i] + "'");
      }
    }
    if (fields[0] == "m_i") {
      table.printed_reference = h;
      continue;
    }
    HurstTableRow row;
    row.market_id = fields[0];
    if (!fields[1].empty()) row.prior_group = parse_market_group(fields[1]);
    if (!fields[2].empty()) row.published_class = parse_market_group(fields[2]);
    row.h = h;
    table.rows.push_back(row);
  }
  if (table.rows.empty()) throw Error(ErrorCode::EmptySeries, "Hurst table has no market rows");
  return table;
}

inline HurstTable load_hurst_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  return parse_hurst_table(in);
}

/// Same content as data/table4_hurst.csv.
inline constexpr std::string_view kTable4Csv =
    "market_id,prior_group,table5_class,h1,h2,h3,h4,h5,h6,h7,h8,h9\n"
    "BELEXline,underdeveloped,underdeveloped,0.36,0.62,0.59,0.67,0.71,1.01,0.90,0.68,0.59\n"
    "SASX10,underdeveloped,underdeveloped,0.38,0.48,0.47,0.60,0.63,0.89,1.01,0.90,0.80\n"
    "BIRS,underdeveloped,underdeveloped,0.37,0.54,0.56,0.54,0.57,0.77,1.02,0.78,0.76\n"
    "TEPIX,underdeveloped,underdeveloped,0.38,0.63,0.61,0.72,0.71,0.62,0.59,0.69,0.92\n"
    "MONEX20,underdeveloped,underdeveloped,0.37,0.53,0.50,0.56,0.51,0.54,0.70,0.81,0.93\n"
    "EGX30,underdeveloped,emerging,0.38,0.58,0.52,0.49,0.73,0.85,0.77,0.72,0.43\n"
    "BOVESPA,emerging,emerging,0.37,0.46,0.39,0.49,0.57,0.72,0.71,0.71,0.69\n"
    "JSE,emerging,emerging,0.38,0.51,0.51,0.55,0.36,0.48,0.93,0.98,0.72\n"
    "SSE,emerging,emerging,0.34,0.53,0.51,0.55,0.57,0.58,0.44,0.60,0.73\n"
    "CROBEX,emerging,emerging,0.36,0.48,0.50,0.57,0.61,0.65,0.52,0.50,0.58\n"
    "XU100,emerging,emerging,0.37,0.52,0.47,0.57,0.49,0.56,0.56,0.70,0.55\n"
    "BUX,emerging,developed,0.37,0.46,0.44,0.47,0.45,0.50,0.56,0.64,0.47\n"
    "FTSE100,developed,developed,0.38,0.50,0.44,0.53,0.47,0.49,0.34,0.29,0.22\n"
    "CAC40,developed,developed,0.37,0.47,0.42,0.44,0.47,0.53,0.43,0.48,0.68\n"
    "NIKKEI225,developed,developed,0.36,0.47,0.43,0.49,0.53,0.58,0.46,0.50,0.56\n"
    "NYSE,developed,developed,0.39,0.53,0.47,0.49,0.45,0.53,0.50,0.51,0.57\n"
    "DAX,developed,developed,0.36,0.49,0.44,0.45,0.47,0.55,0.58,0.59,0.56\n"
    "SP500,developed,developed,0.38,0.50,0.47,0.49,0.47,0.53,0.52,0.55,0.52\n"
    "m_i,,,0.37,0.51,0.49,0.54,0.54,0.62,0.64,0.63,0.61\n";

inline HurstTable table4_fixture() {
  std::istringstream in{std::string(kTable4Csv)};
  return parse_hurst_table(in);
}

}  // namespace cyclescan
