#pragma once

#include <array>
#include <string>
#include <string_view>

#include "cyclescan/error.hpp"

namespace cyclescan {

enum class MarketGroup { Underdeveloped, Emerging, Developed };

inline constexpr std::array<MarketGroup, 3> kMarketGroups{MarketGroup::Underdeveloped, MarketGroup::Emerging,
                                                          MarketGroup::Developed};

inline std::string_view to_string(MarketGroup g) {
  switch (g) {
    case MarketGroup::Underdeveloped: return "underdeveloped";
    case MarketGroup::Emerging: return "emerging";
    case MarketGroup::Developed: return "developed";
  }
  return "unknown";
}

inline MarketGroup parse_market_group(std::string_view s) {
  if (s == "underdeveloped") return MarketGroup::Underdeveloped;
  if (s == "emerging") return MarketGroup::Emerging;
  if (s == "developed") return MarketGroup::Developed;
  throw Error(ErrorCode::ConfigError, "unknown market group '" + std::string(s) + "'");
}

}  // namespace cyclescan
