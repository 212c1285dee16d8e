#pragma once

#include <array>
#include <string>

namespace torsim {

enum class StrategyKind : int {
  Random = 0,
  Guard = 1,
  CongestionAware = 2,
  GeoLatency = 3,
  GeoDiversity = 4,
};

inline constexpr int kStrategyCount = 5;

// Stable names; used in CLI flags, file formats and ranking tie-breaks.
const char* to_string(StrategyKind k);
StrategyKind strategy_from_string(const std::string& s);
const std::array<StrategyKind, kStrategyCount>& all_strategies();

}  // namespace torsim
