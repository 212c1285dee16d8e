#include "torsim/circuit.hpp"

#include <algorithm>
#include <stdexcept>

namespace torsim {

const char* to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::Random: return "random";
    case StrategyKind::Guard: return "guard";
    case StrategyKind::CongestionAware: return "congestion_aware";
    case StrategyKind::GeoLatency: return "geo_latency";
    case StrategyKind::GeoDiversity: return "geo_diversity";
  }
  return "?";
}

StrategyKind strategy_from_string(const std::string& s) {
  for (StrategyKind k : all_strategies())
    if (s == to_string(k)) return k;
  throw std::invalid_argument("unknown strategy: " + s);
}

const std::array<StrategyKind, kStrategyCount>& all_strategies() {
  static const std::array<StrategyKind, kStrategyCount> kAll = {
      StrategyKind::Random, StrategyKind::Guard, StrategyKind::CongestionAware,
      StrategyKind::GeoLatency, StrategyKind::GeoDiversity};
  return kAll;
}

double bottleneck_bandwidth(double guard_kbps, double middle_kbps, double exit_kbps) {
  if (!(guard_kbps > 0.0) || !(middle_kbps > 0.0) || !(exit_kbps > 0.0))
    throw std::invalid_argument("bottleneck_bandwidth: capacities must be > 0");
  return std::min({guard_kbps, middle_kbps, exit_kbps});
}

double circuit_latency(const LatencyMatrix& m, RegionId guard, RegionId middle,
                       RegionId exit) {
  return m.at(guard, middle) + m.at(middle, exit);
}

double circuit_efficiency(double bandwidth_kbps, double latency_ms) {
  if (!(bandwidth_kbps > 0.0))
    throw std::invalid_argument("circuit_efficiency: bandwidth must be > 0");
  if (latency_ms < 0.0)
    throw std::invalid_argument("circuit_efficiency: latency must be >= 0");
  return bandwidth_kbps / (latency_ms + 1.0);
}

bool passes_diversity(const NetworkTopology& topo, std::uint32_t guard_id,
                      std::uint32_t middle_id, std::uint32_t exit_id) {
  const Relay& g = topo.relay(guard_id);
  const Relay& m = topo.relay(middle_id);
  const Relay& e = topo.relay(exit_id);
  auto distinct = [](const Relay& a, const Relay& b) {
    return a.id != b.id && a.as_number != b.as_number && a.subnet16() != b.subnet16();
  };
  return distinct(g, m) && distinct(g, e) && distinct(m, e);
}

}  // namespace torsim
