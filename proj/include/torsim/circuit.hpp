#pragma once

#include <array>
#include <cstdint>

#include "torsim/netmodel.hpp"
#include "torsim/strategy_kind.hpp"

namespace torsim {

// One built (or failed) three-hop circuit and its evaluation metrics.
struct Circuit {
  std::uint32_t guard_id = 0;
  std::uint32_t middle_id = 0;
  std::uint32_t exit_id = 0;
  StrategyKind strategy = StrategyKind::Random;
  double bandwidth_kbps = 0.0;  // min over member capacities
  double latency_ms = 0.0;      // region path cost guard->middle->exit
  double efficiency = 0.0;      // bandwidth/(latency+1)
  // Member congestion sampled at selection time, order guard/middle/exit.
  std::array<double, 3> congestion{0.0, 0.0, 0.0};
  // Deterministic selection effort: candidate draws spent on this circuit,
  // retries included. Stands in for wall-clock so runs stay reproducible.
  std::uint64_t build_time_us = 0;
  bool success = false;
};

// min(g, m, e); throws std::invalid_argument on nonpositive input.
double bottleneck_bandwidth(double guard_kbps, double middle_kbps, double exit_kbps);

// d(g,m) + d(m,e) over the region table.
double circuit_latency(const LatencyMatrix& m, RegionId guard, RegionId middle,
                       RegionId exit);

// bandwidth/(latency+1); throws std::invalid_argument unless
// bandwidth > 0 and latency >= 0.
double circuit_efficiency(double bandwidth_kbps, double latency_ms);

// Pairwise distinct relay ids, AS numbers and /16 prefixes.
bool passes_diversity(const NetworkTopology& topo, std::uint32_t guard_id,
                      std::uint32_t middle_id, std::uint32_t exit_id);

}  // namespace torsim
