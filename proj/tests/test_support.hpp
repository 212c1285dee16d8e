#pragma once

#include <cstdint>
#include <vector>

#include "torsim/netmodel.hpp"

namespace torsim::test {

// Compact relay description for hand-built topologies.
struct RelayDef {
  Role role = Role::Middle;
  double bandwidth = 100.0;
  RegionId region = RegionId::NorthAmerica;
  std::uint32_t as_number = 0;  // 0 = unique (100 + index)
  std::uint32_t prefix16 = 0;   // 0 = unique (0x0A00 + index)
  double congestion = 0.1;
  double uptime_hours = 720.0;
  std::vector<std::uint16_t> ports{80, 443};  // applied to exits only
};

inline NetworkTopology make_topology(const std::vector<RelayDef>& defs,
                                     std::uint64_t seed = 0) {
  NetworkTopology topo;
  topo.seed = seed;
  topo.latency = LatencyMatrix::defaults();
  std::uint32_t id = 0;
  for (const auto& d : defs) {
    Relay r;
    r.id = id;
    r.role = d.role;
    r.bandwidth_kbps = d.bandwidth;
    r.region = d.region;
    r.uptime_hours = d.uptime_hours;
    r.stability = d.uptime_hours / (d.uptime_hours + 720.0);
    r.congestion = d.congestion;
    r.as_number = d.as_number ? d.as_number : 100 + id;
    const std::uint32_t prefix = d.prefix16 ? d.prefix16 : 0x0A00u + id;
    r.ipv4 = (prefix << 16) | (id & 0xFFFFu);
    if (d.role == Role::Exit) r.exit_ports = d.ports;
    topo.role_ids[static_cast<int>(d.role)].push_back(id);
    topo.relays.push_back(std::move(r));
    ++id;
  }
  return topo;
}

}  // namespace torsim::test
