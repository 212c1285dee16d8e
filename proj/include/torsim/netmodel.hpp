#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace torsim {

enum class Role : int { Guard = 0, Middle = 1, Exit = 2 };

// Enumeration order is the tie-break order used by region scans.
enum class RegionId : int { NorthAmerica = 0, Europe = 1, Asia = 2, RestOfWorld = 3 };

inline constexpr int kRegionCount = 4;

const char* to_string(Role r);
const char* to_string(RegionId r);
Role role_from_string(const std::string& s);
RegionId region_from_string(const std::string& s);

struct Relay {
  std::uint32_t id = 0;
  Role role = Role::Middle;
  double bandwidth_kbps = 0.0;  // advertised capacity, > 0
  RegionId region = RegionId::NorthAmerica;
  double uptime_hours = 0.0;
  double stability = 0.0;   // uptime/(uptime+pivot), in [0,1)
  double congestion = 0.0;  // c(r) in [0,1]
  std::uint32_t as_number = 0;
  std::uint32_t ipv4 = 0;  // /16 prefix is the upper 16 bits
  std::vector<std::uint16_t> exit_ports;  // empty unless role == Exit

  std::uint16_t subnet16() const { return static_cast<std::uint16_t>(ipv4 >> 16); }
  bool permits_port(std::uint16_t port) const;
};

// Symmetric inter-region RTT table in milliseconds.
class LatencyMatrix {
 public:
  static LatencyMatrix defaults();

  double at(RegionId a, RegionId b) const {
    return cells_[static_cast<int>(a)][static_cast<int>(b)];
  }
  void set(RegionId a, RegionId b, double ms);

  // Checks symmetry and positivity; throws std::invalid_argument otherwise.
  void validate() const;

  // Minimum over all (g,m,e) region triples of at(g,m)+at(m,e).
  double min_triple_cost() const;

 private:
  std::array<std::array<double, kRegionCount>, kRegionCount> cells_{};
};

struct LognormalSpec {
  double median_kbps = 0.0;
  double sigma_ln = 0.0;
};

struct CongestionParams {
  // Mean load m = clamp(base + slope * load_factor / 100, mean_min, mean_max);
  // c ~ Beta(concentration*m, concentration*(1-m)).
  double base = 0.15;
  double load_slope = 0.5;
  double mean_min = 0.05;
  double mean_max = 0.85;
  double concentration = 10.0;
  double exclude_threshold = 0.70;  // congestion-aware cutoff: c >= threshold
};

struct ModelParams {
  // Bandwidth capacity distributions per role, indexed by Role.
  // Medians and spreads are calibrated so that bandwidth-weighted random
  // triples bottleneck near 0.45 MB/s and congestion-aware triples near
  // 0.63 MB/s, matching the evaluation targets.
  std::array<LognormalSpec, 3> bandwidth{{{1000.0, 0.48}, {320.0, 0.54}, {900.0, 0.51}}};
  std::array<double, 3> uptime_mean_hours{720.0, 360.0, 480.0};
  double stability_pivot_hours = 720.0;
  std::array<double, kRegionCount> region_probs{0.30, 0.40, 0.20, 0.10};
  LatencyMatrix latency = LatencyMatrix::defaults();
  CongestionParams congestion;
  int retry_budget = 50;      // diversity resample attempts per circuit
  int epoch_circuits = 500;   // congestion refresh interval within a cell
  int as_pool_divisor = 10;   // AS pool size = max(1, n/10)
  int subnet_pool_divisor = 8;  // /16 pool size = max(1, n/8)
  double guard_fraction = 0.15;
  double exit_fraction = 0.15;
  int guard_set_size = 3;
  double guard_bandwidth_weight = 0.5;  // composite guard score weight
  std::uint16_t target_port = 443;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct NetworkTopology {
  std::uint64_t seed = 0;
  std::vector<Relay> relays;  // ids dense in [0, n)
  LatencyMatrix latency;
  // Relay ids per role, ascending; avoids rescans in selection hot paths.
  std::array<std::vector<std::uint32_t>, 3> role_ids;

  std::size_t n_relays() const { return relays.size(); }
  const Relay& relay(std::uint32_t id) const { return relays[id]; }
  const std::vector<std::uint32_t>& ids_with_role(Role r) const {
    return role_ids[static_cast<int>(r)];
  }
};

// Builds a synthetic relay population:
//   guards = llround(guard_fraction*n), exits = llround(exit_fraction*n),
//   middles = remainder; bandwidth log-normal per role; regions i.i.d. from
//   region_probs; uptime exponential per role; AS and /16 assignments from
//   pools sized by the divisors; congestion initialised at the idle-load
//   Beta. Deterministic for a given (n, seed, params). Requires n >= 10.
NetworkTopology generate_topology(std::size_t n_relays, std::uint64_t seed,
                                  const ModelParams& params);

// Resamples every relay's congestion from the load-dependent Beta model.
// Deterministic given (topology.seed, seed_step); relay order is id order.
// load_factor is clamped to a tiny positive value at zero.
void update_congestion(NetworkTopology& topo, double load_factor,
                       std::uint64_t seed_step, const ModelParams& params);

double region_latency(const LatencyMatrix& m, RegionId a, RegionId b);

// Full-precision round trips for audit tooling.
std::string topology_to_json(const NetworkTopology& topo);
NetworkTopology topology_from_json(const std::string& text);

std::string ipv4_to_string(std::uint32_t ip);

}  // namespace torsim
