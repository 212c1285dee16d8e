#include "torsim/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"
#include "torsim/rng.hpp"

namespace torsim {

namespace {

using nlohmann::json;

constexpr std::uint64_t kCongestionStreamTag = 0x636F6E6765737400ull;

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

const char* to_string(Role r) {
  switch (r) {
    case Role::Guard: return "guard";
    case Role::Middle: return "middle";
    case Role::Exit: return "exit";
  }
  return "?";
}

const char* to_string(RegionId r) {
  switch (r) {
    case RegionId::NorthAmerica: return "north_america";
    case RegionId::Europe: return "europe";
    case RegionId::Asia: return "asia";
    case RegionId::RestOfWorld: return "rest_of_world";
  }
  return "?";
}

Role role_from_string(const std::string& s) {
  if (s == "guard") return Role::Guard;
  if (s == "middle") return Role::Middle;
  if (s == "exit") return Role::Exit;
  throw std::invalid_argument("unknown role: " + s);
}

RegionId region_from_string(const std::string& s) {
  if (s == "north_america") return RegionId::NorthAmerica;
  if (s == "europe") return RegionId::Europe;
  if (s == "asia") return RegionId::Asia;
  if (s == "rest_of_world") return RegionId::RestOfWorld;
  throw std::invalid_argument("unknown region: " + s);
}

bool Relay::permits_port(std::uint16_t port) const {
  return std::find(exit_ports.begin(), exit_ports.end(), port) != exit_ports.end();
}

LatencyMatrix LatencyMatrix::defaults() {
  using R = RegionId;
  LatencyMatrix m;
  for (int i = 0; i < kRegionCount; ++i)
    m.cells_[i][i] = 20.0;
  m.set(R::NorthAmerica, R::Europe, 45.0);
  m.set(R::NorthAmerica, R::Asia, 80.0);
  m.set(R::NorthAmerica, R::RestOfWorld, 70.0);
  m.set(R::Europe, R::Asia, 90.0);
  m.set(R::Europe, R::RestOfWorld, 60.0);
  m.set(R::Asia, R::RestOfWorld, 75.0);
  return m;
}

void LatencyMatrix::set(RegionId a, RegionId b, double ms) {
  cells_[static_cast<int>(a)][static_cast<int>(b)] = ms;
  cells_[static_cast<int>(b)][static_cast<int>(a)] = ms;
}

void LatencyMatrix::validate() const {
  for (int i = 0; i < kRegionCount; ++i) {
    for (int j = 0; j < kRegionCount; ++j) {
      require(cells_[i][j] > 0.0, "latency matrix entries must be > 0");
      require(cells_[i][j] == cells_[j][i], "latency matrix must be symmetric");
    }
  }
}

double LatencyMatrix::min_triple_cost() const {
  double best = cells_[0][0] * 2.0;
  for (int g = 0; g < kRegionCount; ++g)
    for (int m = 0; m < kRegionCount; ++m)
      for (int e = 0; e < kRegionCount; ++e)
        best = std::min(best, cells_[g][m] + cells_[m][e]);
  return best;
}

void ModelParams::validate() const {
  for (const auto& b : bandwidth) {
    require(b.median_kbps > 0.0, "bandwidth median_kbps must be > 0");
    require(b.sigma_ln > 0.0, "bandwidth sigma_ln must be > 0");
  }
  for (double u : uptime_mean_hours)
    require(u > 0.0, "uptime_mean_hours must be > 0");
  require(stability_pivot_hours > 0.0, "stability_pivot_hours must be > 0");
  double psum = 0.0;
  for (double p : region_probs) {
    require(p >= 0.0, "region_probs must be >= 0");
    psum += p;
  }
  require(std::abs(psum - 1.0) <= 1e-9, "region_probs must sum to 1");
  latency.validate();
  require(congestion.concentration > 0.0, "congestion.concentration must be > 0");
  require(congestion.mean_min >= 0.0 && congestion.mean_min <= congestion.mean_max &&
              congestion.mean_max <= 1.0,
          "congestion mean bounds must satisfy 0 <= min <= max <= 1");
  require(congestion.exclude_threshold > 0.0 && congestion.exclude_threshold <= 1.0,
          "congestion.exclude_threshold must be in (0,1]");
  require(retry_budget >= 1, "retry_budget must be >= 1");
  require(epoch_circuits >= 1, "epoch_circuits must be >= 1");
  require(as_pool_divisor >= 1, "as_pool_divisor must be >= 1");
  require(subnet_pool_divisor >= 1, "subnet_pool_divisor must be >= 1");
  require(guard_fraction > 0.0 && exit_fraction > 0.0 &&
              guard_fraction + exit_fraction < 1.0,
          "role fractions must be positive and sum below 1");
  require(guard_set_size >= 1, "guard_set_size must be >= 1");
  require(guard_bandwidth_weight >= 0.0 && guard_bandwidth_weight <= 1.0,
          "guard_bandwidth_weight must be in [0,1]");
  require(target_port != 0, "target_port must be nonzero");
}

namespace {

double idle_congestion_mean(const CongestionParams& c) {
  return std::clamp(c.base, c.mean_min, c.mean_max);
}

RegionId draw_region(RandomStream& rng, const std::array<double, kRegionCount>& probs) {
  const double u = rng.canonical();
  double cum = 0.0;
  for (int i = 0; i < kRegionCount - 1; ++i) {
    cum += probs[i];
    if (u < cum) return static_cast<RegionId>(i);
  }
  return static_cast<RegionId>(kRegionCount - 1);
}

}  // namespace

NetworkTopology generate_topology(std::size_t n_relays, std::uint64_t seed,
                                  const ModelParams& params) {
  params.validate();
  if (n_relays < 10)
    throw std::invalid_argument("generate_topology: need at least 10 relays");

  const auto n = static_cast<double>(n_relays);
  const auto n_guards = static_cast<std::size_t>(std::llround(params.guard_fraction * n));
  const auto n_exits = static_cast<std::size_t>(std::llround(params.exit_fraction * n));
  if (n_guards == 0 || n_exits == 0 || n_guards + n_exits >= n_relays)
    throw std::invalid_argument("generate_topology: role split leaves an empty role");

  NetworkTopology topo;
  topo.seed = seed;
  topo.latency = params.latency;
  topo.relays.reserve(n_relays);

  const std::size_t as_pool =
      std::max<std::size_t>(1, n_relays / static_cast<std::size_t>(params.as_pool_divisor));
  const std::size_t subnet_pool = std::max<std::size_t>(
      1, n_relays / static_cast<std::size_t>(params.subnet_pool_divisor));

  const double m0 = idle_congestion_mean(params.congestion);
  const double a0 = params.congestion.concentration * m0;
  const double b0 = params.congestion.concentration * (1.0 - m0);

  RandomStream rng(seed);
  for (std::size_t i = 0; i < n_relays; ++i) {
    Relay r;
    r.id = static_cast<std::uint32_t>(i);
    r.role = i < n_guards               ? Role::Guard
             : i < n_guards + n_exits   ? Role::Exit
                                        : Role::Middle;
    const auto role_ix = static_cast<int>(r.role);
    const auto& spec = params.bandwidth[role_ix];
    r.bandwidth_kbps = rng.lognormal(std::log(spec.median_kbps), spec.sigma_ln);
    r.region = draw_region(rng, params.region_probs);
    r.uptime_hours = rng.exponential(params.uptime_mean_hours[role_ix]);
    r.stability = r.uptime_hours / (r.uptime_hours + params.stability_pivot_hours);
    r.as_number = 1 + static_cast<std::uint32_t>(rng.uniform_index(as_pool));
    const auto prefix = static_cast<std::uint32_t>(rng.uniform_index(subnet_pool));
    const auto low = static_cast<std::uint32_t>(rng.uniform_index(65536));
    // Private-style layout: /16 blocks counted up from 10.0.0.0.
    r.ipv4 = ((0x0A00u + prefix) << 16) | low;
    r.congestion = clamp01(rng.beta(a0, b0));
    if (r.role == Role::Exit) r.exit_ports = {80, 443};
    topo.role_ids[role_ix].push_back(r.id);
    topo.relays.push_back(std::move(r));
  }
  return topo;
}

void update_congestion(NetworkTopology& topo, double load_factor,
                       std::uint64_t seed_step, const ModelParams& params) {
  const auto& c = params.congestion;
  const double lf = std::max(load_factor, 1e-9);
  const double m = std::clamp(c.base + c.load_slope * lf / 100.0, c.mean_min, c.mean_max);
  const double a = c.concentration * m;
  const double b = c.concentration * (1.0 - m);
  RandomStream rng(mix_seeds(topo.seed ^ kCongestionStreamTag, seed_step));
  for (auto& r : topo.relays)
    r.congestion = clamp01(rng.beta(a, b));
}

double region_latency(const LatencyMatrix& m, RegionId a, RegionId b) {
  return m.at(a, b);
}

std::string ipv4_to_string(std::uint32_t ip) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", (ip >> 24) & 0xFF, (ip >> 16) & 0xFF,
                (ip >> 8) & 0xFF, ip & 0xFF);
  return buf;
}

namespace {

std::uint32_t ipv4_from_string(const std::string& s) {
  unsigned a, b, c, d;
  if (std::sscanf(s.c_str(), "%u.%u.%u.%u", &a, &b, &c, &d) != 4 || a > 255 ||
      b > 255 || c > 255 || d > 255)
    throw std::invalid_argument("bad ipv4: " + s);
  return (a << 24) | (b << 16) | (c << 8) | d;
}

}  // namespace

std::string topology_to_json(const NetworkTopology& topo) {
  json j;
  j["schema"] = "torsim-topology/1";
  j["seed"] = topo.seed;
  j["n_relays"] = topo.n_relays();
  auto& lat = j["latency_ms"] = json::array();
  for (int a = 0; a < kRegionCount; ++a) {
    json row = json::array();
    for (int b = 0; b < kRegionCount; ++b)
      row.push_back(topo.latency.at(static_cast<RegionId>(a), static_cast<RegionId>(b)));
    lat.push_back(std::move(row));
  }
  auto& relays = j["relays"] = json::array();
  for (const auto& r : topo.relays) {
    json e;
    e["id"] = r.id;
    e["role"] = to_string(r.role);
    e["bandwidth_kbps"] = r.bandwidth_kbps;
    e["region"] = to_string(r.region);
    e["uptime_hours"] = r.uptime_hours;
    e["stability"] = r.stability;
    e["congestion"] = r.congestion;
    e["as_number"] = r.as_number;
    e["ipv4"] = ipv4_to_string(r.ipv4);
    if (!r.exit_ports.empty()) e["exit_ports"] = r.exit_ports;
    relays.push_back(std::move(e));
  }
  return j.dump(2);
}

NetworkTopology topology_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (j.value("schema", "") != "torsim-topology/1")
    throw std::invalid_argument("topology_from_json: unknown schema");
  NetworkTopology topo;
  topo.seed = j.at("seed").get<std::uint64_t>();
  const auto& lat = j.at("latency_ms");
  for (int a = 0; a < kRegionCount; ++a)
    for (int b = 0; b < kRegionCount; ++b)
      topo.latency.set(static_cast<RegionId>(a), static_cast<RegionId>(b),
                       lat.at(a).at(b).get<double>());
  for (const auto& e : j.at("relays")) {
    Relay r;
    r.id = e.at("id").get<std::uint32_t>();
    r.role = role_from_string(e.at("role").get<std::string>());
    r.bandwidth_kbps = e.at("bandwidth_kbps").get<double>();
    r.region = region_from_string(e.at("region").get<std::string>());
    r.uptime_hours = e.at("uptime_hours").get<double>();
    r.stability = e.at("stability").get<double>();
    r.congestion = e.at("congestion").get<double>();
    r.as_number = e.at("as_number").get<std::uint32_t>();
    r.ipv4 = ipv4_from_string(e.at("ipv4").get<std::string>());
    if (e.contains("exit_ports"))
      r.exit_ports = e.at("exit_ports").get<std::vector<std::uint16_t>>();
    topo.role_ids[static_cast<int>(r.role)].push_back(r.id);
    topo.relays.push_back(std::move(r));
  }
  if (topo.n_relays() != j.at("n_relays").get<std::size_t>())
    throw std::invalid_argument("topology_from_json: relay count mismatch");
  return topo;
}

}  // namespace torsim
