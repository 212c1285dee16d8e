#include <array>
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "torsim/netmodel.hpp"

using namespace torsim;

TEST_CASE("netmodel: role split follows the 15/15/70 rounding rule") {
  const ModelParams params;
  SUBCASE("10000 relays") {
    const auto topo = generate_topology(10000, 1, params);
    CHECK(topo.ids_with_role(Role::Guard).size() == 1500);
    CHECK(topo.ids_with_role(Role::Exit).size() == 1500);
    CHECK(topo.ids_with_role(Role::Middle).size() == 7000);
  }
  SUBCASE("10 relays (half-up rounding)") {
    const auto topo = generate_topology(10, 1, params);
    CHECK(topo.ids_with_role(Role::Guard).size() == 2);
    CHECK(topo.ids_with_role(Role::Exit).size() == 2);
    CHECK(topo.ids_with_role(Role::Middle).size() == 6);
  }
  SUBCASE("roles are contiguous id blocks") {
    const auto topo = generate_topology(200, 5, params);
    for (std::uint32_t id = 0; id < 30; ++id)
      CHECK(topo.relay(id).role == Role::Guard);
    for (std::uint32_t id = 30; id < 60; ++id)
      CHECK(topo.relay(id).role == Role::Exit);
    for (std::uint32_t id = 60; id < 200; ++id)
      CHECK(topo.relay(id).role == Role::Middle);
  }
}

TEST_CASE("netmodel: small populations rejected") {
  CHECK_THROWS_AS(generate_topology(9, 1, ModelParams{}), std::invalid_argument);
}

TEST_CASE("netmodel: generation is deterministic per seed") {
  const ModelParams params;
  const auto a = generate_topology(500, 99, params);
  const auto b = generate_topology(500, 99, params);
  REQUIRE(a.n_relays() == b.n_relays());
  for (std::size_t i = 0; i < a.n_relays(); ++i) {
    const Relay& x = a.relays[i];
    const Relay& y = b.relays[i];
    CHECK(x.bandwidth_kbps == y.bandwidth_kbps);
    CHECK(x.region == y.region);
    CHECK(x.uptime_hours == y.uptime_hours);
    CHECK(x.as_number == y.as_number);
    CHECK(x.ipv4 == y.ipv4);
    CHECK(x.congestion == y.congestion);
  }
  const auto c = generate_topology(500, 100, params);
  int same = 0;
  for (std::size_t i = 0; i < a.n_relays(); ++i)
    if (a.relays[i].bandwidth_kbps == c.relays[i].bandwidth_kbps) ++same;
  CHECK(same < 5);
}

TEST_CASE("netmodel: region frequencies approach the 30/40/20/10 mix") {
  const auto topo = generate_topology(100000, 7, ModelParams{});
  std::array<int, kRegionCount> counts{};
  for (const auto& r : topo.relays) ++counts[static_cast<int>(r.region)];
  const std::array<double, kRegionCount> want{0.30, 0.40, 0.20, 0.10};
  for (int i = 0; i < kRegionCount; ++i)
    CHECK(std::abs(counts[i] / 100000.0 - want[i]) < 0.01);
}

TEST_CASE("netmodel: bandwidth distributions match their role parameters") {
  const ModelParams params;
  const auto topo = generate_topology(100000, 21, params);
  for (int role = 0; role < 3; ++role) {
    const auto& ids = topo.role_ids[role];
    double sum = 0.0;
    for (auto id : ids) {
      REQUIRE(topo.relay(id).bandwidth_kbps > 0.0);
      sum += topo.relay(id).bandwidth_kbps;
    }
    const auto& spec = params.bandwidth[role];
    // Log-normal mean = median * exp(sigma^2/2).
    const double want = spec.median_kbps * std::exp(spec.sigma_ln * spec.sigma_ln / 2.0);
    CHECK(sum / static_cast<double>(ids.size()) ==
          doctest::Approx(want).epsilon(0.05));
  }
}

TEST_CASE("netmodel: stability is uptime/(uptime+pivot)") {
  const auto topo = generate_topology(1000, 3, ModelParams{});
  for (const auto& r : topo.relays) {
    CHECK(r.stability == doctest::Approx(r.uptime_hours / (r.uptime_hours + 720.0)));
    CHECK(r.stability >= 0.0);
    CHECK(r.stability < 1.0);
  }
}

TEST_CASE("netmodel: address pools and ports") {
  const auto topo = generate_topology(1000, 17, ModelParams{});
  for (const auto& r : topo.relays) {
    CHECK(r.as_number >= 1);
    CHECK(r.as_number <= 100);  // pool = n/10
    CHECK(r.subnet16() >= 0x0A00);
    CHECK(r.subnet16() < 0x0A00 + 125);  // pool = n/8
    if (r.role == Role::Exit) {
      CHECK(r.permits_port(80));
      CHECK(r.permits_port(443));
      CHECK_FALSE(r.permits_port(22));
    } else {
      CHECK(r.exit_ports.empty());
    }
  }
}

TEST_CASE("netmodel: congestion field") {
  ModelParams params;
  auto topo = generate_topology(20000, 31, params);
  SUBCASE("initial values live in [0,1] near the idle mean") {
    double sum = 0.0;
    for (const auto& r : topo.relays) {
      REQUIRE(r.congestion >= 0.0);
      REQUIRE(r.congestion <= 1.0);
      sum += r.congestion;
    }
    CHECK(sum / static_cast<double>(topo.n_relays()) ==
          doctest::Approx(0.15).epsilon(0.05));
  }
  SUBCASE("mean rises with load factor") {
    update_congestion(topo, 25.0, 0, params);
    double lo = 0.0;
    for (const auto& r : topo.relays) lo += r.congestion;
    update_congestion(topo, 100.0, 0, params);
    double hi = 0.0;
    for (const auto& r : topo.relays) hi += r.congestion;
    const auto n = static_cast<double>(topo.n_relays());
    CHECK(lo / n == doctest::Approx(0.275).epsilon(0.05));
    CHECK(hi / n == doctest::Approx(0.65).epsilon(0.05));
  }
  SUBCASE("mean clamps at the configured ceiling") {
    update_congestion(topo, 1e6, 0, params);
    double sum = 0.0;
    for (const auto& r : topo.relays) sum += r.congestion;
    CHECK(sum / static_cast<double>(topo.n_relays()) ==
          doctest::Approx(0.85).epsilon(0.05));
  }
  SUBCASE("zero load degrades to the base mean") {
    update_congestion(topo, 0.0, 0, params);
    double sum = 0.0;
    for (const auto& r : topo.relays) sum += r.congestion;
    CHECK(sum / static_cast<double>(topo.n_relays()) ==
          doctest::Approx(0.15).epsilon(0.05));
  }
  SUBCASE("updates are deterministic per (topology seed, step)") {
    update_congestion(topo, 50.0, 4, params);
    const double c0 = topo.relay(0).congestion;
    auto again = generate_topology(20000, 31, params);
    update_congestion(again, 50.0, 4, params);
    CHECK(again.relay(0).congestion == c0);
    update_congestion(again, 50.0, 5, params);
    CHECK(again.relay(0).congestion != c0);
  }
}

TEST_CASE("netmodel: latency matrix") {
  const auto m = LatencyMatrix::defaults();
  SUBCASE("symmetry and intra-region floor") {
    for (int a = 0; a < kRegionCount; ++a) {
      CHECK(m.at(static_cast<RegionId>(a), static_cast<RegionId>(a)) == 20.0);
      for (int b = 0; b < kRegionCount; ++b)
        CHECK(m.at(static_cast<RegionId>(a), static_cast<RegionId>(b)) ==
              m.at(static_cast<RegionId>(b), static_cast<RegionId>(a)));
    }
  }
  SUBCASE("fixed entries") {
    CHECK(m.at(RegionId::NorthAmerica, RegionId::Europe) == 45.0);
    CHECK(m.at(RegionId::NorthAmerica, RegionId::Asia) == 80.0);
    CHECK(m.at(RegionId::NorthAmerica, RegionId::RestOfWorld) == 70.0);
    CHECK(m.at(RegionId::Europe, RegionId::Asia) == 90.0);
    CHECK(m.at(RegionId::Europe, RegionId::RestOfWorld) == 60.0);
    CHECK(m.at(RegionId::Asia, RegionId::RestOfWorld) == 75.0);
  }
  SUBCASE("cheapest region triple costs 40") {
    CHECK(m.min_triple_cost() == 40.0);
  }
  SUBCASE("validation rejects a broken matrix") {
    ModelParams params;
    params.latency.set(RegionId::NorthAmerica, RegionId::Europe, -1.0);
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);
  }
  SUBCASE("region_latency reads the table") {
    CHECK(region_latency(m, RegionId::Europe, RegionId::Asia) == 90.0);
  }
}

TEST_CASE("netmodel: parameter validation names the offence") {
  ModelParams params;
  params.region_probs = {0.5, 0.5, 0.5, 0.5};
  CHECK_THROWS_WITH_AS(params.validate(), "region_probs must sum to 1",
                       std::invalid_argument);
  ModelParams p2;
  p2.bandwidth[0].median_kbps = 0.0;
  CHECK_THROWS_AS(p2.validate(), std::invalid_argument);
  ModelParams p3;
  p3.retry_budget = 0;
  CHECK_THROWS_AS(p3.validate(), std::invalid_argument);
}

TEST_CASE("netmodel: topology json round trip") {
  const auto topo = generate_topology(120, 77, ModelParams{});
  const auto text = topology_to_json(topo);
  const auto back = topology_from_json(text);
  REQUIRE(back.n_relays() == topo.n_relays());
  CHECK(back.seed == topo.seed);
  for (std::size_t i = 0; i < topo.n_relays(); ++i) {
    const Relay& x = topo.relays[i];
    const Relay& y = back.relays[i];
    CHECK(x.role == y.role);
    CHECK(x.bandwidth_kbps == y.bandwidth_kbps);
    CHECK(x.region == y.region);
    CHECK(x.as_number == y.as_number);
    CHECK(x.ipv4 == y.ipv4);
    CHECK(x.congestion == y.congestion);
    CHECK(x.exit_ports == y.exit_ports);
  }
  CHECK(back.latency.min_triple_cost() == 40.0);
}

TEST_CASE("netmodel: ipv4 formatting round trip") {
  CHECK(ipv4_to_string(0x0A0300FF) == "10.3.0.255");
}
