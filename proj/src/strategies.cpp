#include "torsim/strategies.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

namespace torsim {

WeightedSampler::WeightedSampler(std::vector<std::uint32_t> ids,
                                 std::span<const double> weights)
    : ids_(std::move(ids)) {
  if (weights.size() != ids_.size())
    throw std::invalid_argument("WeightedSampler: ids/weights length mismatch");
  cumulative_.reserve(ids_.size());
  double run = 0.0;
  for (double w : weights) {
    if (!(w > 0.0))
      throw std::invalid_argument("WeightedSampler: weights must be > 0");
    run += w;
    cumulative_.push_back(run);
  }
}

std::uint32_t WeightedSampler::draw(RandomStream& rng) const {
  assert(!ids_.empty());
  const double x = rng.canonical() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
  if (it == cumulative_.end()) --it;  // x == total after rounding
  return ids_[static_cast<std::size_t>(it - cumulative_.begin())];
}

std::uint32_t weighted_sample(std::span<const std::uint32_t> candidates,
                              std::span<const double> weights, RandomStream& rng) {
  if (candidates.empty()) throw NoCandidates("weighted_sample: empty candidate list");
  WeightedSampler s(std::vector<std::uint32_t>(candidates.begin(), candidates.end()),
                    weights);
  return s.draw(rng);
}

std::size_t GuardState::least_used_index() const {
  assert(!guard_ids.empty());
  std::size_t best = 0;
  for (std::size_t i = 1; i < guard_ids.size(); ++i) {
    if (use_counts[i] < use_counts[best] ||
        (use_counts[i] == use_counts[best] && guard_ids[i] < guard_ids[best]))
      best = i;
  }
  return best;
}

namespace {

const char* kPositionName[3] = {"guard", "middle", "exit"};

std::vector<double> bandwidths_of(const NetworkTopology& topo,
                                  const std::vector<std::uint32_t>& ids) {
  std::vector<double> w;
  w.reserve(ids.size());
  for (auto id : ids) w.push_back(topo.relay(id).bandwidth_kbps);
  return w;
}

}  // namespace

SelectionContext::SelectionContext(const NetworkTopology& topo,
                                   const ModelParams& params, std::uint64_t seed)
    : topo_(topo), params_(params), rng_(seed) {
  eligible_[0] = topo.ids_with_role(Role::Guard);
  eligible_[1] = topo.ids_with_role(Role::Middle);
  for (auto id : topo.ids_with_role(Role::Exit))
    if (topo.relay(id).permits_port(params.target_port)) eligible_[2].push_back(id);

  for (int p = 0; p < 3; ++p) {
    if (!eligible_[p].empty())
      samplers_[p] = WeightedSampler(eligible_[p], bandwidths_of(topo, eligible_[p]));
    for (auto id : eligible_[p])
      region_pools_[p].ids[static_cast<int>(topo.relay(id).region)].push_back(id);
    for (int r = 0; r < kRegionCount; ++r) {
      auto& ids = region_pools_[p].ids[r];
      if (!ids.empty())
        region_pools_[p].samplers[r] = WeightedSampler(ids, bandwidths_of(topo, ids));
    }
  }

  // Feasibility of a region triple never changes within a run (congestion
  // updates do not move relays), so the ranking is computed once.
  for (int g = 0; g < kRegionCount; ++g)
    for (int m = 0; m < kRegionCount; ++m)
      for (int e = 0; e < kRegionCount; ++e) {
        if (region_pools_[0].ids[g].empty() || region_pools_[1].ids[m].empty() ||
            region_pools_[2].ids[e].empty())
          continue;
        const auto rg = static_cast<RegionId>(g);
        const auto rm = static_cast<RegionId>(m);
        const auto re = static_cast<RegionId>(e);
        feasible_triples_.push_back(
            {topo.latency.at(rg, rm) + topo.latency.at(rm, re), rg, rm, re});
      }
  std::stable_sort(feasible_triples_.begin(), feasible_triples_.end(),
                   [](const RankedTriple& a, const RankedTriple& b) {
                     return a.cost < b.cost;
                   });
}

Circuit SelectionContext::select(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Random: return select_random();
    case StrategyKind::Guard: return select_guard();
    case StrategyKind::CongestionAware: return select_congestion_aware();
    case StrategyKind::GeoLatency: return select_geo_latency();
    case StrategyKind::GeoDiversity: return select_geo_diversity();
  }
  throw std::logic_error("select: bad StrategyKind");
}

std::uint32_t SelectionContext::draw_position(int position, RandomStream& rng) {
  if (eligible_[position].empty())
    throw NoCandidates(std::string("no eligible ") + kPositionName[position] +
                       " relays");
  ++work_units_;
  return samplers_[position].draw(rng);
}

Circuit SelectionContext::finish(std::uint32_t g, std::uint32_t m, std::uint32_t e,
                                 StrategyKind kind, std::uint64_t work_start) {
  const Relay& rg = topo_.relay(g);
  const Relay& rm = topo_.relay(m);
  const Relay& re = topo_.relay(e);
  Circuit c;
  c.guard_id = g;
  c.middle_id = m;
  c.exit_id = e;
  c.strategy = kind;
  c.bandwidth_kbps =
      bottleneck_bandwidth(rg.bandwidth_kbps, rm.bandwidth_kbps, re.bandwidth_kbps);
  c.latency_ms = circuit_latency(topo_.latency, rg.region, rm.region, re.region);
  c.efficiency = circuit_efficiency(c.bandwidth_kbps, c.latency_ms);
  c.congestion = {rg.congestion, rm.congestion, re.congestion};
  c.build_time_us = work_units_ - work_start;
  c.success = true;
  return c;
}

Circuit SelectionContext::fail(const char* what, StrategyKind kind, std::uint32_t g,
                               std::uint32_t m, std::uint32_t e,
                               std::uint64_t work_start) {
  Circuit c = finish(g, m, e, kind, work_start);
  c.success = false;
  throw CircuitBuildFailure(what, std::move(c));
}

void SelectionContext::ensure_guard_state() {
  if (guard_state_ready_) return;
  const auto& guards = eligible_[0];
  const auto want = static_cast<std::size_t>(params_.guard_set_size);
  if (guards.size() < want)
    throw NoCandidates("select_guard: fewer guard relays than the persistent set size");

  // Bandwidth percentile by rank among guard-eligible relays.
  std::vector<std::uint32_t> by_bw = guards;
  std::sort(by_bw.begin(), by_bw.end(), [&](std::uint32_t a, std::uint32_t b) {
    const double ba = topo_.relay(a).bandwidth_kbps;
    const double bb = topo_.relay(b).bandwidth_kbps;
    return ba != bb ? ba < bb : a < b;
  });
  std::vector<double> percentile(topo_.n_relays(), 0.0);
  const double denom = by_bw.size() > 1 ? static_cast<double>(by_bw.size() - 1) : 1.0;
  for (std::size_t rank = 0; rank < by_bw.size(); ++rank)
    percentile[by_bw[rank]] = static_cast<double>(rank) / denom;

  const double w = params_.guard_bandwidth_weight;
  std::vector<std::uint32_t> by_score = guards;
  std::sort(by_score.begin(), by_score.end(), [&](std::uint32_t a, std::uint32_t b) {
    const double sa = w * percentile[a] + (1.0 - w) * topo_.relay(a).stability;
    const double sb = w * percentile[b] + (1.0 - w) * topo_.relay(b).stability;
    return sa != sb ? sa > sb : a < b;
  });
  guard_state_.guard_ids.assign(by_score.begin(), by_score.begin() + want);
  std::sort(guard_state_.guard_ids.begin(), guard_state_.guard_ids.end());
  guard_state_.use_counts.assign(want, 0);
  guard_state_ready_ = true;
}

void SelectionContext::ensure_congestion_cache() {
  if (congestion_cache_valid_) return;
  const double threshold = params_.congestion.exclude_threshold;
  for (int p = 0; p < 3; ++p) {
    std::vector<std::uint32_t> kept;
    for (auto id : eligible_[p])
      if (topo_.relay(id).congestion < threshold) kept.push_back(id);
    std::sort(kept.begin(), kept.end(), [&](std::uint32_t a, std::uint32_t b) {
      const Relay& ra = topo_.relay(a);
      const Relay& rb = topo_.relay(b);
      const double sa = ra.bandwidth_kbps * (1.0 - ra.congestion);
      const double sb = rb.bandwidth_kbps * (1.0 - rb.congestion);
      return sa != sb ? sa > sb : a < b;
    });
    const std::size_t q =
        kept.empty() ? 0 : std::max<std::size_t>(1, (kept.size() + 3) / 4);
    quartile_[p].assign(kept.begin(), kept.begin() + std::min(q, kept.size()));
  }
  congestion_cache_valid_ = true;
}

Circuit SelectionContext::select_random() {
  const std::uint64_t w0 = work_units_;
  std::uint32_t g = 0, m = 0, e = 0;
  for (int attempt = 0; attempt < params_.retry_budget; ++attempt) {
    g = draw_position(0, rng_);
    m = draw_position(1, rng_);
    e = draw_position(2, rng_);
    if (passes_diversity(topo_, g, m, e)) return finish(g, m, e, StrategyKind::Random, w0);
  }
  return fail("select_random: retry budget exhausted", StrategyKind::Random, g, m, e, w0);
}

Circuit SelectionContext::select_guard() {
  const std::uint64_t w0 = work_units_;
  ensure_guard_state();
  if (eligible_[1].empty()) throw NoCandidates("no eligible middle relays");
  if (eligible_[2].empty()) throw NoCandidates("no eligible exit relays");

  // Guards in least-used-first order, ties by lower relay id.
  std::vector<std::size_t> order(guard_state_.guard_ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (guard_state_.use_counts[a] != guard_state_.use_counts[b])
      return guard_state_.use_counts[a] < guard_state_.use_counts[b];
    return guard_state_.guard_ids[a] < guard_state_.guard_ids[b];
  });

  std::uint32_t m = 0, e = 0;
  for (std::size_t gi : order) {
    const std::uint32_t g = guard_state_.guard_ids[gi];
    for (int attempt = 0; attempt < params_.retry_budget; ++attempt) {
      m = draw_position(1, rng_);
      e = draw_position(2, rng_);
      if (passes_diversity(topo_, g, m, e)) {
        ++guard_state_.use_counts[gi];
        return finish(g, m, e, StrategyKind::Guard, w0);
      }
    }
  }
  return fail("select_guard: no diverse middle/exit for any persistent guard",
              StrategyKind::Guard, guard_state_.guard_ids[order.back()], m, e, w0);
}

Circuit SelectionContext::select_congestion_aware() {
  const std::uint64_t w0 = work_units_;
  for (int p = 0; p < 3; ++p)
    if (eligible_[p].empty())
      throw NoCandidates(std::string("no eligible ") + kPositionName[p] + " relays");
  ensure_congestion_cache();
  for (int p = 0; p < 3; ++p)
    if (quartile_[p].empty())
      throw CircuitBuildFailure(
          std::string("select_congestion_aware: every ") + kPositionName[p] +
          " candidate is at or above the congestion threshold");

  std::uint32_t g = 0, m = 0, e = 0;
  for (int attempt = 0; attempt < params_.retry_budget; ++attempt) {
    g = quartile_[0][rng_.uniform_index(quartile_[0].size())];
    m = quartile_[1][rng_.uniform_index(quartile_[1].size())];
    e = quartile_[2][rng_.uniform_index(quartile_[2].size())];
    work_units_ += 3;
    if (passes_diversity(topo_, g, m, e))
      return finish(g, m, e, StrategyKind::CongestionAware, w0);
  }
  return fail("select_congestion_aware: retry budget exhausted",
              StrategyKind::CongestionAware, g, m, e, w0);
}

Circuit SelectionContext::select_geo_latency() {
  const std::uint64_t w0 = work_units_;
  for (int p = 0; p < 3; ++p)
    if (eligible_[p].empty())
      throw NoCandidates(std::string("no eligible ") + kPositionName[p] + " relays");

  std::uint32_t g = 0, m = 0, e = 0;
  for (const auto& t : feasible_triples_) {
    const auto& gs = region_pools_[0].samplers[static_cast<int>(t.g)];
    const auto& ms = region_pools_[1].samplers[static_cast<int>(t.m)];
    const auto& es = region_pools_[2].samplers[static_cast<int>(t.e)];
    for (int attempt = 0; attempt < params_.retry_budget; ++attempt) {
      g = gs.draw(rng_);
      m = ms.draw(rng_);
      e = es.draw(rng_);
      work_units_ += 3;
      if (passes_diversity(topo_, g, m, e))
        return finish(g, m, e, StrategyKind::GeoLatency, w0);
    }
  }
  return fail("select_geo_latency: no diverse circuit in any feasible region triple",
              StrategyKind::GeoLatency, g, m, e, w0);
}

Circuit SelectionContext::select_geo_diversity() {
  const std::uint64_t w0 = work_units_;
  for (int p = 0; p < 3; ++p)
    if (eligible_[p].empty())
      throw NoCandidates(std::string("no eligible ") + kPositionName[p] + " relays");

  // Region chosen with probability proportional to the position's eligible
  // population; excluded regions drop out unless that empties the choice
  // (graceful degradation to repeats).
  auto draw_region = [&](int position, unsigned excluded_mask) {
    const auto& pools = region_pools_[position];
    for (int relaxed = 0; relaxed < 2; ++relaxed) {
      const unsigned mask = relaxed ? 0u : excluded_mask;
      double total = 0.0;
      for (int r = 0; r < kRegionCount; ++r)
        if (!(mask & (1u << r))) total += static_cast<double>(pools.ids[r].size());
      if (total == 0.0) continue;
      const double x = rng_.canonical() * total;
      double cum = 0.0;
      for (int r = 0; r < kRegionCount; ++r) {
        if (mask & (1u << r)) continue;
        cum += static_cast<double>(pools.ids[r].size());
        if (x < cum) return static_cast<RegionId>(r);
      }
      // x landed on the accumulated total after rounding: take the last
      // populated allowed region.
      for (int r = kRegionCount - 1; r >= 0; --r)
        if (!(mask & (1u << r)) && !pools.ids[r].empty())
          return static_cast<RegionId>(r);
    }
    throw NoCandidates(std::string("no eligible ") + kPositionName[position] +
                       " relays");
  };

  std::uint32_t g = 0, m = 0, e = 0;
  for (int attempt = 0; attempt < params_.retry_budget; ++attempt) {
    const RegionId rg = draw_region(0, 0u);
    g = region_pools_[0].samplers[static_cast<int>(rg)].draw(rng_);
    const RegionId rm = draw_region(1, 1u << static_cast<int>(rg));
    m = region_pools_[1].samplers[static_cast<int>(rm)].draw(rng_);
    const RegionId re =
        draw_region(2, (1u << static_cast<int>(rg)) | (1u << static_cast<int>(rm)));
    e = region_pools_[2].samplers[static_cast<int>(re)].draw(rng_);
    work_units_ += 3;
    if (passes_diversity(topo_, g, m, e))
      return finish(g, m, e, StrategyKind::GeoDiversity, w0);
  }
  return fail("select_geo_diversity: retry budget exhausted",
              StrategyKind::GeoDiversity, g, m, e, w0);
}

}  // namespace torsim
