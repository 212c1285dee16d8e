#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "torsim/circuit.hpp"
#include "torsim/netmodel.hpp"
#include "torsim/rng.hpp"
#include "torsim/strategy_kind.hpp"

namespace torsim {

struct SimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A selection pool that must be nonempty is empty (caller/config error).
struct NoCandidates : SimError {
  using SimError::SimError;
};

// Retry budget exhausted without a diverse circuit. Carries the last
// attempted triple so callers can log the failure.
struct CircuitBuildFailure : SimError {
  explicit CircuitBuildFailure(const std::string& what, Circuit last = {})
      : SimError(what), last_attempt(std::move(last)) {}
  Circuit last_attempt;
};

// Bandwidth-proportional draw over a fixed candidate set.
// Probability of ids[i] is weights[i]/sum(weights).
class WeightedSampler {
 public:
  WeightedSampler() = default;
  WeightedSampler(std::vector<std::uint32_t> ids, std::span<const double> weights);

  std::uint32_t draw(RandomStream& rng) const;
  bool empty() const { return ids_.empty(); }
  std::size_t size() const { return ids_.size(); }
  double total_weight() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  const std::vector<std::uint32_t>& ids() const { return ids_; }

 private:
  std::vector<std::uint32_t> ids_;
  std::vector<double> cumulative_;  // strictly increasing prefix sums
};

// One-shot contract form of the sampler.
std::uint32_t weighted_sample(std::span<const std::uint32_t> candidates,
                              std::span<const double> weights, RandomStream& rng);

struct GuardState {
  std::vector<std::uint32_t> guard_ids;  // persistent set, ascending ids
  std::vector<std::uint64_t> use_counts;

  // Index of the least-used guard; ties go to the lower relay id.
  std::size_t least_used_index() const;
};

// Per-(scenario, strategy) selection state: one rng stream, pre-indexed
// candidate pools, persistent guard set, and a congestion-epoch cache for
// the congestion-aware strategy. Holds a reference to the topology; callers
// must keep it alive and call notify_congestion_changed() after rewriting
// congestion values.
class SelectionContext {
 public:
  SelectionContext(const NetworkTopology& topo, const ModelParams& params,
                   std::uint64_t seed);

  Circuit select(StrategyKind kind);

  Circuit select_random();
  Circuit select_guard();
  Circuit select_congestion_aware();
  Circuit select_geo_latency();
  Circuit select_geo_diversity();

  void notify_congestion_changed() { congestion_cache_valid_ = false; }

  // Total candidate draws spent so far (the deterministic effort clock).
  std::uint64_t work_units() const { return work_units_; }

  const GuardState& guard_state() const { return guard_state_; }
  const NetworkTopology& topology() const { return topo_; }

 private:
  struct RegionPools {
    // Eligible ids per region for one position, plus bandwidth samplers.
    std::array<std::vector<std::uint32_t>, kRegionCount> ids;
    std::array<WeightedSampler, kRegionCount> samplers;
  };

  void ensure_guard_state();
  void ensure_congestion_cache();
  std::uint32_t draw_position(int position, RandomStream& rng);
  Circuit finish(std::uint32_t g, std::uint32_t m, std::uint32_t e,
                 StrategyKind kind, std::uint64_t work_start);
  Circuit fail(const char* what, StrategyKind kind, std::uint32_t g,
               std::uint32_t m, std::uint32_t e, std::uint64_t work_start);

  const NetworkTopology& topo_;
  const ModelParams& params_;
  RandomStream rng_;
  std::uint64_t work_units_ = 0;

  // position 0=guard, 1=middle, 2=exit (exit pre-filtered by target port)
  std::array<std::vector<std::uint32_t>, 3> eligible_;
  std::array<WeightedSampler, 3> samplers_;

  GuardState guard_state_;
  bool guard_state_ready_ = false;

  // congestion-aware: top-quartile ids per position, rebuilt per epoch
  std::array<std::vector<std::uint32_t>, 3> quartile_;
  bool congestion_cache_valid_ = false;

  RegionPools region_pools_[3];
  // (cost, guard region, middle region, exit region) ascending by cost,
  // ties in enumeration order; only triples feasible for this topology.
  struct RankedTriple {
    double cost;
    RegionId g, m, e;
  };
  std::vector<RankedTriple> feasible_triples_;
};

}  // namespace torsim
