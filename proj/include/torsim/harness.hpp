#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "torsim/circuit.hpp"
#include "torsim/netmodel.hpp"
#include "torsim/strategies.hpp"
#include "torsim/strategy_kind.hpp"

namespace torsim {

// aggregate() was asked for statistics over zero circuits.
struct EmptyAggregate : SimError {
  using SimError::SimError;
};

struct ScenarioSpec {
  int scenario_id = 0;
  std::size_t users = 0;
  std::size_t relays = 0;
  std::size_t circuits = 0;
  std::string label;
};

// The five evaluation scenarios; circuit counts sum to 37,500.
std::vector<ScenarioSpec> default_scenarios();

// Applies the desk-scale multiplier. Relay and circuit counts are floored
// at 100 so shrunken runs keep meaningful statistics; users floor at 1.
ScenarioSpec effective_scenario(const ScenarioSpec& spec, double scale);

struct AggregateMetrics {
  double mean_bandwidth_kbps = 0.0;
  double mean_latency_ms = 0.0;
  double mean_efficiency = 0.0;
  double success_rate = 0.0;  // successes / attempts
  double std_bandwidth = 0.0;  // population std over successful circuits
  double std_latency = 0.0;
  double std_efficiency = 0.0;
  std::size_t circuit_count = 0;  // attempts
  double mean_build_time_us = 0.0;
};

// Means and population stds over successful circuits; success_rate over all
// attempts. Throws EmptyAggregate on empty input. Zero successes leave the
// means and stds at 0.
AggregateMetrics aggregate(const std::vector<Circuit>& circuits);

struct CellResult {
  int scenario_id = 0;
  std::string scenario_label;
  StrategyKind strategy = StrategyKind::Random;
  std::size_t users = 0;    // effective (post-scale)
  std::size_t relays = 0;
  std::size_t circuits_requested = 0;
  AggregateMetrics metrics;
  std::vector<Circuit> circuits;  // filled only when keep_circuits
};

struct RankEntry {
  StrategyKind strategy = StrategyKind::Random;
  double mean_efficiency = 0.0;  // unweighted mean over scenarios
};

struct RunReport {
  std::uint64_t seed = 0;
  double scale = 1.0;
  ModelParams params;
  std::vector<ScenarioSpec> scenarios;  // as requested (pre-scale)
  std::vector<StrategyKind> strategies;
  std::vector<CellResult> cells;        // scenario-major, strategy-minor
  std::vector<RankEntry> ranking;
  std::string timestamp;  // excluded from determinism comparisons
};

// Deterministic sub-seed derivations (exposed for tests and tooling).
std::uint64_t topology_seed(std::uint64_t run_seed, int scenario_id);
std::uint64_t cell_seed(std::uint64_t run_seed, int scenario_id, StrategyKind kind);

// Runs the scenario × strategy matrix:
// per scenario — one topology snapshot shared by all strategies;
// per strategy — a fresh congestion field at run start, refreshed every
// params.epoch_circuits circuits with strategy-independent draws, then
// N_e circuit selections. Build failures are recorded in success_rate,
// not raised. Deterministic for fixed inputs (timestamp aside).
RunReport run_matrix(const std::vector<ScenarioSpec>& scenarios,
                     const std::vector<StrategyKind>& strategies,
                     std::uint64_t seed, double scale,
                     const ModelParams& params = ModelParams{},
                     bool keep_circuits = true);

// Cross-scenario mean efficiency per strategy, descending; ties break
// alphabetically by strategy name.
std::vector<RankEntry> rank_by_efficiency(const RunReport& report);

}  // namespace torsim
