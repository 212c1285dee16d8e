#include "torsim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <map>
#include <stdexcept>

namespace torsim {

std::vector<ScenarioSpec> default_scenarios() {
  return {
      {1, 250000, 10000, 2500, "250k users / 10k relays"},
      {2, 500000, 10000, 5000, "500k users / 10k relays"},
      {3, 1000000, 10000, 10000, "1M users / 10k relays"},
      {4, 1000000, 20000, 10000, "1M users / 20k relays"},
      {5, 1000000, 50000, 10000, "1M users / 50k relays"},
  };
}

ScenarioSpec effective_scenario(const ScenarioSpec& spec, double scale) {
  if (!(scale > 0.0) || scale > 1.0)
    throw std::invalid_argument("scale must be in (0, 1]");
  auto scaled = [scale](std::size_t v, std::size_t floor_at) {
    const auto s = static_cast<std::size_t>(
        std::llround(static_cast<double>(v) * scale));
    return std::max(std::max<std::size_t>(s, 1), std::min(floor_at, v));
  };
  ScenarioSpec out = spec;
  out.users = scaled(spec.users, 1);
  out.relays = scaled(spec.relays, 100);
  out.circuits = scaled(spec.circuits, 100);
  return out;
}

AggregateMetrics aggregate(const std::vector<Circuit>& circuits) {
  if (circuits.empty()) throw EmptyAggregate("aggregate: no circuits");
  AggregateMetrics m;
  m.circuit_count = circuits.size();

  std::size_t ok = 0;
  double sb = 0.0, sl = 0.0, se = 0.0, st = 0.0;
  for (const auto& c : circuits) {
    if (!c.success) continue;
    ++ok;
    sb += c.bandwidth_kbps;
    sl += c.latency_ms;
    se += c.efficiency;
    st += static_cast<double>(c.build_time_us);
  }
  m.success_rate = static_cast<double>(ok) / static_cast<double>(circuits.size());
  if (ok == 0) return m;

  const auto n = static_cast<double>(ok);
  m.mean_bandwidth_kbps = sb / n;
  m.mean_latency_ms = sl / n;
  m.mean_efficiency = se / n;
  m.mean_build_time_us = st / n;

  double vb = 0.0, vl = 0.0, ve = 0.0;
  for (const auto& c : circuits) {
    if (!c.success) continue;
    const double db = c.bandwidth_kbps - m.mean_bandwidth_kbps;
    const double dl = c.latency_ms - m.mean_latency_ms;
    const double de = c.efficiency - m.mean_efficiency;
    vb += db * db;
    vl += dl * dl;
    ve += de * de;
  }
  m.std_bandwidth = std::sqrt(vb / n);
  m.std_latency = std::sqrt(vl / n);
  m.std_efficiency = std::sqrt(ve / n);
  return m;
}

std::uint64_t topology_seed(std::uint64_t run_seed, int scenario_id) {
  return mix_seeds(run_seed, 0x746F706Full + static_cast<std::uint64_t>(scenario_id));
}

std::uint64_t cell_seed(std::uint64_t run_seed, int scenario_id, StrategyKind kind) {
  const auto h = mix_seeds(static_cast<std::uint64_t>(scenario_id),
                           0x7374726174ull + static_cast<std::uint64_t>(kind));
  return run_seed ^ h;
}

namespace {

std::string utc_timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buf;
}

void validate_spec(const ScenarioSpec& s) {
  if (s.users == 0 || s.relays == 0 || s.circuits == 0)
    throw std::invalid_argument("scenario counts must be positive");
}

}  // namespace

RunReport run_matrix(const std::vector<ScenarioSpec>& scenarios,
                     const std::vector<StrategyKind>& strategies,
                     std::uint64_t seed, double scale, const ModelParams& params,
                     bool keep_circuits) {
  if (scenarios.empty()) throw std::invalid_argument("run_matrix: no scenarios");
  if (strategies.empty()) throw std::invalid_argument("run_matrix: no strategies");
  params.validate();

  RunReport report;
  report.seed = seed;
  report.scale = scale;
  report.params = params;
  report.scenarios = scenarios;
  report.strategies = strategies;
  report.timestamp = utc_timestamp_now();

  for (const auto& spec : scenarios) {
    validate_spec(spec);
    const ScenarioSpec eff = effective_scenario(spec, scale);
    const NetworkTopology base =
        generate_topology(eff.relays, topology_seed(seed, spec.scenario_id), params);
    const double load_factor =
        static_cast<double>(eff.users) / static_cast<double>(eff.relays);

    for (StrategyKind kind : strategies) {
      // Every strategy sees the same relay population and, because the
      // congestion stream is keyed off (topology seed, epoch) only, the
      // same congestion fields.
      NetworkTopology topo = base;
      SelectionContext ctx(topo, params, cell_seed(seed, spec.scenario_id, kind));

      CellResult cell;
      cell.scenario_id = spec.scenario_id;
      cell.scenario_label = spec.label;
      cell.strategy = kind;
      cell.users = eff.users;
      cell.relays = eff.relays;
      cell.circuits_requested = eff.circuits;

      std::vector<Circuit> circuits;
      circuits.reserve(eff.circuits);
      const auto epoch = static_cast<std::size_t>(params.epoch_circuits);
      for (std::size_t i = 0; i < eff.circuits; ++i) {
        if (i % epoch == 0) {
          update_congestion(topo, load_factor, i / epoch, params);
          ctx.notify_congestion_changed();
        }
        try {
          circuits.push_back(ctx.select(kind));
        } catch (const CircuitBuildFailure& f) {
          circuits.push_back(f.last_attempt);
        }
      }
      cell.metrics = aggregate(circuits);
      if (keep_circuits) cell.circuits = std::move(circuits);
      report.cells.push_back(std::move(cell));
    }
  }
  report.ranking = rank_by_efficiency(report);
  return report;
}

std::vector<RankEntry> rank_by_efficiency(const RunReport& report) {
  std::map<StrategyKind, std::pair<double, std::size_t>> sums;
  for (const auto& cell : report.cells) {
    auto& [sum, n] = sums[cell.strategy];
    sum += cell.metrics.mean_efficiency;
    ++n;
  }
  std::vector<RankEntry> out;
  for (StrategyKind k : report.strategies) {
    const auto it = sums.find(k);
    if (it == sums.end() || it->second.second == 0)
      throw std::invalid_argument("rank_by_efficiency: strategy has no cells");
    out.push_back({k, it->second.first / static_cast<double>(it->second.second)});
  }
  std::sort(out.begin(), out.end(), [](const RankEntry& a, const RankEntry& b) {
    if (a.mean_efficiency != b.mean_efficiency)
      return a.mean_efficiency > b.mean_efficiency;
    return std::string(to_string(a.strategy)) < to_string(b.strategy);
  });
  return out;
}

}  // namespace torsim
