#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "torsim/harness.hpp"

namespace torsim {

// A results document is missing or mistypes a required field.
struct SchemaError : SimError {
  using SimError::SimError;
};

// Nearest double with the given number of significant decimal digits.
double round_sig(double x, int digits);

// Model-parameter echo / override surface. Overrides are partial: absent
// keys keep the base value; unknown keys are rejected by field path.
std::string params_to_json(const ModelParams& params);
ModelParams params_from_json_text(const std::string& text, const ModelParams& base);
ModelParams load_params_file(const std::string& path, const ModelParams& base);

// Results document: {"schema", "config", "cells", "ranking"}, floats at
// 6 significant digits. config.timestamp is the only run-variant field.
std::string results_to_json(const RunReport& report);
void write_results_file(const RunReport& report, const std::string& path);

struct ParsedMetrics {
  double mean_bandwidth_kbps = 0.0;
  double mean_latency_ms = 0.0;
  double mean_efficiency = 0.0;
  double success_rate = 0.0;
  double std_bandwidth = 0.0;
  double std_latency = 0.0;
  double std_efficiency = 0.0;
  std::size_t circuit_count = 0;
  double mean_build_time_us = 0.0;
};

struct ParsedCell {
  int scenario_id = 0;
  std::string scenario_label;
  std::string strategy;
  std::size_t users = 0;
  std::size_t relays = 0;
  std::size_t circuits = 0;
  ParsedMetrics metrics;
};

struct ParsedResults {
  std::uint64_t seed = 0;
  double scale = 1.0;
  std::string timestamp;
  std::vector<ParsedCell> cells;
  std::vector<std::pair<std::string, double>> ranking;
};

// Throws SchemaError naming the first missing/mistyped field.
ParsedResults parse_results(const std::string& text);
ParsedResults load_results_file(const std::string& path);

enum class LogFormat { Jsonl, Csv };

// One row per circuit across all cells; requires run_matrix keep_circuits.
void write_circuit_log(const RunReport& report, const std::string& path,
                       LogFormat format);
void write_circuit_log(const RunReport& report, std::ostream& out, LogFormat format);

// Per-cell metric table plus the efficiency ranking.
void render_run_summary(std::ostream& out, const RunReport& report);

// Cross-scenario per-strategy averages (the comparative headline table).
void render_strategy_averages(std::ostream& out, const ParsedResults& results);

// Long-form rows: scenario_id,strategy,metric,value.
void write_tidy_csv(std::ostream& out, const ParsedResults& results);

// Results text with the timestamp value blanked; lets callers compare two
// runs for bytewise equality net of the clock.
std::string without_timestamp(const std::string& results_text);

}  // namespace torsim
