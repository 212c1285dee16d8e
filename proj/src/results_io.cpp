#include "torsim/results_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <regex>
#include <sstream>

#include "json.hpp"

namespace torsim {

using nlohmann::json;

double round_sig(double x, int digits) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
  return std::strtod(buf, nullptr);
}

namespace {

constexpr const char* kResultsSchema = "torsim-results/1";
constexpr int kSigDigits = 6;

double r6(double x) { return round_sig(x, kSigDigits); }

const char* role_key(int role_ix) {
  switch (role_ix) {
    case 0: return "guard";
    case 1: return "middle";
    case 2: return "exit";
  }
  return "?";
}

[[noreturn]] void missing(const std::string& path) {
  throw SchemaError("missing field '" + path + "'");
}

const json& need(const json& j, const char* key, const std::string& path) {
  const auto it = j.find(key);
  if (it == j.end()) missing(path.empty() ? key : path + "." + key);
  return *it;
}

template <typename T>
T need_as(const json& j, const char* key, const std::string& path) {
  const json& v = need(j, key, path);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw SchemaError("field '" + (path.empty() ? key : path + "." + key) +
                      "' has the wrong type");
  }
}

json latency_to_json(const LatencyMatrix& m) {
  json rows = json::array();
  for (int a = 0; a < kRegionCount; ++a) {
    json row = json::array();
    for (int b = 0; b < kRegionCount; ++b)
      row.push_back(m.at(static_cast<RegionId>(a), static_cast<RegionId>(b)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json params_to_json_obj(const ModelParams& p) {
  json j;
  for (int r = 0; r < 3; ++r) {
    j["bandwidth"][role_key(r)] = {{"median_kbps", p.bandwidth[r].median_kbps},
                                   {"sigma_ln", p.bandwidth[r].sigma_ln}};
    j["uptime_mean_hours"][role_key(r)] = p.uptime_mean_hours[r];
  }
  j["stability_pivot_hours"] = p.stability_pivot_hours;
  j["region_probs"] = p.region_probs;
  j["latency_ms"] = latency_to_json(p.latency);
  j["congestion"] = {{"base", p.congestion.base},
                     {"load_slope", p.congestion.load_slope},
                     {"mean_min", p.congestion.mean_min},
                     {"mean_max", p.congestion.mean_max},
                     {"concentration", p.congestion.concentration},
                     {"exclude_threshold", p.congestion.exclude_threshold}};
  j["retry_budget"] = p.retry_budget;
  j["epoch_circuits"] = p.epoch_circuits;
  j["as_pool_divisor"] = p.as_pool_divisor;
  j["subnet_pool_divisor"] = p.subnet_pool_divisor;
  j["guard_fraction"] = p.guard_fraction;
  j["exit_fraction"] = p.exit_fraction;
  j["guard_set_size"] = p.guard_set_size;
  j["guard_bandwidth_weight"] = p.guard_bandwidth_weight;
  j["target_port"] = p.target_port;
  return j;
}

void apply_params_overrides(const json& j, ModelParams& p, const std::string& path);

void apply_bandwidth(const json& j, ModelParams& p, const std::string& path) {
  for (const auto& [key, val] : j.items()) {
    int r = -1;
    for (int i = 0; i < 3; ++i)
      if (key == role_key(i)) r = i;
    if (r < 0) throw SchemaError("unknown field '" + path + "." + key + "'");
    for (const auto& [k2, v2] : val.items()) {
      if (k2 == "median_kbps")
        p.bandwidth[r].median_kbps = v2.get<double>();
      else if (k2 == "sigma_ln")
        p.bandwidth[r].sigma_ln = v2.get<double>();
      else
        throw SchemaError("unknown field '" + path + "." + key + "." + k2 + "'");
    }
  }
}

void apply_params_overrides(const json& j, ModelParams& p, const std::string& path) {
  for (const auto& [key, val] : j.items()) {
    const std::string here = path.empty() ? key : path + "." + key;
    if (key == "bandwidth") {
      apply_bandwidth(val, p, here);
    } else if (key == "uptime_mean_hours") {
      for (const auto& [k2, v2] : val.items()) {
        int r = -1;
        for (int i = 0; i < 3; ++i)
          if (k2 == role_key(i)) r = i;
        if (r < 0) throw SchemaError("unknown field '" + here + "." + k2 + "'");
        p.uptime_mean_hours[r] = v2.get<double>();
      }
    } else if (key == "stability_pivot_hours") {
      p.stability_pivot_hours = val.get<double>();
    } else if (key == "region_probs") {
      p.region_probs = val.get<std::array<double, kRegionCount>>();
    } else if (key == "latency_ms") {
      for (int a = 0; a < kRegionCount; ++a)
        for (int b = 0; b < kRegionCount; ++b)
          p.latency.set(static_cast<RegionId>(a), static_cast<RegionId>(b),
                        val.at(a).at(b).get<double>());
    } else if (key == "congestion") {
      for (const auto& [k2, v2] : val.items()) {
        if (k2 == "base") p.congestion.base = v2.get<double>();
        else if (k2 == "load_slope") p.congestion.load_slope = v2.get<double>();
        else if (k2 == "mean_min") p.congestion.mean_min = v2.get<double>();
        else if (k2 == "mean_max") p.congestion.mean_max = v2.get<double>();
        else if (k2 == "concentration") p.congestion.concentration = v2.get<double>();
        else if (k2 == "exclude_threshold")
          p.congestion.exclude_threshold = v2.get<double>();
        else
          throw SchemaError("unknown field '" + here + "." + k2 + "'");
      }
    } else if (key == "retry_budget") {
      p.retry_budget = val.get<int>();
    } else if (key == "epoch_circuits") {
      p.epoch_circuits = val.get<int>();
    } else if (key == "as_pool_divisor") {
      p.as_pool_divisor = val.get<int>();
    } else if (key == "subnet_pool_divisor") {
      p.subnet_pool_divisor = val.get<int>();
    } else if (key == "guard_fraction") {
      p.guard_fraction = val.get<double>();
    } else if (key == "exit_fraction") {
      p.exit_fraction = val.get<double>();
    } else if (key == "guard_set_size") {
      p.guard_set_size = val.get<int>();
    } else if (key == "guard_bandwidth_weight") {
      p.guard_bandwidth_weight = val.get<double>();
    } else if (key == "target_port") {
      p.target_port = val.get<std::uint16_t>();
    } else {
      throw SchemaError("unknown field '" + here + "'");
    }
  }
}

json metrics_to_json(const AggregateMetrics& m) {
  return {{"mean_bandwidth_kbps", r6(m.mean_bandwidth_kbps)},
          {"mean_latency_ms", r6(m.mean_latency_ms)},
          {"mean_efficiency", r6(m.mean_efficiency)},
          {"success_rate", r6(m.success_rate)},
          {"std_bandwidth", r6(m.std_bandwidth)},
          {"std_latency", r6(m.std_latency)},
          {"std_efficiency", r6(m.std_efficiency)},
          {"circuit_count", m.circuit_count},
          {"mean_build_time_us", r6(m.mean_build_time_us)}};
}

}  // namespace

std::string params_to_json(const ModelParams& params) {
  return params_to_json_obj(params).dump(2);
}

ModelParams params_from_json_text(const std::string& text, const ModelParams& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("config root must be a JSON object");
  ModelParams p = base;
  try {
    apply_params_overrides(j, p, "");
  } catch (const json::exception& e) {
    throw SchemaError(std::string("config field has the wrong shape: ") + e.what());
  }
  p.validate();
  return p;
}

ModelParams load_params_file(const std::string& path, const ModelParams& base) {
  std::ifstream in(path);
  if (!in) throw SimError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return params_from_json_text(ss.str(), base);
}

std::string results_to_json(const RunReport& report) {
  json j;
  j["schema"] = kResultsSchema;
  json& cfg = j["config"];
  cfg["seed"] = report.seed;
  cfg["scale"] = report.scale;
  cfg["timestamp"] = report.timestamp;
  cfg["strategies"] = json::array();
  for (StrategyKind k : report.strategies) cfg["strategies"].push_back(to_string(k));
  cfg["scenarios"] = json::array();
  for (const auto& s : report.scenarios)
    cfg["scenarios"].push_back({{"id", s.scenario_id},
                                {"label", s.label},
                                {"users", s.users},
                                {"relays", s.relays},
                                {"circuits", s.circuits}});
  cfg["model"] = params_to_json_obj(report.params);

  j["cells"] = json::array();
  for (const auto& c : report.cells)
    j["cells"].push_back({{"scenario_id", c.scenario_id},
                          {"scenario_label", c.scenario_label},
                          {"strategy", to_string(c.strategy)},
                          {"users", c.users},
                          {"relays", c.relays},
                          {"circuits", c.circuits_requested},
                          {"metrics", metrics_to_json(c.metrics)}});

  j["ranking"] = json::array();
  for (const auto& r : report.ranking)
    j["ranking"].push_back(
        {{"strategy", to_string(r.strategy)}, {"mean_efficiency", r6(r.mean_efficiency)}});
  return j.dump(2) + "\n";
}

void write_results_file(const RunReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SimError("cannot open output file: " + path);
  out << results_to_json(report);
  if (!out) throw SimError("failed writing output file: " + path);
}

ParsedResults parse_results(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("results file is not valid JSON: ") + e.what());
  }
  if (need_as<std::string>(j, "schema", "") != kResultsSchema)
    throw SchemaError("field 'schema' must be \"" + std::string(kResultsSchema) + "\"");

  ParsedResults out;
  const json& cfg = need(j, "config", "");
  out.seed = need_as<std::uint64_t>(cfg, "seed", "config");
  out.scale = need_as<double>(cfg, "scale", "config");
  out.timestamp = need_as<std::string>(cfg, "timestamp", "config");

  const json& cells = need(j, "cells", "");
  if (!cells.is_array()) throw SchemaError("field 'cells' has the wrong type");
  std::size_t i = 0;
  for (const json& c : cells) {
    const std::string path = "cells[" + std::to_string(i) + "]";
    ParsedCell pc;
    pc.scenario_id = need_as<int>(c, "scenario_id", path);
    pc.scenario_label = need_as<std::string>(c, "scenario_label", path);
    pc.strategy = need_as<std::string>(c, "strategy", path);
    pc.users = need_as<std::size_t>(c, "users", path);
    pc.relays = need_as<std::size_t>(c, "relays", path);
    pc.circuits = need_as<std::size_t>(c, "circuits", path);
    const json& m = need(c, "metrics", path);
    const std::string mp = path + ".metrics";
    pc.metrics.mean_bandwidth_kbps = need_as<double>(m, "mean_bandwidth_kbps", mp);
    pc.metrics.mean_latency_ms = need_as<double>(m, "mean_latency_ms", mp);
    pc.metrics.mean_efficiency = need_as<double>(m, "mean_efficiency", mp);
    pc.metrics.success_rate = need_as<double>(m, "success_rate", mp);
    pc.metrics.std_bandwidth = need_as<double>(m, "std_bandwidth", mp);
    pc.metrics.std_latency = need_as<double>(m, "std_latency", mp);
    pc.metrics.std_efficiency = need_as<double>(m, "std_efficiency", mp);
    pc.metrics.circuit_count = need_as<std::size_t>(m, "circuit_count", mp);
    pc.metrics.mean_build_time_us = need_as<double>(m, "mean_build_time_us", mp);
    out.cells.push_back(std::move(pc));
    ++i;
  }

  const json& ranking = need(j, "ranking", "");
  if (!ranking.is_array()) throw SchemaError("field 'ranking' has the wrong type");
  i = 0;
  for (const json& r : ranking) {
    const std::string path = "ranking[" + std::to_string(i) + "]";
    out.ranking.emplace_back(need_as<std::string>(r, "strategy", path),
                             need_as<double>(r, "mean_efficiency", path));
    ++i;
  }
  return out;
}

ParsedResults load_results_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SimError("cannot open results file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_results(ss.str());
}

namespace {

json circuit_row(int scenario_id, const Circuit& c) {
  return {{"scenario_id", scenario_id},
          {"strategy", to_string(c.strategy)},
          {"guard_id", c.guard_id},
          {"middle_id", c.middle_id},
          {"exit_id", c.exit_id},
          {"bandwidth_kbps", r6(c.bandwidth_kbps)},
          {"latency_ms", r6(c.latency_ms)},
          {"efficiency", r6(c.efficiency)},
          {"c_guard", r6(c.congestion[0])},
          {"c_middle", r6(c.congestion[1])},
          {"c_exit", r6(c.congestion[2])},
          {"build_time_us", c.build_time_us},
          {"success", c.success}};
}

void csv_number(std::ostream& out, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  out << buf;
}

}  // namespace

void write_circuit_log(const RunReport& report, std::ostream& out, LogFormat format) {
  if (format == LogFormat::Csv)
    out << "scenario_id,strategy,guard_id,middle_id,exit_id,bandwidth_kbps,"
           "latency_ms,efficiency,c_guard,c_middle,c_exit,build_time_us,success\n";
  for (const auto& cell : report.cells) {
    for (const auto& c : cell.circuits) {
      if (format == LogFormat::Jsonl) {
        out << circuit_row(cell.scenario_id, c).dump() << "\n";
      } else {
        out << cell.scenario_id << ',' << to_string(c.strategy) << ',' << c.guard_id
            << ',' << c.middle_id << ',' << c.exit_id << ',';
        csv_number(out, c.bandwidth_kbps);
        out << ',';
        csv_number(out, c.latency_ms);
        out << ',';
        csv_number(out, c.efficiency);
        out << ',';
        csv_number(out, c.congestion[0]);
        out << ',';
        csv_number(out, c.congestion[1]);
        out << ',';
        csv_number(out, c.congestion[2]);
        out << ',' << c.build_time_us << ',' << (c.success ? "true" : "false")
            << "\n";
      }
    }
  }
}

void write_circuit_log(const RunReport& report, const std::string& path,
                       LogFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SimError("cannot open log file: " + path);
  write_circuit_log(report, out, format);
  if (!out) throw SimError("failed writing log file: " + path);
}

void render_run_summary(std::ostream& out, const RunReport& report) {
  out << "cells (seed " << report.seed << ", scale " << report.scale << "):\n";
  char line[160];
  std::snprintf(line, sizeof(line), "  %-4s %-18s %10s %10s %10s %9s\n", "sc",
                "strategy", "B_kbps", "L_ms", "E", "success");
  out << line;
  for (const auto& c : report.cells) {
    std::snprintf(line, sizeof(line), "  %-4d %-18s %10.1f %10.1f %10.3f %8.1f%%\n",
                  c.scenario_id, to_string(c.strategy), c.metrics.mean_bandwidth_kbps,
                  c.metrics.mean_latency_ms, c.metrics.mean_efficiency,
                  100.0 * c.metrics.success_rate);
    out << line;
  }
  out << "efficiency ranking:\n";
  int place = 1;
  for (const auto& r : report.ranking) {
    std::snprintf(line, sizeof(line), "  %d. %-18s %8.3f\n", place++,
                  to_string(r.strategy), r.mean_efficiency);
    out << line;
  }
}

void render_strategy_averages(std::ostream& out, const ParsedResults& results) {
  struct Acc {
    double b = 0, l = 0, e = 0, s = 0;
    std::size_t n = 0;
  };
  std::map<std::string, Acc> acc;
  for (const auto& c : results.cells) {
    Acc& a = acc[c.strategy];
    a.b += c.metrics.mean_bandwidth_kbps;
    a.l += c.metrics.mean_latency_ms;
    a.e += c.metrics.mean_efficiency;
    a.s += c.metrics.success_rate;
    ++a.n;
  }
  std::vector<std::pair<std::string, Acc>> rows(acc.begin(), acc.end());
  std::sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
    return x.second.e / static_cast<double>(x.second.n) >
           y.second.e / static_cast<double>(y.second.n);
  });
  char line[160];
  std::snprintf(line, sizeof(line), "%-18s %12s %10s %10s %9s\n", "strategy",
                "avg_B_kbps", "avg_L_ms", "avg_E", "success");
  out << line;
  for (const auto& [name, a] : rows) {
    const auto n = static_cast<double>(a.n);
    std::snprintf(line, sizeof(line), "%-18s %12.1f %10.1f %10.3f %8.1f%%\n",
                  name.c_str(), a.b / n, a.l / n, a.e / n, 100.0 * a.s / n);
    out << line;
  }
}

void write_tidy_csv(std::ostream& out, const ParsedResults& results) {
  out << "scenario_id,strategy,metric,value\n";
  for (const auto& c : results.cells) {
    const auto& m = c.metrics;
    const std::pair<const char*, double> metrics[] = {
        {"mean_bandwidth_kbps", m.mean_bandwidth_kbps},
        {"mean_latency_ms", m.mean_latency_ms},
        {"mean_efficiency", m.mean_efficiency},
        {"success_rate", m.success_rate},
        {"std_bandwidth", m.std_bandwidth},
        {"std_latency", m.std_latency},
        {"std_efficiency", m.std_efficiency},
        {"circuit_count", static_cast<double>(m.circuit_count)},
        {"mean_build_time_us", m.mean_build_time_us},
    };
    for (const auto& [name, value] : metrics) {
      out << c.scenario_id << ',' << c.strategy << ',' << name << ',';
      csv_number(out, value);
      out << "\n";
    }
  }
}

std::string without_timestamp(const std::string& results_text) {
  static const std::regex ts_re("(\"timestamp\"\\s*:\\s*\")[^\"]*(\")");
  return std::regex_replace(results_text, ts_re, "$1$2");
}

}  // namespace torsim
