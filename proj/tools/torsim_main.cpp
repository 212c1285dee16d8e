#include <algorithm>
#include <cstdint>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "torsim/harness.hpp"
#include "torsim/results_io.hpp"

namespace {

using namespace torsim;

// Exit codes: 0 success, 1 usage error, 2 runtime failure.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<StrategyKind> parse_strategies(const std::vector<std::string>& tokens) {
  std::vector<StrategyKind> out;
  for (const auto& t : tokens) {
    if (t == "all") {
      for (StrategyKind k : all_strategies())
        out.push_back(k);
      continue;
    }
    try {
      out.push_back(strategy_from_string(t));
    } catch (const std::invalid_argument&) {
      throw UsageError("unknown strategy: " + t);
    }
  }
  // Dedup, first occurrence wins.
  std::vector<StrategyKind> uniq;
  for (StrategyKind k : out)
    if (std::find(uniq.begin(), uniq.end(), k) == uniq.end()) uniq.push_back(k);
  return uniq;
}

std::vector<ScenarioSpec> parse_scenarios(const std::vector<std::string>& tokens) {
  const auto defaults = default_scenarios();
  std::set<int> ids;
  bool all = false;
  for (const auto& t : tokens) {
    if (t == "all") {
      all = true;
      continue;
    }
    int id = 0;
    try {
      std::size_t used = 0;
      id = std::stoi(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw UsageError("unknown scenario: " + t);
    }
    const bool known = std::any_of(defaults.begin(), defaults.end(),
                                   [id](const auto& s) { return s.scenario_id == id; });
    if (!known) throw UsageError("unknown scenario: " + t);
    ids.insert(id);
  }
  if (all || ids.empty()) return defaults;
  std::vector<ScenarioSpec> out;
  for (const auto& s : defaults)
    if (ids.count(s.scenario_id)) out.push_back(s);
  return out;
}

std::string default_log_path(const std::string& out_path, LogFormat format) {
  std::string stem = out_path;
  const auto dot = stem.rfind(".json");
  if (dot != std::string::npos && dot == stem.size() - 5) stem.resize(dot);
  return stem + (format == LogFormat::Jsonl ? ".circuits.jsonl" : ".circuits.csv");
}

struct RunOptions {
  std::vector<std::string> scenario_tokens{"all"};
  std::vector<std::string> strategy_tokens{"all"};
  std::uint64_t seed = 42;
  double scale = 1.0;
  std::string out_path = "results.json";
  bool log_circuits = false;
  std::string log_format = "jsonl";
  std::string config_path;
};

int do_run(const RunOptions& opt) {
  if (!(opt.scale > 0.0) || opt.scale > 1.0)
    throw UsageError("--scale must be in (0, 1]");
  const auto strategies = parse_strategies(opt.strategy_tokens);
  const auto scenarios = parse_scenarios(opt.scenario_tokens);
  LogFormat format = LogFormat::Jsonl;
  if (opt.log_format == "csv")
    format = LogFormat::Csv;
  else if (opt.log_format != "jsonl")
    throw UsageError("--log-format must be jsonl or csv");

  ModelParams params;
  if (!opt.config_path.empty()) params = load_params_file(opt.config_path, params);

  RunReport report = run_matrix(scenarios, strategies, opt.seed, opt.scale, params,
                                /*keep_circuits=*/opt.log_circuits);
  write_results_file(report, opt.out_path);
  if (opt.log_circuits)
    write_circuit_log(report, default_log_path(opt.out_path, format), format);
  render_run_summary(std::cout, report);
  std::cout << "results written to " << opt.out_path << "\n";
  return 0;
}

int do_report(const std::string& path, const std::string& format) {
  if (format != "summary" && format != "csv")
    throw UsageError("--format must be summary or csv");
  const ParsedResults results = load_results_file(path);
  if (format == "summary")
    render_strategy_averages(std::cout, results);
  else
    write_tidy_csv(std::cout, results);
  return 0;
}

int do_scenarios() {
  std::cout << "id  label                      users     relays  circuits  load\n";
  for (const auto& s : default_scenarios()) {
    char line[120];
    std::snprintf(line, sizeof(line), "%-3d %-24s %8zu %10zu %9zu %5.0f\n",
                  s.scenario_id, s.label.c_str(), s.users, s.relays, s.circuits,
                  static_cast<double>(s.users) / static_cast<double>(s.relays));
    std::cout << line;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic path-selection strategy benchmark"};
  app.require_subcommand(1);

  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "run the scenario x strategy matrix");
  run->add_option("--scenario", run_opt.scenario_tokens,
                  "scenario ids (1..5) or 'all'")
      ->delimiter(',');
  run->add_option("--strategy", run_opt.strategy_tokens,
                  "strategy names or 'all'")
      ->delimiter(',');
  run->add_option("--seed", run_opt.seed, "rng seed");
  run->add_option("--scale", run_opt.scale, "shrink factor in (0,1]");
  run->add_option("--out", run_opt.out_path, "results JSON path");
  run->add_flag("--log-circuits", run_opt.log_circuits,
                "write a per-circuit sidecar log next to --out");
  run->add_option("--log-format", run_opt.log_format, "jsonl or csv");
  run->add_option("--config", run_opt.config_path,
                  "JSON file with model parameter overrides");

  std::string report_path;
  std::string report_format = "summary";
  auto* rep = app.add_subcommand("report", "summarize a results file");
  rep->add_option("results", report_path, "results JSON path")->required();
  rep->add_option("--format", report_format, "summary or csv");

  auto* scen = app.add_subcommand("scenarios", "list the evaluation scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // normalize CLI11's parse-error codes
  }

  try {
    if (run->parsed()) return do_run(run_opt);
    if (rep->parsed()) return do_report(report_path, report_format);
    if (scen->parsed()) return do_scenarios();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
