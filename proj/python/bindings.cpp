#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "torsim/harness.hpp"
#include "torsim/results_io.hpp"

namespace py = pybind11;
using namespace torsim;

namespace {

py::dict circuit_to_dict(const Circuit& c) {
  py::dict d;
  d["guard_id"] = c.guard_id;
  d["middle_id"] = c.middle_id;
  d["exit_id"] = c.exit_id;
  d["strategy"] = to_string(c.strategy);
  d["bandwidth_kbps"] = c.bandwidth_kbps;
  d["latency_ms"] = c.latency_ms;
  d["efficiency"] = c.efficiency;
  d["c_guard"] = c.congestion[0];
  d["c_middle"] = c.congestion[1];
  d["c_exit"] = c.congestion[2];
  d["build_time_us"] = c.build_time_us;
  d["success"] = c.success;
  return d;
}

std::vector<ScenarioSpec> scenarios_by_ids(const std::vector<int>& ids) {
  if (ids.empty()) return default_scenarios();
  std::vector<ScenarioSpec> out;
  for (const auto& s : default_scenarios())
    for (int id : ids)
      if (s.scenario_id == id) out.push_back(s);
  if (out.size() != ids.size())
    throw std::invalid_argument("unknown scenario id in list");
  return out;
}

std::vector<StrategyKind> strategies_by_names(const std::vector<std::string>& names) {
  if (names.empty())
    return {all_strategies().begin(), all_strategies().end()};
  std::vector<StrategyKind> out;
  for (const auto& n : names) out.push_back(strategy_from_string(n));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Deterministic Tor-style path-selection simulator core";
  m.attr("__version__") = "0.1.0";

  py::register_exception<SimError>(m, "SimError");

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<>())
      .def_readwrite("retry_budget", &ModelParams::retry_budget)
      .def_readwrite("epoch_circuits", &ModelParams::epoch_circuits)
      .def_readwrite("target_port", &ModelParams::target_port)
      .def("validate", &ModelParams::validate)
      .def("to_json", [](const ModelParams& p) { return params_to_json(p); })
      .def_static("from_json", [](const std::string& text) {
        return params_from_json_text(text, ModelParams{});
      });

  py::class_<ScenarioSpec>(m, "ScenarioSpec")
      .def_readonly("scenario_id", &ScenarioSpec::scenario_id)
      .def_readonly("users", &ScenarioSpec::users)
      .def_readonly("relays", &ScenarioSpec::relays)
      .def_readonly("circuits", &ScenarioSpec::circuits)
      .def_readonly("label", &ScenarioSpec::label);

  py::class_<NetworkTopology>(m, "NetworkTopology")
      .def_property_readonly("n_relays", &NetworkTopology::n_relays)
      .def_property_readonly("seed",
                             [](const NetworkTopology& t) { return t.seed; })
      .def("role_count",
           [](const NetworkTopology& t, const std::string& role) {
             return t.ids_with_role(role_from_string(role)).size();
           })
      .def("to_json", [](const NetworkTopology& t) { return topology_to_json(t); });

  m.def("strategy_names", [] {
    std::vector<std::string> names;
    for (StrategyKind k : all_strategies()) names.emplace_back(to_string(k));
    return names;
  });
  m.def("default_scenarios", &default_scenarios);
  m.def("bottleneck_bandwidth", &bottleneck_bandwidth, py::arg("guard_kbps"),
        py::arg("middle_kbps"), py::arg("exit_kbps"));
  m.def("circuit_efficiency", &circuit_efficiency, py::arg("bandwidth_kbps"),
        py::arg("latency_ms"));
  m.def(
      "region_latency",
      [](const std::string& a, const std::string& b) {
        return LatencyMatrix::defaults().at(region_from_string(a),
                                            region_from_string(b));
      },
      py::arg("region_a"), py::arg("region_b"),
      "inter-region latency (ms) under the default matrix");
  m.def(
      "generate_topology",
      [](std::size_t n_relays, std::uint64_t seed) {
        return generate_topology(n_relays, seed, ModelParams{});
      },
      py::arg("n_relays"), py::arg("seed"));
  m.def(
      "build_circuits",
      [](std::size_t n_relays, std::uint64_t seed, const std::string& strategy,
         std::size_t count) {
        const ModelParams params;
        NetworkTopology topo = generate_topology(n_relays, seed, params);
        update_congestion(topo, 25.0, 0, params);
        SelectionContext ctx(topo, params, mix_seeds(seed, 1));
        const StrategyKind kind = strategy_from_string(strategy);
        py::list out;
        for (std::size_t i = 0; i < count; ++i)
          out.append(circuit_to_dict(ctx.select(kind)));
        return out;
      },
      py::arg("n_relays"), py::arg("seed"), py::arg("strategy"), py::arg("count"),
      "build circuits against a fresh topology at moderate load");
  m.def(
      "run_matrix_json",
      [](std::uint64_t seed, double scale, const std::vector<int>& scenario_ids,
         const std::vector<std::string>& strategies) {
        const RunReport report =
            run_matrix(scenarios_by_ids(scenario_ids), strategies_by_names(strategies),
                       seed, scale, ModelParams{}, /*keep_circuits=*/false);
        return results_to_json(report);
      },
      py::arg("seed"), py::arg("scale"), py::arg("scenario_ids") = std::vector<int>{},
      py::arg("strategies") = std::vector<std::string>{},
      "full evaluation matrix; returns the results document as JSON text");
}
