"""Deterministic Tor-style path-selection simulator (python surface).

Thin re-export of the compiled core; see the package README for the model
and the command-line interface.
"""

from ._core import (
    ModelParams,
    NetworkTopology,
    ScenarioSpec,
    SimError,
    __version__,
    bottleneck_bandwidth,
    build_circuits,
    circuit_efficiency,
    default_scenarios,
    generate_topology,
    region_latency,
    run_matrix_json,
    strategy_names,
)

__all__ = [
    "ModelParams",
    "NetworkTopology",
    "ScenarioSpec",
    "SimError",
    "__version__",
    "bottleneck_bandwidth",
    "build_circuits",
    "circuit_efficiency",
    "default_scenarios",
    "generate_topology",
    "region_latency",
    "run_matrix_json",
    "strategy_names",
]
