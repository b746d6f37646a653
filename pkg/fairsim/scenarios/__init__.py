"""Declarative scenarios, single runs and parameter sweeps."""

from fairsim.scenarios.config import (
    ScenarioConfig,
    bundled_scenarios,
    load_scenario,
    parse_scenario,
    validate_topology,
)
from fairsim.scenarios.errors import ScenarioError, ScenarioValidationError, SweepError, TopologyError
from fairsim.scenarios.outputs import read_races, read_report, write_outputs
from fairsim.scenarios.runner import ScenarioResult, run_scenario
from fairsim.scenarios.simulation import ExchangeSimulation
from fairsim.scenarios.sweep import SweepTable, check_parameter, set_parameter, sweep

__all__ = [
    "ScenarioConfig",
    "bundled_scenarios",
    "load_scenario",
    "parse_scenario",
    "validate_topology",
    "ScenarioError",
    "ScenarioValidationError",
    "SweepError",
    "TopologyError",
    "read_races",
    "read_report",
    "write_outputs",
    "ScenarioResult",
    "run_scenario",
    "ExchangeSimulation",
    "SweepTable",
    "check_parameter",
    "set_parameter",
    "sweep",
]
