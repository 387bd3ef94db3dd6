"""Scenario corpus: generated case-study programs and experiment matrices."""

from timebound.scenarios.bridge import BridgeSpec, gen_bridge, gen_bridge_unconstrained
from timebound.scenarios.matrix import (
    DEFAULT_BRIDGE_DEADLINE,
    DEFAULT_BRIDGE_TIMES,
    DEFAULT_RATES,
    ScenarioReport,
    ScenarioRow,
    format_report,
    percent_label,
    run_bridge,
    run_matrix,
)
from timebound.scenarios.oximeter import ERROR_MODELS, WCET_TABLE, OximeterSpec, gen_oximeter

__all__ = [
    "BridgeSpec",
    "DEFAULT_BRIDGE_DEADLINE",
    "DEFAULT_BRIDGE_TIMES",
    "DEFAULT_RATES",
    "ERROR_MODELS",
    "OximeterSpec",
    "ScenarioReport",
    "ScenarioRow",
    "WCET_TABLE",
    "format_report",
    "gen_bridge",
    "gen_bridge_unconstrained",
    "gen_oximeter",
    "percent_label",
    "run_bridge",
    "run_matrix",
]
