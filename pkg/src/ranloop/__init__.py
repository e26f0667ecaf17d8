"""ranloop: deterministic 5G NR mobility-control simulator.

Implements traditional and conditional handover state machines, A3/A4
measurement events, an anti-ping-pong xApp over an in-process E2-style
bus, an RRC.ConnMean collector, and a hook-governed campaign runner.
"""

from .inventory import Inventory, load_inventory, select_pair, serialize
from .scenario import ScenarioConfig, load_scenario
from .sim import RunArtifacts, Simulation, check_milestones, run

__version__ = "0.1.0"

__all__ = [
    "Inventory",
    "RunArtifacts",
    "ScenarioConfig",
    "Simulation",
    "check_milestones",
    "load_inventory",
    "load_scenario",
    "run",
    "select_pair",
    "serialize",
    "__version__",
]
