"""poac: a deterministic, seedable two-team hex wargame simulation.

Red and blue teams of heterogeneous operators (tank, chariot, infantry)
fight on a bounded hex map with hidden terrain, asynchronous movement,
stochastic damage, and a guide-shoot cooperation mechanic.  The package
ships six bundled scenarios, three scripted opponents, per-agent
observations and action masks for learning agents, bit-exact replays,
a match service with a wire protocol, and a CLI.
"""

__version__ = "0.1.0"

from .engine import Action, EngineState, StepResult, reset
from .hexgrid import GameMap, HexCoord, hex_distance, load_map, neighbors, save_map, shortest_path
from .scenarios import ScenarioConfig, apply_override, load_scenario

__all__ = [
    "Action",
    "EngineState",
    "GameMap",
    "HexCoord",
    "ScenarioConfig",
    "StepResult",
    "apply_override",
    "hex_distance",
    "load_map",
    "load_scenario",
    "neighbors",
    "reset",
    "save_map",
    "shortest_path",
    "__version__",
]
