"""Shared fixtures: compact scenario builders and rigged damage rolls."""

import pytest

from poac.engine import Action, EngineState
from poac.hexgrid import GameMap, HexCoord
from poac.scenarios import ScenarioConfig, validate


def flat_config(
    rows=13,
    cols=23,
    red=((1, 7), (1, 11), (1, 15)),
    blue=((11, 7), (11, 11), (11, 15)),
    special_cells=(),
    **kwargs,
) -> ScenarioConfig:
    """A scenario on an all-normal map with explicit positions."""
    m = GameMap(rows, cols)
    for r, c in special_cells:
        m.terrain[m.linear_index(HexCoord(r, c))] = 1
    cfg = ScenarioConfig(
        name="test",
        game_map=m,
        init_red=tuple(HexCoord(*p) for p in red),
        init_blue=tuple(HexCoord(*p) for p in blue),
        special_terrain=bool(special_cells),
        **kwargs,
    )
    validate(cfg)
    return cfg


def step_with(engine: EngineState, moves=None) -> object:
    """Step the engine, filling every undirected decidable operator with Stop."""
    moves = moves or {}
    actions = {}
    for uid in engine.decidable_uids():
        actions[uid] = moves.get(uid, Action.stop())
    return engine.step(actions)


class ForcedRolls:
    """Damage-roll stub: serves a fixed sequence (cycled) regardless of team."""

    def __init__(self, *values: float):
        self.values = values or (0.0,)
        self.count = 0

    def __call__(self, color: int) -> float:
        v = self.values[self.count % len(self.values)]
        self.count += 1
        return v


@pytest.fixture
def duel_config():
    """Red tank at (0,0) vs blue team strung out along row 0."""
    return flat_config(
        rows=13,
        cols=23,
        red=((0, 0), (5, 0), (6, 0)),
        blue=((0, 9), (5, 22), (6, 22)),
    )
