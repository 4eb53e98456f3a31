"""Per-agent observations, the centralised global state, and feature layout.

Every feature is normalized into [0, 1].  An agent always sees its whole
team; an enemy's block is filled only while that enemy is alive and
inside the agent's sight, otherwise it stays all-zero.  Dead operators
read as all-zero everywhere.  The global state applies no sight masking
and is meant for centralised training only.

Vector layout for a team size of 3 (the bundled roster):

    ally block   x3   14 each: color, id, type, cur_hex, blood,
                      move_time, stop_time, shoot_cooling_time,
                      can_see x3, can_attack x3
    enemy block  x3    5 each: color, id, type, cur_hex, blood
    time_step    x1

giving 58 entries; the global state holds the 14-feature block for all
six operators plus the clock, 85 entries.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import EngineState
from .hexgrid import GameMap, HexCoord
from .units import BLUE, COLOR_NAMES, RED, TYPE_NAMES


def _norms(st: EngineState):
    cells = max(1, st.game_map.rows * st.game_map.cols - 1)
    ticks = max(1, st.config.max_ticks)
    ids = max(1, len(st.ops) - 1)
    types = max(1, len(TYPE_NAMES) - 1)
    return cells, ticks, ids, types


def _owner_block(st: EngineState, uid: int) -> list[float]:
    """The 14-feature block describing one operator, from its own seat."""
    op = st.ops[uid]
    n = st.team_size
    if not op.alive:
        return [0.0] * (8 + 2 * n)
    cells, ticks, ids, types = _norms(st)
    block = [
        float(op.color),
        op.uid / ids,
        op.spec.op_type / types,
        st.game_map.linear_index(op.pos) / cells,
        op.blood / op.spec.blood,
        op.move_time / ticks,
        op.stop_time / ticks,
        op.shoot_cooling_time / ticks,
    ]
    base = st.enemy_base_uid(op.color)
    sees = [0.0] * n
    attacks = [0.0] * n
    for slot in range(n):
        enemy = st.ops[base + slot]
        if enemy.alive and st.visibility(uid, enemy.uid):
            sees[slot] = 1.0
            if st.can_attack(uid, enemy.uid):
                attacks[slot] = 1.0
    return block + sees + attacks


def _enemy_block(st: EngineState, uid: int) -> list[float]:
    op = st.ops[uid]
    cells, _, ids, types = _norms(st)
    return [
        float(op.color),
        op.uid / ids,
        op.spec.op_type / types,
        st.game_map.linear_index(op.pos) / cells,
        op.blood / op.spec.blood,
    ]


def observation_length(team_size: int) -> int:
    return team_size * (8 + 2 * team_size) + team_size * 5 + 1


def global_state_length(team_size: int) -> int:
    return 2 * team_size * (8 + 2 * team_size) + 1


def build_observation(st: EngineState, uid: int) -> list[float]:
    """The local feature vector of one agent at the current tick."""
    observer = st.op(uid)
    n = st.team_size
    _, ticks, _, _ = _norms(st)
    out: list[float] = []
    own_base = 0 if observer.color == RED else n
    for slot in range(n):
        out.extend(_owner_block(st, own_base + slot))
    enemy_base = st.enemy_base_uid(observer.color)
    for slot in range(n):
        enemy = st.ops[enemy_base + slot]
        if enemy.alive and st.visibility(uid, enemy.uid):
            out.extend(_enemy_block(st, enemy.uid))
        else:
            out.extend([0.0] * 5)
    out.append(st.tick / ticks)
    return out


def build_global_state(st: EngineState) -> list[float]:
    """Unmasked features of all operators, for centralised training."""
    _, ticks, _, _ = _norms(st)
    out: list[float] = []
    for op in st.ops:
        out.extend(_owner_block(st, op.uid))
    out.append(st.tick / ticks)
    return out


# ---------------------------------------------------------------------------
# Structured views (what scripted policies and UIs consume)

@dataclass(frozen=True)
class EnemySnapshot:
    uid: int
    slot: int
    op_type: int
    pos: HexCoord
    blood: float


@dataclass(frozen=True)
class AllySnapshot:
    uid: int
    slot: int
    op_type: int
    pos: HexCoord
    blood: float
    alive: bool
    moving: bool
    stop_time: int
    shoot_cooling_time: int


@dataclass(frozen=True)
class AgentView:
    """One agent's sight-limited slice of the world.

    ``visible_enemies`` is keyed by enemy roster slot and holds exactly
    the enemies this agent can currently see.
    """

    uid: int
    color: int
    slot: int
    op_type: int
    pos: HexCoord
    blood: float
    moving: bool
    stop_time: int
    shoot_cooling_time: int
    team: tuple[AllySnapshot, ...]
    visible_enemies: dict[int, EnemySnapshot]
    game_map: GameMap
    tick: int


def team_views(st: EngineState, color: int) -> dict[int, AgentView]:
    """AgentViews for every living operator of one team."""
    team = tuple(
        AllySnapshot(
            uid=a.uid, slot=a.slot, op_type=a.spec.op_type, pos=a.pos,
            blood=a.blood, alive=a.alive, moving=a.moving,
            stop_time=a.stop_time, shoot_cooling_time=a.shoot_cooling_time,
        )
        for a in st.team(color)
    )
    base = st.enemy_base_uid(color)
    views: dict[int, AgentView] = {}
    for op in st.team(color):
        if not op.alive:
            continue
        visible = {}
        for slot in range(st.team_size):
            enemy = st.ops[base + slot]
            if enemy.alive and st.visibility(op.uid, enemy.uid):
                visible[slot] = EnemySnapshot(
                    uid=enemy.uid, slot=slot, op_type=enemy.spec.op_type,
                    pos=enemy.pos, blood=enemy.blood,
                )
        views[op.uid] = AgentView(
            uid=op.uid, color=op.color, slot=op.slot, op_type=op.spec.op_type,
            pos=op.pos, blood=op.blood, moving=op.moving,
            stop_time=op.stop_time, shoot_cooling_time=op.shoot_cooling_time,
            team=team, visible_enemies=visible, game_map=st.game_map, tick=st.tick,
        )
    return views


def render_state(st: EngineState, side: int | None = None) -> dict:
    """Board snapshot for UIs: everything a side's team can see, or the
    omniscient view when ``side`` is None (replay viewing).

    Enemy entries appear only while alive and inside the team's combined
    sight; own-team entries always appear, with an ``alive`` flag.
    """
    units = []
    for op in st.ops:
        if side is None or op.color == side:
            visible = True
        else:
            visible = op.alive and any(
                ally.alive and st.visibility(ally.uid, op.uid)
                for ally in st.team(side)
            )
        if not visible:
            continue
        units.append({
            "uid": op.uid,
            "color": COLOR_NAMES[op.color],
            "slot": op.slot,
            "type": TYPE_NAMES[op.spec.op_type],
            "row": op.pos.row,
            "col": op.pos.col,
            "blood": op.blood,
            "blood_max": op.spec.blood,
            "alive": op.alive,
            "moving": op.moving,
        })
    return {
        "tick": st.tick,
        "rows": st.game_map.rows,
        "cols": st.game_map.cols,
        "special": [[c.row, c.col] for c in st.game_map.special_cells()],
        "side": COLOR_NAMES[side] if side is not None else "all",
        "units": units,
        "terminated": st.terminated,
        "winner": st.winner,
    }


# ---------------------------------------------------------------------------
# Documented layout, so external consumers can parse vectors bit-exactly

_OWNER_FIELDS = (
    ("color", "raw 0=red 1=blue"),
    ("id", "uid / (n_operators - 1)"),
    ("type", "type / 2 (tank=0 chariot=1 infantry=2)"),
    ("cur_hex", "row*cols+col / (rows*cols - 1)"),
    ("blood", "blood / blood_max"),
    ("move_time", "ticks / max_ticks"),
    ("stop_time", "ticks / max_ticks"),
    ("shoot_cooling_time", "ticks / max_ticks"),
)
_ENEMY_FIELDS = _OWNER_FIELDS[:5]


def feature_layout(team_size: int = 3) -> dict[str, list[dict]]:
    """Name/offset/width/normalizer rows for both vector kinds."""

    def owner_rows(prefix: str, offset: int) -> tuple[list[dict], int]:
        rows = []
        for name, norm in _OWNER_FIELDS:
            rows.append({"name": f"{prefix}.{name}", "offset": offset, "width": 1, "normalizer": norm})
            offset += 1
        for name in ("can_see", "can_attack"):
            rows.append({
                "name": f"{prefix}.{name}", "offset": offset,
                "width": team_size, "normalizer": "raw 0/1 per enemy slot",
            })
            offset += team_size
        return rows, offset

    obs: list[dict] = []
    offset = 0
    for slot in range(team_size):
        rows, offset = owner_rows(f"ally{slot}", offset)
        obs.extend(rows)
    for slot in range(team_size):
        for name, norm in _ENEMY_FIELDS:
            obs.append({
                "name": f"enemy{slot}.{name}", "offset": offset, "width": 1,
                "normalizer": norm + " (zeroed unless visible)",
            })
            offset += 1
    obs.append({"name": "time_step", "offset": offset, "width": 1, "normalizer": "tick / max_ticks"})

    state: list[dict] = []
    offset = 0
    for color, color_name in ((RED, "red"), (BLUE, "blue")):
        for slot in range(team_size):
            rows, offset = owner_rows(f"{color_name}{slot}", offset)
            state.extend(rows)
    state.append({"name": "time_step", "offset": offset, "width": 1, "normalizer": "tick / max_ticks"})
    return {"observation": obs, "global_state": state}
