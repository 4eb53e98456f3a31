"""Built-in scripted opponents.

All policies read only their own team's sight-limited views plus the
availability masks — the same interface a learning agent gets.  Their
decisions are pure functions of (views, masks, per-episode memory), so
matches stay reproducible; the only randomness in a bot match is the
engine's damage rolls.

Strategies:

* ``KAI0`` — rush: shoot whatever is most threatening, otherwise march
  on the board center.
* ``KAI1`` — ambush: chariot and infantry camp on hidden terrain, the
  tank escorts the chariot; everyone still takes available shots.
  Without hidden terrain it degenerates to KAI0.
* ``KAI2`` — spotter play: infantry hides as a forward spotter, the
  chariot parks inside its firing envelope around the center and prefers
  guided shots; the tank rushes to draw fire.  Without guide shoot it
  degenerates to KAI1.
* ``random`` — uniform over the currently available real actions.

Every positional tie-break is mirror-covariant (column, then distance
from the mirror axis), which is what lets color-swapped replays of the
symmetric scenarios reproduce exactly.
"""

from __future__ import annotations

from .engine import Action, action_from_index, empty_index
from .hexgrid import GameMap, HexCoord, hex_distance, shortest_path, step_in_direction
from .observation import AgentView
from .rng import Xorshift64Star, mix64
from .scenarios import ScenarioConfig
from .units import CHARIOT, INFANTRY, TANK
from .errors import ConfigError

# chariot first: it deals the heaviest vehicle damage and enables guide shoot
_THREAT_RANK = {CHARIOT: 0, TANK: 1, INFANTRY: 2}

BOT_NAMES = ("KAI0", "KAI1", "KAI2", "random")


def make_policy(name: str, color: int, config: ScenarioConfig, seed: int = 0):
    if name == "KAI0":
        return Kai0Policy(color, config)
    if name == "KAI1":
        return Kai1Policy(color, config)
    if name == "KAI2":
        return Kai2Policy(color, config)
    if name == "random":
        return RandomPolicy(color, config, seed)
    raise ConfigError("controller", f"unknown policy {name!r} (expected one of {BOT_NAMES})")


def _has_real_options(mask: list[bool], team_size: int) -> bool:
    e = empty_index(team_size)
    return any(ok for i, ok in enumerate(mask) if i != e)


def _merged_enemy_intel(views: dict[int, AgentView]) -> dict:
    """Union of the team's sight: enemy slot -> snapshot."""
    merged = {}
    for view in views.values():
        merged.update(view.visible_enemies)
    return merged


def _best_target_slot(slots, intel, roster_types) -> int:
    return min(
        slots,
        key=lambda k: (
            _THREAT_RANK[roster_types[k]],
            intel[k].blood if k in intel else float("inf"),
            k,
        ),
    )


def _move_toward(view: AgentView, mask: list[bool], goal: HexCoord, game_map: GameMap) -> Action:
    """First available step of the deterministic shortest path, else Stop."""
    if view.pos == goal:
        return Action.stop()
    closer = hex_distance(view.pos, goal) - 1
    for d in range(6):
        cell = step_in_direction(view.pos, d)
        if mask[d] and game_map.in_bounds(cell) and hex_distance(cell, goal) == closer:
            return Action.move(d)
    return Action.stop()


def _mirror_safe_key(origin: HexCoord, game_map: GameMap):
    """Sort key over cells that ranks mirror images identically."""
    axis = game_map.rows - 1

    def key(cell: HexCoord):
        return (
            hex_distance(origin, cell),
            cell.col,
            abs((cell.row - origin.row)),
            abs(2 * cell.row - axis),
            cell.row,
        )

    return key


class Kai0Policy:
    """Rush: highest-threat shot if any, otherwise march on the center."""

    def __init__(self, color: int, config: ScenarioConfig):
        self.color = color
        self.config = config
        self._types = [config.spec_for_slot(s).op_type for s in range(config.team_size())]

    def decide(self, views: dict[int, AgentView], masks: dict[int, list[bool]]) -> dict[int, Action]:
        intel = _merged_enemy_intel(views)
        actions: dict[int, Action] = {}
        for uid in sorted(views):
            action = self.decide_one(views[uid], masks[uid], intel)
            if action is not None:
                actions[uid] = action
        return actions

    def decide_one(self, view: AgentView, mask: list[bool], intel) -> Action | None:
        n = self.config.team_size()
        if not _has_real_options(mask, n):
            return None
        shootable = [k for k in range(n) if mask[6 + k]]
        if shootable:
            slot = _best_target_slot(shootable, intel, self._types)
            return Action.shoot(intel[slot].uid if slot in intel else self._enemy_uid(slot))
        return _move_toward(view, mask, view.game_map.center(), view.game_map)

    def _enemy_uid(self, slot: int) -> int:
        n = self.config.team_size()
        return slot + (n if self.color == 0 else 0)


class Kai1Policy:
    """Ambush: camp the hidden terrain, escort the chariot, shoot on sight."""

    def __init__(self, color: int, config: ScenarioConfig):
        self.color = color
        self.config = config
        self._kai0 = Kai0Policy(color, config)
        self._types = self._kai0._types
        self._destinations: dict[int, HexCoord] = {}
        self._camping = bool(config.game_map.special_cells())

    def decide(self, views, masks) -> dict[int, Action]:
        if not self._camping:
            return self._kai0.decide(views, masks)
        self._assign_destinations(views)
        intel = _merged_enemy_intel(views)
        n = self.config.team_size()
        actions: dict[int, Action] = {}
        for uid in sorted(views):
            view, mask = views[uid], masks[uid]
            if not _has_real_options(mask, n):
                continue
            shootable = [k for k in range(n) if mask[6 + k]]
            if shootable:
                slot = _best_target_slot(shootable, intel, self._types)
                actions[uid] = Action.shoot(intel[slot].uid)
                continue
            if view.op_type == TANK:
                actions[uid] = self._escort(view, mask)
            else:
                goal = self._destinations.get(uid, view.game_map.center())
                actions[uid] = (
                    Action.stop() if view.pos == goal
                    else _move_toward(view, mask, goal, view.game_map)
                )
        return actions

    def _assign_destinations(self, views) -> None:
        if self._destinations or not views:
            return
        cells = self.config.game_map.special_cells()
        # infantry claims first (it is the one hiding for good), then chariots
        claimed: set[HexCoord] = set()
        order = sorted(
            views.values(),
            key=lambda v: (0 if v.op_type == INFANTRY else 1, v.slot),
        )
        for view in order:
            if view.op_type == TANK:
                continue
            ranked = sorted(cells, key=_mirror_safe_key(view.pos, self.config.game_map))
            pick = next((c for c in ranked if c not in claimed), ranked[0])
            claimed.add(pick)
            self._destinations[view.uid] = pick

    def _escort(self, view: AgentView, mask) -> Action:
        chariot = next(
            (a for a in view.team if a.alive and a.op_type == CHARIOT), None
        )
        if chariot is None:
            return self._kai0.decide_one(view, mask, {}) or Action.stop()
        if hex_distance(view.pos, chariot.pos) <= 1:
            return Action.stop()
        return _move_toward(view, mask, chariot.pos, view.game_map)


class Kai2Policy:
    """Spotter play: hidden infantry feeds guided chariot fire; tank baits."""

    def __init__(self, color: int, config: ScenarioConfig):
        self.color = color
        self.config = config
        self._kai1 = Kai1Policy(color, config)
        self._kai0 = self._kai1._kai0
        self._types = self._kai0._types
        self._infantry_dest: dict[int, HexCoord] = {}
        self._chariot_dest: dict[int, HexCoord] = {}
        self._enabled = config.guide_shoot and bool(config.game_map.special_cells())

    def decide(self, views, masks) -> dict[int, Action]:
        if not self._enabled:
            return self._kai1.decide(views, masks)
        intel = _merged_enemy_intel(views)
        n = self.config.team_size()
        actions: dict[int, Action] = {}
        for uid in sorted(views):
            view, mask = views[uid], masks[uid]
            if not _has_real_options(mask, n):
                continue
            if view.op_type == TANK:
                actions[uid] = self._kai0.decide_one(view, mask, intel) or Action.stop()
                continue
            if view.op_type == CHARIOT:
                guideable = [k for k in range(n) if mask[6 + n + k]]
                if guideable:
                    slot = _best_target_slot(guideable, intel, self._types)
                    actions[uid] = Action.guide_shoot(intel[slot].uid)
                    continue
            shootable = [k for k in range(n) if mask[6 + k]]
            if shootable:
                slot = _best_target_slot(shootable, intel, self._types)
                actions[uid] = Action.shoot(intel[slot].uid)
                continue
            goal = self._goal_for(view)
            actions[uid] = (
                Action.stop() if view.pos == goal
                else _move_toward(view, mask, goal, view.game_map)
            )
        return actions

    def _goal_for(self, view: AgentView) -> HexCoord:
        game_map = self.config.game_map
        if view.op_type == INFANTRY:
            if view.uid not in self._infantry_dest:
                cells = game_map.special_cells()
                self._infantry_dest[view.uid] = min(
                    cells, key=_mirror_safe_key(view.pos, game_map)
                )
            return self._infantry_dest[view.uid]
        # chariot: first cell en route that puts the center in its envelope
        if view.uid not in self._chariot_dest:
            reach = self.config.operator_specs[
                self.config.roster[view.slot]
            ].attacked_distance
            center = game_map.center()
            dest = view.pos
            for cell in shortest_path(view.pos, center, game_map):
                if hex_distance(cell, center) <= reach:
                    dest = cell
                    break
            self._chariot_dest[view.uid] = dest
        return self._chariot_dest[view.uid]


class RandomPolicy:
    """Uniform over the available real actions (Empty only when forced)."""

    def __init__(self, color: int, config: ScenarioConfig, seed: int = 0):
        self.color = color
        self.config = config
        self._rng = Xorshift64Star(mix64(seed, color, 0xB07))

    def decide(self, views, masks) -> dict[int, Action]:
        n = self.config.team_size()
        e = empty_index(n)
        actions: dict[int, Action] = {}
        for uid in sorted(views):
            mask = masks[uid]
            options = [i for i, ok in enumerate(mask) if ok and i != e]
            if not options:
                continue
            pick = options[self._rng.randrange(len(options))]
            actions[uid] = action_from_index(pick, self.color, n)
        return actions
