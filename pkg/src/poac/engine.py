"""Tick-based simulation core: legality, movement timing, combat, rewards.

One call to :meth:`EngineState.step` advances the global clock by a tick:

1. committed actions are applied in roster order — moves start their
   countdown, shots (and guided shots) resolve immediately;
2. timers advance: move countdowns and move clocks for movers, stop
   clocks for everyone else, cooldowns everywhere;
3. moves whose countdown just expired complete simultaneously (a move
   into a cell that stays occupied is voided and "completes" into its
   original cell);
4. rewards are the tick's blood ledger: enemy losses minus own losses;
5. a team with nobody left alive loses immediately; at the tick cap the
   team with strictly more total blood wins, equal blood is a draw.

Shot resolution order within a tick never changes the resulting state:
damage application commutes and every team draws its hit rolls from its
own pseudorandom stream.  Together with the simultaneous move rule this
makes color-swapped mirror matches reproduce exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, NamedTuple

from .errors import ConfigError, EpisodeOverError, IllegalActionError
from .hexgrid import GameMap, HexCoord, hex_distance, step_in_direction
from .rng import Xorshift64Star, mix64
from .scenarios import RANGE_SHOOTER, ScenarioConfig
from .scenarios import validate as validate_config
from .units import BLUE, COLOR_NAMES, RED, OperatorSpec

# Action kinds
MOVE = "move"
SHOOT = "shoot"
GUIDE = "guide"
STOP = "stop"
EMPTY = "empty"

WINNER_NONE = "none"
WINNER_DRAW = "draw"

_DAMAGE_STREAM_SALT = 0xDA3A9E5


class Action(NamedTuple):
    """One operator's order for a tick.

    ``arg`` is the direction index for a move, the target uid for a shot
    or guided shot, and -1 otherwise.
    """

    kind: str
    arg: int = -1

    @staticmethod
    def move(direction: int) -> "Action":
        return Action(MOVE, direction)

    @staticmethod
    def shoot(target_uid: int) -> "Action":
        return Action(SHOOT, target_uid)

    @staticmethod
    def guide_shoot(target_uid: int) -> "Action":
        return Action(GUIDE, target_uid)

    @staticmethod
    def stop() -> "Action":
        return Action(STOP)

    @staticmethod
    def empty() -> "Action":
        return Action(EMPTY)


def format_action(a: Action) -> str:
    """Compact text form used in replays and on the wire: m3 s4 g5 x e."""
    if a.kind == MOVE:
        return f"m{a.arg}"
    if a.kind == SHOOT:
        return f"s{a.arg}"
    if a.kind == GUIDE:
        return f"g{a.arg}"
    return "x" if a.kind == STOP else "e"


def parse_action(text: str) -> Action:
    if text == "x":
        return Action.stop()
    if text == "e":
        return Action.empty()
    if len(text) >= 2 and text[0] in "msg":
        try:
            arg = int(text[1:])
        except ValueError:
            raise IllegalActionError(f"malformed action {text!r}") from None
        return Action({"m": MOVE, "s": SHOOT, "g": GUIDE}[text[0]], arg)
    raise IllegalActionError(f"malformed action {text!r}")


# ---------------------------------------------------------------------------
# Fixed action alphabet (mask indexing)
#
# [0..5]            Move in direction 0..5
# [6..6+E)          Shoot enemy roster slot 0..E-1
# [6+E..6+2E)       Guide-shoot enemy roster slot 0..E-1
# [6+2E]            Stop
# [6+2E+1]          Empty

def alphabet_size(team_size: int) -> int:
    return 8 + 2 * team_size


def stop_index(team_size: int) -> int:
    return 6 + 2 * team_size


def empty_index(team_size: int) -> int:
    return 7 + 2 * team_size


def action_to_index(a: Action, actor_color: int, team_size: int) -> int:
    """Map an action to its slot in the fixed alphabet of the acting side."""
    if a.kind == MOVE:
        if not 0 <= a.arg < 6:
            raise IllegalActionError(f"move direction {a.arg} out of range")
        return a.arg
    if a.kind in (SHOOT, GUIDE):
        base = team_size if actor_color == RED else 0
        slot = a.arg - base
        if not 0 <= slot < team_size:
            raise IllegalActionError(
                f"{a.kind} target {a.arg} is not an enemy of the {COLOR_NAMES[actor_color]} team"
            )
        return (6 if a.kind == SHOOT else 6 + team_size) + slot
    if a.kind == STOP:
        return stop_index(team_size)
    if a.kind == EMPTY:
        return empty_index(team_size)
    raise IllegalActionError(f"unknown action kind {a.kind!r}")


def action_from_index(index: int, actor_color: int, team_size: int) -> Action:
    if 0 <= index < 6:
        return Action.move(index)
    base = team_size if actor_color == RED else 0
    if 6 <= index < 6 + team_size:
        return Action.shoot(base + index - 6)
    if 6 + team_size <= index < 6 + 2 * team_size:
        return Action.guide_shoot(base + index - 6 - team_size)
    if index == stop_index(team_size):
        return Action.stop()
    if index == empty_index(team_size):
        return Action.empty()
    raise IllegalActionError(f"action index {index} out of range")


class OperatorState:
    """Mutable battle state of one operator."""

    __slots__ = (
        "uid", "color", "slot", "spec", "blood", "pos",
        "move_ticks_remaining", "move_time", "stop_time",
        "shoot_cooling_time", "pending_dir",
    )

    def __init__(self, uid: int, color: int, slot: int, spec: OperatorSpec, pos: HexCoord):
        self.uid = uid
        self.color = color
        self.slot = slot
        self.spec = spec
        self.blood = float(spec.blood)
        self.pos = pos
        self.move_ticks_remaining = 0
        self.move_time = 0
        self.stop_time = 0
        self.shoot_cooling_time = 0
        self.pending_dir: int | None = None

    @property
    def alive(self) -> bool:
        return self.blood > 0

    @property
    def moving(self) -> bool:
        return self.move_ticks_remaining > 0

    def snapshot(self) -> tuple:
        return (
            self.uid, self.color, self.slot, self.spec.op_type, self.blood,
            self.pos.row, self.pos.col, self.move_ticks_remaining,
            self.move_time, self.stop_time, self.shoot_cooling_time,
            self.pending_dir,
        )

    def __repr__(self) -> str:
        team = COLOR_NAMES[self.color]
        return f"<op {self.uid} {team} t{self.spec.op_type} {self.blood:g}hp @({self.pos.row},{self.pos.col})>"


@dataclass
class StepResult:
    reward_red: float
    reward_blue: float
    events: list
    terminated: bool
    winner: str


class EngineState:
    """One episode's full simulation state.

    ``step`` mutates in place and returns the tick's :class:`StepResult`.
    Instances are single-threaded; run one per match.
    """

    def __init__(self, config: ScenarioConfig, seed: int, episode: int = 0):
        validate_config(config)
        self.config = config
        self.seed = seed
        self.episode = episode
        self.game_map: GameMap = config.game_map
        self.team_size = config.team_size()
        self.tick = 0
        self.terminated = False
        self.winner = WINNER_NONE
        self.ops: list[OperatorState] = []
        uid = 0
        for color, inits in ((RED, config.init_red), (BLUE, config.init_blue)):
            for slot, pos in enumerate(inits):
                self.game_map.require_in_bounds(pos)
                self.ops.append(
                    OperatorState(uid, color, slot, config.spec_for_slot(slot), pos)
                )
                uid += 1
        if len({op.pos for op in self.ops}) != len(self.ops):
            raise ConfigError("init_hex", "initial positions must be distinct")
        # one event stream per team: damage rolls plus rare movement tie-breaks
        self._team_streams = [
            Xorshift64Star(mix64(seed, episode, _DAMAGE_STREAM_SALT, sid))
            for sid in config.damage_stream_ids
        ]
        # test hook: replaces damage rolls when set, signature (color) -> float
        self.roll_source: Callable[[int], float] | None = None
        self._cache_tick = -1
        self._masks: dict[int, list[bool]] = {}
        self._occupied: dict[HexCoord, int] = {}
        if config.max_ticks == 0:
            self._finish(self._cap_winner(), [])

    # -- roster helpers ----------------------------------------------------

    def op(self, uid: int) -> OperatorState:
        if not 0 <= uid < len(self.ops):
            raise IllegalActionError(f"unknown operator {uid}")
        return self.ops[uid]

    def team(self, color: int) -> list[OperatorState]:
        n = self.team_size
        return self.ops[:n] if color == RED else self.ops[n:]

    def enemy_base_uid(self, color: int) -> int:
        return self.team_size if color == RED else 0

    def team_blood(self, color: int) -> float:
        return sum(op.blood for op in self.team(color))

    def living(self, color: int) -> list[OperatorState]:
        return [op for op in self.team(color) if op.alive]

    def decidable_uids(self, color: int | None = None) -> list[int]:
        """Operators that must submit a real action this tick."""
        ops = self.ops if color is None else self.team(color)
        return [op.uid for op in ops if op.alive and not op.moving]

    # -- visibility and range ----------------------------------------------

    def visibility(self, observer_uid: int, target_uid: int) -> bool:
        """Can observer see target?  Radius is the *target's* observed
        distance, halved while it sits on special terrain.  Allies always
        see each other; nobody sees (or is) the dead."""
        observer = self.op(observer_uid)
        target = self.op(target_uid)
        if not observer.alive or not target.alive:
            return False
        if observer.color == target.color:
            return True
        radius = target.spec.observed_distance
        if self.game_map.is_special(target.pos):
            radius = radius / 2.0
        return hex_distance(observer.pos, target.pos) <= radius

    def can_attack(self, shooter_uid: int, target_uid: int) -> bool:
        """Range-and-alive check only; line of sight is checked separately
        so that guided shots can substitute an ally's eyes."""
        shooter = self.op(shooter_uid)
        target = self.op(target_uid)
        if shooter.color == target.color:
            raise IllegalActionError(
                f"can_attack is defined between enemies, got two {COLOR_NAMES[shooter.color]} operators"
            )
        if not shooter.alive or not target.alive:
            return False
        if self.config.range_semantics == RANGE_SHOOTER:
            reach = shooter.spec.attacked_distance
        else:
            reach = target.spec.attacked_distance
        return hex_distance(shooter.pos, target.pos) <= reach

    def _ally_spots(self, shooter: OperatorState, target_uid: int) -> bool:
        for ally in self.team(shooter.color):
            if ally.uid != shooter.uid and ally.alive and self.visibility(ally.uid, target_uid):
                return True
        return False

    # -- availability -------------------------------------------------------

    def _occupancy(self) -> dict[HexCoord, int]:
        if self._cache_tick != self.tick:
            self._masks = {}
            self._occupied = {op.pos: op.uid for op in self.ops if op.alive}
            self._cache_tick = self.tick
        return self._occupied

    def available_actions(self, uid: int) -> list[bool]:
        """Availability mask over the fixed action alphabet."""
        occupied = self._occupancy()
        cached = self._masks.get(uid)
        if cached is not None:
            return cached
        op = self.op(uid)
        n = self.team_size
        mask = [False] * alphabet_size(n)
        mask[empty_index(n)] = True
        if self.terminated or not op.alive or op.moving:
            self._masks[uid] = mask
            return mask
        mask[stop_index(n)] = True
        for d in range(6):
            cell = step_in_direction(op.pos, d)
            if self.game_map.in_bounds(cell) and cell not in occupied:
                mask[d] = True
        if op.shoot_cooling_time == 0:
            spec = op.spec
            prep_ok = spec.prep_time == 0 or op.stop_time >= spec.prep_time
            guide_allowed = (
                self.config.guide_shoot
                and spec.can_guide_shoot
                and op.stop_time >= spec.prep_time
            )
            base = self.enemy_base_uid(op.color)
            for slot in range(n):
                enemy = self.ops[base + slot]
                if not enemy.alive or not self.can_attack(uid, enemy.uid):
                    continue
                if prep_ok and self.visibility(uid, enemy.uid):
                    mask[6 + slot] = True
                if guide_allowed and self._ally_spots(op, enemy.uid):
                    mask[6 + n + slot] = True
        self._masks[uid] = mask
        return mask

    def _diagnose(self, uid: int, action: Action) -> str:
        op = self.ops[uid]
        if self.terminated:
            return "episode already terminated"
        if not op.alive:
            return "operator is dead"
        if op.moving:
            return f"mid-move for {op.move_ticks_remaining} more ticks"
        if action.kind == MOVE:
            cell = step_in_direction(op.pos, action.arg)
            if not self.game_map.in_bounds(cell):
                return f"destination ({cell.row},{cell.col}) out of bounds"
            return f"destination ({cell.row},{cell.col}) occupied"
        if action.kind in (SHOOT, GUIDE):
            target = self.op(action.arg)
            if not target.alive:
                return "target is dead"
            if op.shoot_cooling_time > 0:
                return f"cooling down for {op.shoot_cooling_time} more ticks"
            if not self.can_attack(uid, action.arg):
                return "target out of range"
            if action.kind == GUIDE:
                if not self.config.guide_shoot:
                    return "guide shoot disabled by scenario"
                if not op.spec.can_guide_shoot:
                    return "operator type cannot guide shoot"
                if op.stop_time < op.spec.prep_time:
                    return f"needs stop_time >= {op.spec.prep_time}, has {op.stop_time}"
                return "no living ally sees the target"
            if op.spec.prep_time > 0 and op.stop_time < op.spec.prep_time:
                return f"needs stop_time >= {op.spec.prep_time}, has {op.stop_time}"
            return "target not visible"
        return "unavailable"

    # -- combat --------------------------------------------------------------

    def _roll(self, color: int) -> float:
        if self.roll_source is not None:
            return self.roll_source(color)
        return self._team_streams[color].uniform()

    def resolve_shoot(self, shooter_uid: int, target_uid: int, guided: bool = False) -> list:
        """Resolve one (guided) shot: roll, damage, cooldown, maybe death.

        Legality is the caller's concern; step() checks masks upstream.
        Returns the emitted events.
        """
        shooter = self.op(shooter_uid)
        target = self.op(target_uid)
        p, dmg = shooter.spec.damage_against(target.spec.op_type)
        roll = self._roll(shooter.color)
        hit = roll < p
        events = []
        was_alive = target.alive
        dealt = 0.0
        if hit:
            before = target.blood
            target.blood = max(0.0, target.blood - dmg)
            dealt = before - target.blood
        shooter.shoot_cooling_time = shooter.spec.cooldown
        events.append((GUIDE if guided else SHOOT, shooter_uid, target_uid, hit, dealt))
        if was_alive and not target.alive:
            events.append(("death", target_uid))
        return events

    # -- the tick ------------------------------------------------------------

    def step(self, actions: Mapping[int, Action]) -> StepResult:
        if self.terminated:
            raise EpisodeOverError(f"episode ended at tick {self.tick} ({self.winner})")
        self._validate(actions)

        blood_before = (self.team_blood(RED), self.team_blood(BLUE))
        events: list = []

        # phase 1: commit actions in roster order
        for uid in sorted(actions):
            action = actions[uid]
            op = self.ops[uid]
            if action.kind == MOVE:
                op.pending_dir = action.arg
                op.move_ticks_remaining = op.spec.ticks_per_hex
                op.move_time = 0
                op.stop_time = 0
            elif action.kind == SHOOT:
                events.extend(self.resolve_shoot(uid, action.arg, guided=False))
            elif action.kind == GUIDE:
                events.extend(self.resolve_shoot(uid, action.arg, guided=True))
            # STOP holds position; the stop clock keeps counting.  EMPTY is a no-op.

        # phase 2: timers
        completing: list[OperatorState] = []
        for op in self.ops:
            if not op.alive:
                continue
            if op.move_ticks_remaining > 0:
                op.move_ticks_remaining -= 1
                op.move_time += 1
                if op.move_ticks_remaining == 0:
                    completing.append(op)
            else:
                op.stop_time += 1
            if op.shoot_cooling_time > 0:
                op.shoot_cooling_time -= 1

        # phase 3: simultaneous move completion
        if completing:
            events.extend(self._complete_moves(completing))

        # phase 4: blood ledger
        lost_red = blood_before[0] - self.team_blood(RED)
        lost_blue = blood_before[1] - self.team_blood(BLUE)
        reward_red = lost_blue - lost_red
        if self.config.scale_rewards:
            total0 = sum(self.config.spec_for_slot(s).blood for s in range(self.team_size)) * 2
            reward_red /= total0

        # phase 5: clock and termination
        self.tick += 1
        self._cache_tick = -1
        winner = WINNER_NONE
        red_alive = any(op.alive for op in self.team(RED))
        blue_alive = any(op.alive for op in self.team(BLUE))
        if not red_alive or not blue_alive:
            if red_alive:
                winner = COLOR_NAMES[RED]
            elif blue_alive:
                winner = COLOR_NAMES[BLUE]
            else:
                winner = WINNER_DRAW
        elif self.tick >= self.config.max_ticks:
            winner = self._cap_winner()
        if winner != WINNER_NONE:
            self._finish(winner, events)
        return StepResult(
            reward_red=reward_red,
            reward_blue=-reward_red,
            events=events,
            terminated=self.terminated,
            winner=self.winner,
        )

    def _validate(self, actions: Mapping[int, Action]) -> None:
        for uid in self.decidable_uids():
            if uid not in actions:
                raise IllegalActionError(f"missing action for operator {uid}")
        for uid, action in actions.items():
            op = self.op(uid)
            if not op.alive or op.moving:
                if action.kind != EMPTY:
                    raise IllegalActionError(
                        f"operator {uid}: {format_action(action)} rejected: {self._diagnose(uid, action)}"
                    )
                continue
            index = action_to_index(action, op.color, self.team_size)
            if not self.available_actions(uid)[index]:
                raise IllegalActionError(
                    f"operator {uid}: {format_action(action)} unavailable: {self._diagnose(uid, action)}"
                )

    def _complete_moves(self, completing: list[OperatorState]) -> list:
        # Completions are simultaneous: a mover is voided when its cell
        # stays occupied — by a stationary living body, by a contention
        # winner, or by another voided mover (computed to fixpoint).
        moving = {op.uid for op in completing}
        blocked = {op.pos for op in self.ops if op.alive and op.uid not in moving}
        dest = {op.uid: step_in_direction(op.pos, op.pending_dir) for op in completing}
        voided: set[int] = set()

        groups: dict[HexCoord, list[OperatorState]] = {}
        for op in completing:
            groups.setdefault(dest[op.uid], []).append(op)
        axis = self.game_map.rows - 1
        for group in groups.values():
            if len(group) == 1:
                continue
            # mirror-covariant precedence; exact mirror twins settle by
            # their team streams (one draw each, higher roll enters)
            key = lambda o: (o.slot, o.pos.col, abs(2 * o.pos.row - axis))
            group.sort(key=key)
            winner = group[0]
            if key(group[0]) == key(group[1]):
                draws = {o.uid: self._team_streams[o.color].uniform() for o in group[:2]}
                winner = max(group[:2], key=lambda o: (draws[o.uid], o.color == RED))
            for op in group:
                if op is not winner:
                    voided.add(op.uid)

        for op in completing:
            if op.uid not in voided and dest[op.uid] in blocked:
                voided.add(op.uid)
        changed = True
        while changed:
            changed = False
            stays = {self.ops[u].pos for u in voided}
            for op in completing:
                if op.uid not in voided and dest[op.uid] in stays:
                    voided.add(op.uid)
                    changed = True

        events = []
        for op in completing:
            if op.uid not in voided:
                op.pos = dest[op.uid]
            op.pending_dir = None
            op.move_time = 0
            op.stop_time = 0
            events.append((MOVE, op.uid, op.pos.row, op.pos.col))
        return events

    def _cap_winner(self) -> str:
        red, blue = self.team_blood(RED), self.team_blood(BLUE)
        if red > blue:
            return COLOR_NAMES[RED]
        if blue > red:
            return COLOR_NAMES[BLUE]
        return WINNER_DRAW

    def _finish(self, winner: str, events: list) -> None:
        self.terminated = True
        self.winner = winner
        events.append(("end", winner))

    # -- reproducibility helpers ----------------------------------------------

    def snapshot(self) -> tuple:
        return (
            self.tick,
            self.terminated,
            self.winner,
            tuple(op.snapshot() for op in self.ops),
            tuple(s.getstate() for s in self._team_streams),
        )

    def digest(self) -> str:
        import hashlib

        return hashlib.sha256(repr(self.snapshot()).encode()).hexdigest()[:16]


def reset(config: ScenarioConfig, seed: int, episode: int = 0) -> EngineState:
    """Start a fresh, deterministic episode of the given scenario."""
    return EngineState(config, seed, episode)
