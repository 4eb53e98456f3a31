"""Operator type constants and the per-type attribute tables.

The three built-in types and their stats are the balance contract of the
game; everything else (scenarios, bots, observations) is derived from
them.  Stats can be overridden per scenario document, e.g. setting every
speed to 1 turns the game into a synchronous one.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

RED = 0
BLUE = 1
COLOR_NAMES = ("red", "blue")

TANK = 0
CHARIOT = 1
INFANTRY = 2
TYPE_NAMES = ("tank", "chariot", "infantry")


def enemy_color(color: int) -> int:
    return 1 - color


@dataclass(frozen=True)
class OperatorSpec:
    """Immutable per-type attributes.

    ``blood`` is the maximum health.  ``speed`` is hexes per tick; a move
    order takes ``ticks_per_hex`` ticks to land.  ``observed_distance``
    is how far away this unit can be *seen* (halved on special terrain),
    ``attacked_distance`` how far away it can be *engaged* under the
    default target-centric range rule.  Damage and hit probability depend
    on the target class: vehicle (tank/chariot) or infantry.
    """

    op_type: int
    blood: float
    speed: float
    observed_distance: float
    attacked_distance: float
    damage_vehicle: float
    p_vehicle: float
    damage_infantry: float
    p_infantry: float
    cooldown: int
    prep_time: int
    can_guide_shoot: bool

    @property
    def ticks_per_hex(self) -> int:
        return max(1, round(1.0 / self.speed))

    def damage_against(self, target_type: int) -> tuple[float, float]:
        """(hit probability, damage) against a target of the given type."""
        if target_type == INFANTRY:
            return self.p_infantry, self.damage_infantry
        return self.p_vehicle, self.damage_vehicle


TANK_SPEC = OperatorSpec(
    op_type=TANK, blood=10, speed=1, observed_distance=10, attacked_distance=7,
    damage_vehicle=1.2, p_vehicle=0.8, damage_infantry=0.6, p_infantry=0.6,
    cooldown=1, prep_time=0, can_guide_shoot=False,
)
CHARIOT_SPEC = OperatorSpec(
    op_type=CHARIOT, blood=8, speed=1, observed_distance=10, attacked_distance=7,
    damage_vehicle=1.5, p_vehicle=0.7, damage_infantry=0.8, p_infantry=0.6,
    cooldown=1, prep_time=2, can_guide_shoot=True,
)
INFANTRY_SPEC = OperatorSpec(
    op_type=INFANTRY, blood=7, speed=0.2, observed_distance=5, attacked_distance=3,
    damage_vehicle=0.8, p_vehicle=0.7, damage_infantry=0.8, p_infantry=0.6,
    cooldown=1, prep_time=2, can_guide_shoot=True,
)

DEFAULT_SPECS: dict[str, OperatorSpec] = {
    "tank": TANK_SPEC,
    "chariot": CHARIOT_SPEC,
    "infantry": INFANTRY_SPEC,
}

_DOC_FIELDS = [f.name for f in fields(OperatorSpec) if f.name != "op_type"]


def spec_to_doc(spec: OperatorSpec) -> dict:
    return {name: getattr(spec, name) for name in _DOC_FIELDS}


def spec_from_doc(type_name: str, doc: dict) -> OperatorSpec:
    unknown = set(doc) - set(_DOC_FIELDS)
    if unknown:
        raise ValueError(f"unknown operator spec fields: {sorted(unknown)}")
    merged = spec_to_doc(DEFAULT_SPECS[type_name])
    merged.update(doc)
    return OperatorSpec(op_type=TYPE_NAMES.index(type_name), **merged)
