"""Bit-exact episode recording and deterministic playback verification.

``.poacrep`` format, line oriented so records stay greppable and a crash
leaves a readable prefix:

    POACREP 1
    {header json: engine_version, scenario document, seed, episode,
     red/blue controller names, digest_algorithm}
    {"t": 1, "a": {"0": "m4", ...}, "e": [[event...], ...], "r": 0.0}
    ...one line per tick...
    FOOTER {"winner": ..., "ticks": ..., "final_bloods": [...],
            "digest": "fnv1a64:..."}

The digest is a streaming FNV-1a 64 over every byte above the footer,
newlines included.  ``verify`` re-simulates the header's scenario/seed
with the recorded action stream and compares every tick's events and
rewards, then the footer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import __version__ as ENGINE_VERSION
from .engine import Action, EngineState, format_action, parse_action, reset
from .errors import ReplayDigestError, ReplayFormatError
from .scenarios import ScenarioConfig, load_scenario
from .units import BLUE, RED

MAGIC = "POACREP 1"
DIGEST_ALGORITHM = "fnv1a64"

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def fnv1a64(data: bytes, state: int = _FNV_OFFSET) -> int:
    for byte in data:
        state = ((state ^ byte) * _FNV_PRIME) & _MASK64
    return state


def _canonical(obj):
    """Round anything through JSON so comparisons match the file bytes."""
    return json.loads(json.dumps(obj))


@dataclass
class TickRecord:
    tick: int
    actions: dict[int, str]
    events: list
    reward_red: float

    def to_line(self) -> str:
        return json.dumps(
            {
                "t": self.tick,
                "a": {str(uid): self.actions[uid] for uid in sorted(self.actions)},
                "e": self.events,
                "r": self.reward_red,
            },
            sort_keys=True,
        )

    @staticmethod
    def from_line(line: str) -> "TickRecord":
        doc = json.loads(line)
        return TickRecord(
            tick=int(doc["t"]),
            actions={int(uid): a for uid, a in doc["a"].items()},
            events=doc["e"],
            reward_red=doc["r"],
        )


@dataclass
class ReplayRecord:
    header: dict
    ticks: list[TickRecord]
    footer: dict | None
    truncated: bool = False
    warnings: list[str] = field(default_factory=list)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ReplayRecord)
            and self.header == other.header
            and self.footer == other.footer
            and self.truncated == other.truncated
            and [t.to_line() for t in self.ticks] == [t.to_line() for t in other.ticks]
        )


class ReplayWriter:
    """Streams an episode to text lines, hashing as it goes.

    Plug :meth:`on_step` into a match loop, then call :meth:`finish` with
    the terminated engine state.  If ``stream`` is given, each line is
    written and flushed immediately (append-only recording).
    """

    def __init__(
        self,
        config: ScenarioConfig,
        seed: int,
        red: str,
        blue: str,
        episode: int = 0,
        stream=None,
    ):
        self._lines: list[str] = []
        self._hash = _FNV_OFFSET
        self._stream = stream
        header = {
            "engine_version": ENGINE_VERSION,
            "digest_algorithm": DIGEST_ALGORITHM,
            "scenario": config.to_document(),
            "seed": seed,
            "episode": episode,
            "red": red,
            "blue": blue,
        }
        self._emit(MAGIC)
        self._emit(json.dumps(header, sort_keys=True))

    def _emit(self, line: str) -> None:
        self._lines.append(line)
        self._hash = fnv1a64((line + "\n").encode("utf-8"), self._hash)
        if self._stream is not None:
            self._stream.write(line + "\n")
            self._stream.flush()

    def on_step(self, state: EngineState, actions: dict[int, Action], result) -> None:
        record = TickRecord(
            tick=state.tick,
            actions={uid: format_action(a) for uid, a in actions.items()},
            events=_canonical(result.events),
            reward_red=_canonical(result.reward_red),
        )
        self._emit(record.to_line())

    def finish(self, state: EngineState) -> str:
        footer = {
            "winner": state.winner,
            "ticks": state.tick,
            "final_bloods": _canonical([op.blood for op in state.ops]),
            "digest": f"{DIGEST_ALGORITHM}:{self._hash:016x}",
        }
        line = "FOOTER " + json.dumps(footer, sort_keys=True)
        self._lines.append(line)
        if self._stream is not None:
            self._stream.write(line + "\n")
            self._stream.flush()
        return "\n".join(self._lines) + "\n"


def write(record: ReplayRecord) -> str:
    """Serialize a record, recomputing the digest from its content."""
    lines = [MAGIC, json.dumps(record.header, sort_keys=True)]
    lines += [t.to_line() for t in record.ticks]
    digest = _FNV_OFFSET
    for line in lines:
        digest = fnv1a64((line + "\n").encode("utf-8"), digest)
    footer = dict(record.footer or {})
    footer["digest"] = f"{DIGEST_ALGORITHM}:{digest:016x}"
    lines.append("FOOTER " + json.dumps(footer, sort_keys=True))
    return "\n".join(lines) + "\n"


def read(document: str | bytes) -> ReplayRecord:
    """Parse and digest-check a replay; a missing footer yields a
    truncated record with a warning instead of an error."""
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    lines = document.splitlines()
    if not lines or lines[0] != MAGIC:
        raise ReplayFormatError(f"not a replay: expected leading {MAGIC!r} line")
    if len(lines) < 2:
        raise ReplayFormatError("missing header line")
    try:
        header = json.loads(lines[1])
    except json.JSONDecodeError as exc:
        raise ReplayFormatError(f"malformed header: {exc}") from None
    running = fnv1a64((lines[0] + "\n").encode(), _FNV_OFFSET)
    running = fnv1a64((lines[1] + "\n").encode(), running)
    ticks: list[TickRecord] = []
    footer = None
    warnings: list[str] = []
    for i, line in enumerate(lines[2:], start=3):
        if line.startswith("FOOTER "):
            try:
                footer = json.loads(line[len("FOOTER "):])
            except json.JSONDecodeError as exc:
                raise ReplayFormatError(f"line {i}: malformed footer: {exc}") from None
            break
        try:
            ticks.append(TickRecord.from_line(line))
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            if i == len(lines):  # torn final write: recover the prefix
                warnings.append(f"line {i}: dropped torn tick line ({exc})")
                break
            raise ReplayFormatError(f"line {i}: malformed tick record: {exc}") from None
        running = fnv1a64((line + "\n").encode(), running)
    if footer is None:
        warnings.append("no footer: replay truncated, recovered prefix")
        return ReplayRecord(header, ticks, None, truncated=True, warnings=warnings)
    declared = footer.get("digest", "")
    computed = f"{DIGEST_ALGORITHM}:{running:016x}"
    if declared != computed:
        raise ReplayDigestError(
            f"digest mismatch: recorded {declared}, computed {computed}"
        )
    return ReplayRecord(header, ticks, footer, warnings=warnings)


def read_file(path: str) -> ReplayRecord:
    with open(path, "rb") as fh:
        return read(fh.read())


@dataclass
class VerifyReport:
    status: str                      # "exact" | "diverged" | "truncated"
    detail: str = ""
    divergence_tick: int | None = None
    engine_version_mismatch: bool = False

    @property
    def exact(self) -> bool:
        return self.status == "exact"


def verify(record: ReplayRecord) -> VerifyReport:
    """Re-simulate the record and compare every tick, then the footer."""
    mismatch = record.header.get("engine_version") != ENGINE_VERSION
    try:
        config = load_scenario(record.header["scenario"])
    except Exception as exc:
        return VerifyReport("diverged", f"scenario rebuild failed: {exc}",
                            engine_version_mismatch=mismatch)
    state = reset(config, record.header["seed"], record.header.get("episode", 0))
    for tick_record in record.ticks:
        if state.terminated:
            return VerifyReport(
                "diverged", f"episode ended before recorded tick {tick_record.tick}",
                divergence_tick=tick_record.tick, engine_version_mismatch=mismatch,
            )
        actions = {uid: parse_action(s) for uid, s in tick_record.actions.items()}
        try:
            result = state.step(actions)
        except Exception as exc:
            return VerifyReport(
                "diverged", f"tick {tick_record.tick}: recorded actions rejected: {exc}",
                divergence_tick=tick_record.tick, engine_version_mismatch=mismatch,
            )
        live = {"e": _canonical(result.events), "r": _canonical(result.reward_red)}
        recorded = {"e": tick_record.events, "r": tick_record.reward_red}
        if json.dumps(live, sort_keys=True) != json.dumps(recorded, sort_keys=True):
            return VerifyReport(
                "diverged", f"tick {tick_record.tick}: events/rewards differ",
                divergence_tick=tick_record.tick, engine_version_mismatch=mismatch,
            )
    if record.footer is None:
        return VerifyReport(
            "truncated", f"prefix of {len(record.ticks)} ticks replayed consistently",
            engine_version_mismatch=mismatch,
        )
    observed = {
        "winner": state.winner,
        "ticks": state.tick,
        "final_bloods": _canonical([op.blood for op in state.ops]),
    }
    expected = {k: record.footer.get(k) for k in observed}
    if json.dumps(observed, sort_keys=True) != json.dumps(expected, sort_keys=True):
        return VerifyReport(
            "diverged", f"footer differs: expected {expected}, got {observed}",
            divergence_tick=state.tick, engine_version_mismatch=mismatch,
        )
    if not state.terminated:
        return VerifyReport("diverged", "recording stops before termination",
                            divergence_tick=state.tick, engine_version_mismatch=mismatch)
    return VerifyReport("exact", engine_version_mismatch=mismatch)


def record_match(
    config: ScenarioConfig,
    seed: int,
    red: str,
    blue: str,
    episode: int = 0,
    path: str | None = None,
):
    """Run a bot match, recording it; returns (ReplayRecord, MatchResult)."""
    from .service import run_match

    stream = open(path, "w", encoding="utf-8") if path else None
    try:
        writer = ReplayWriter(config, seed, red, blue, episode, stream=stream)
        holder: dict = {}

        def on_step(state, actions, result):
            writer.on_step(state, actions, result)
            holder["state"] = state

        result = run_match(config, seed, red, blue, episode, on_step=on_step)
        if "state" not in holder:  # zero-tick episode (max_ticks == 0)
            holder["state"] = reset(config, seed, episode)
        text = writer.finish(holder["state"])
    finally:
        if stream is not None:
            stream.close()
    return read(text), result


def frames(record: ReplayRecord, side: str = "all") -> dict:
    """Re-simulate a record into per-tick board snapshots for a viewer.

    ``side`` is "red", "blue", or "all"; sided frames apply that team's
    fog of war, "all" is the omniscient toggle.  Frame 0 is the initial
    board; frame k carries the events and reward of tick k.
    """
    from .observation import render_state

    if side == "all":
        color = None
    elif side in ("red", "blue"):
        color = RED if side == "red" else BLUE
    else:
        raise ReplayFormatError(f"unknown side {side!r}")
    config = load_scenario(record.header["scenario"])
    state = reset(config, record.header["seed"], record.header.get("episode", 0))
    out = [{
        "tick": 0,
        "render_state": render_state(state, color),
        "events": [],
        "reward_red": 0.0,
    }]
    for tick_record in record.ticks:
        actions = {uid: parse_action(s) for uid, s in tick_record.actions.items()}
        state.step(actions)
        out.append({
            "tick": state.tick,
            "render_state": render_state(state, color),
            "events": tick_record.events,
            "reward_red": tick_record.reward_red,
        })
    return {
        "header": {
            "scenario": record.header["scenario"].get("name", "?"),
            "seed": record.header["seed"],
            "red": record.header["red"],
            "blue": record.header["blue"],
            "engine_version": record.header.get("engine_version"),
        },
        "side": side,
        "frames": out,
        "footer": record.footer,
        "truncated": record.truncated,
    }


def summary(record: ReplayRecord) -> dict:
    """Flat statistics for the export table."""
    shots = sum(1 for t in record.ticks for e in t.events if e[0] in ("shoot", "guide"))
    hits = sum(
        1 for t in record.ticks for e in t.events if e[0] in ("shoot", "guide") and e[3]
    )
    guided = sum(1 for t in record.ticks for e in t.events if e[0] == "guide")
    deaths = sum(1 for t in record.ticks for e in t.events if e[0] == "death")
    footer = record.footer or {}
    return {
        "scenario": record.header["scenario"].get("name", "?"),
        "seed": record.header["seed"],
        "red": record.header["red"],
        "blue": record.header["blue"],
        "ticks": footer.get("ticks", len(record.ticks)),
        "winner": footer.get("winner", "?"),
        "shots": shots,
        "hits": hits,
        "guided_shots": guided,
        "deaths": deaths,
        "truncated": record.truncated,
    }
