"""Headless match orchestration and the tournament runner.

``run_match`` drives one episode between two named controllers (bots or
``random``); the engine never waits on wall time.  ``run_tournament``
crosses controller pairings over scenarios, derives one seed per episode
from the base seed, and reports win rates (draws counted separately) and
mean episode length per cell, deterministically and independently of the
parallelism degree.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .bots import make_policy
from .engine import EngineState, reset
from .observation import team_views
from .rng import mix64
from .scenarios import ScenarioConfig, load_scenario
from .units import BLUE, RED

TOURNAMENT_COLUMNS = (
    "scenario", "red", "blue", "episodes",
    "red_wins", "blue_wins", "draws", "red_win_rate", "mean_ticks",
)


@dataclass
class MatchResult:
    winner: str
    ticks: int
    blood_red: float
    blood_blue: float
    reward_red_total: float


def collect_actions(state: EngineState, red_policy, blue_policy) -> dict:
    actions = {}
    for color, policy in ((RED, red_policy), (BLUE, blue_policy)):
        views = team_views(state, color)
        masks = {uid: state.available_actions(uid) for uid in views}
        actions.update(policy.decide(views, masks))
    return actions


def run_match(
    config: ScenarioConfig,
    seed: int,
    red: str,
    blue: str,
    episode: int = 0,
    on_step=None,
) -> MatchResult:
    """Play one bot-vs-bot episode to termination."""
    state = reset(config, seed, episode)
    red_policy = make_policy(red, RED, config, seed=mix64(seed, episode, RED))
    blue_policy = make_policy(blue, BLUE, config, seed=mix64(seed, episode, BLUE))
    total_red = 0.0
    while not state.terminated:
        actions = collect_actions(state, red_policy, blue_policy)
        result = state.step(actions)
        total_red += result.reward_red
        if on_step is not None:
            on_step(state, actions, result)
    return MatchResult(
        winner=state.winner,
        ticks=state.tick,
        blood_red=state.team_blood(RED),
        blood_blue=state.team_blood(BLUE),
        reward_red_total=total_red,
    )


def episode_seed(base_seed: int, scenario_key: int, red: str, blue: str, episode: int) -> int:
    return mix64(base_seed, scenario_key, hash_name(red), hash_name(blue), episode)


def hash_name(name: str) -> int:
    acc = 0
    for ch in name:
        acc = (acc * 131 + ord(ch)) & 0xFFFFFFFF
    return acc


def _run_cell_episode(args) -> tuple[str, int]:
    doc, red, blue, seed, episode = args
    config = load_scenario(doc)
    result = run_match(config, seed, red, blue, episode)
    return result.winner, result.ticks


def run_tournament(
    pairings: list[tuple[str, str]],
    scenarios: list[int | dict],
    episodes: int,
    base_seed: int,
    jobs: int = 1,
) -> list[dict]:
    """One result row per (scenario, red, blue) cell."""
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    cells = []
    for scenario in scenarios:
        config = load_scenario(scenario)
        doc = config.to_document()
        key = config.scenario_id if config.scenario_id is not None else 0
        for red, blue in pairings:
            tasks = [
                (doc, red, blue, episode_seed(base_seed, key, red, blue, e), e)
                for e in range(episodes)
            ]
            if jobs > 1:
                with ProcessPoolExecutor(max_workers=jobs) as pool:
                    outcomes = list(pool.map(_run_cell_episode, tasks))
            else:
                outcomes = [_run_cell_episode(t) for t in tasks]
            red_wins = sum(1 for w, _ in outcomes if w == "red")
            blue_wins = sum(1 for w, _ in outcomes if w == "blue")
            draws = episodes - red_wins - blue_wins
            cells.append({
                "scenario": config.name,
                "red": red,
                "blue": blue,
                "episodes": episodes,
                "red_wins": red_wins,
                "blue_wins": blue_wins,
                "draws": draws,
                "red_win_rate": red_wins / episodes,
                "mean_ticks": sum(t for _, t in outcomes) / episodes,
            })
    return cells


def format_cells(cells: list[dict], fmt: str = "tsv") -> str:
    """Render tournament cells with a bit-stable column order."""
    if fmt == "jsonl":
        import json

        return "\n".join(
            json.dumps({k: cell[k] for k in TOURNAMENT_COLUMNS}) for cell in cells
        ) + "\n"
    if fmt != "tsv":
        raise ValueError(f"unknown table format {fmt!r}")
    lines = ["\t".join(TOURNAMENT_COLUMNS)]
    for cell in cells:
        lines.append("\t".join(_fmt_value(cell[k]) for k in TOURNAMENT_COLUMNS))
    return "\n".join(lines) + "\n"


def _fmt_value(v) -> str:
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)
