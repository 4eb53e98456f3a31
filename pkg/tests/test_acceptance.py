"""Acceptance suite: one test per release criterion, at pinned tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL
line per criterion with the measured numbers.
"""

import pytest

from poac.engine import Action, action_from_index, reset
from poac.errors import IllegalActionError
from poac.hexgrid import hex_distance
from poac.observation import build_global_state, build_observation
from poac.replay import record_match, verify
from poac.rng import Xorshift64Star
from poac.scenarios import load_scenario
from poac.service import episode_seed, run_match
from poac.units import BLUE, RED

from conftest import flat_config, step_with


def report(name: str, ok: bool, detail: str = ""):
    print(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  [{detail}]" if detail else ""))
    assert ok, f"{name}: {detail}"


def random_actions(state, rng):
    actions = {}
    for uid in state.decidable_uids():
        mask = state.available_actions(uid)
        options = [i for i, ok in enumerate(mask) if ok]
        actions[uid] = action_from_index(
            options[rng.randrange(len(options))], state.ops[uid].color, state.team_size
        )
    return actions


def test_criterion_visibility_asymmetry_on_hidden_terrain():
    # Blue tank on a hidden cell, red tank on open ground, 9 hexes apart:
    # the halved radius must hide blue while red stays visible.  Exact.
    cfg = flat_config(
        red=((0, 0), (5, 0), (6, 0)),
        blue=((0, 9), (5, 22), (6, 22)),
        special_cells=((0, 9),),
    )
    st = reset(cfg, seed=0)
    assert hex_distance(st.ops[0].pos, st.ops[3].pos) == 9
    blue_sees_red = st.visibility(3, 0)
    red_sees_blue = st.visibility(0, 3)
    report(
        "visibility: hidden terrain halves the observed distance",
        blue_sees_red is True and red_sees_blue is False,
        f"blue->red {blue_sees_red}, red->blue {red_sees_blue}",
    )


def test_criterion_asynchronous_movement_timing():
    cfg = flat_config(  # open eastward lanes for both movers
        red=((0, 0), (4, 0), (2, 0)),
        blue=((12, 18), (12, 20), (12, 22)),
    )
    st = reset(cfg, seed=0)
    tank_start = st.ops[0].pos
    infantry_start = st.ops[2].pos
    infantry_positions = []
    tank_distance_after_5 = None
    for tick in range(10):
        moves = {2: Action.empty()} if st.ops[2].moving else {2: Action.move(0)}
        if tick < 5:
            moves[0] = Action.move(0)
        step_with(st, moves)
        infantry_positions.append(st.ops[2].pos)
        if tick == 4:
            tank_distance_after_5 = hex_distance(tank_start, st.ops[0].pos)
    tank_ok = tank_distance_after_5 == 5
    infantry_ok = (
        all(p == infantry_start for p in infantry_positions[:4])
        and hex_distance(infantry_start, infantry_positions[4]) == 1
        and all(p == infantry_positions[4] for p in infantry_positions[5:9])
        and hex_distance(infantry_start, infantry_positions[9]) == 2
    )
    report(
        "asynchrony: tank 5 hexes in 5 ticks, infantry 1 in 5 and 2 in 10",
        tank_ok and infantry_ok,
        f"tank d={tank_distance_after_5} after 5; "
        f"infantry d={hex_distance(infantry_start, infantry_positions[9])} after 10",
    )


def test_criterion_self_mirror_win_band():
    cfg = load_scenario(0)
    wins = draws = 0
    decisive = []
    for e in range(200):
        r = run_match(cfg, episode_seed(1234, 0, "KAI0", "KAI0", e), "KAI0", "KAI0", episode=e)
        if r.winner == "red":
            wins += 1
        elif r.winner == "draw":
            draws += 1
        if r.winner != "draw":
            decisive.append(r.ticks)
    rate = wins / 200
    mean_decisive = sum(decisive) / max(1, len(decisive))
    report(
        "mirror matchup: KAI0 vs KAI0 win rate inside [0.35, 0.65], decisive mean < 600",
        0.35 <= rate <= 0.65 and mean_decisive < 600 and decisive,
        f"red win rate {rate:.3f}, draws {draws}, mean decisive {mean_decisive:.1f}",
    )


def _swap_winner(w):
    return {"red": "blue", "blue": "red", "draw": "draw", "none": "none"}[w]


def test_criterion_color_swap_symmetry_exact():
    from poac.bots import make_policy
    from poac.service import collect_actions

    cfg = load_scenario(1)
    mirrored_cfg = cfg.mirrored()
    mirror = cfg.game_map.mirror_coord

    def run(config, red, blue, seed):
        st = reset(config, seed)
        red_policy = make_policy(red, RED, config)
        blue_policy = make_policy(blue, BLUE, config)
        track = []
        while not st.terminated:
            st.step(collect_actions(st, red_policy, blue_policy))
            track.append([
                (op.blood, op.pos, op.move_ticks_remaining, op.stop_time, op.shoot_cooling_time)
                for op in st.ops
            ])
        return track, st.winner

    exact = 0
    for seed in range(100):
        track_a, winner_a = run(cfg, "KAI0", "KAI1", seed)
        track_b, winner_b = run(mirrored_cfg, "KAI1", "KAI0", seed)
        ok = winner_b == _swap_winner(winner_a) and len(track_a) == len(track_b)
        if ok:
            for state_a, state_b in zip(track_a, track_b):
                for k in range(6):
                    blood, pos, mtr, stop, cool = state_a[k]
                    blood_m, pos_m, mtr_m, stop_m, cool_m = state_b[(k + 3) % 6]
                    if (blood, mirror(pos), mtr, stop, cool) != (blood_m, pos_m, mtr_m, stop_m, cool_m):
                        ok = False
                        break
                if not ok:
                    break
        exact += ok
    report(
        "color swap: 100 mirrored matches reproduce exactly",
        exact == 100,
        f"{exact}/100 exact",
    )


def test_criterion_record_and_verify_all_scenarios():
    exact = 0
    total = 50
    for i in range(total):
        scenario = i % 6
        cfg = load_scenario(scenario)
        record, _ = record_match(cfg, seed=9000 + i, red="random", blue="random", episode=i)
        if verify(record).exact:
            exact += 1
    report(
        "replay: 50 fuzzed episodes across all scenarios verify exact",
        exact == total,
        f"{exact}/{total} exact",
    )


def test_criterion_zero_sum_and_blood_ledger():
    rng = Xorshift64Star(22)
    ticks_checked = 0
    episode = 0
    max_abs_residual = 0.0
    while ticks_checked < 10_000:
        cfg = load_scenario(episode % 6)
        st = reset(cfg, seed=400 + episode, episode=episode)
        initial = (st.team_blood(RED), st.team_blood(BLUE))
        total_red = 0.0
        while not st.terminated and ticks_checked < 10_000:
            result = st.step(random_actions(st, rng))
            assert result.reward_red + result.reward_blue == 0.0
            total_red += result.reward_red
            ticks_checked += 1
        expected = (initial[1] - st.team_blood(BLUE)) - (initial[0] - st.team_blood(RED))
        max_abs_residual = max(max_abs_residual, abs(total_red - expected))
        episode += 1
    report(
        "rewards: zero-sum every tick, cumulative matches blood ledger",
        max_abs_residual <= 1e-9,
        f"{ticks_checked} ticks, max ledger residual {max_abs_residual:.2e}",
    )


def test_criterion_hit_rate_statistics():
    cfg = load_scenario(0)
    st = reset(cfg, seed=31337)
    hits = 0
    n = 10_000
    for _ in range(n):
        st.ops[4].blood = 8.0  # keep the chariot alive and full
        events = st.resolve_shoot(0, 4)
        hits += events[0][3]
        st.ops[0].shoot_cooling_time = 0
    rate = hits / n
    report(
        "hit rate: forced tank->chariot inside 0.8 +/- 0.02",
        abs(rate - 0.8) <= 0.02,
        f"empirical {rate:.4f}",
    )


def test_criterion_feature_shapes_and_bounds():
    rng = Xorshift64Star(17)
    states = 0
    episode = 0
    ok = True
    while states < 10_000 and ok:
        cfg = load_scenario(episode % 6)
        st = reset(cfg, seed=800 + episode, episode=episode)
        while not st.terminated and states < 10_000:
            st.step(random_actions(st, rng))
            states += 1
            state_vec = build_global_state(st)
            vec = build_observation(st, states % 6)
            if len(vec) != 58 or len(state_vec) != 85:
                ok = False
                break
            if not all(0.0 <= v <= 1.0 for v in vec):
                ok = False
                break
            if not all(0.0 <= v <= 1.0 for v in state_vec):
                ok = False
                break
        episode += 1
    report(
        "features: observation 58, state 85, all entries in [0,1]",
        ok and states >= 10_000,
        f"{states} random states checked",
    )


def test_criterion_mask_soundness_fuzz():
    rng = Xorshift64Star(5)
    steps = 0
    probes = 0
    episode = 0
    while steps < 100_000:
        cfg = load_scenario(episode % 6)
        st = reset(cfg, seed=episode, episode=episode)
        while not st.terminated and steps < 100_000:
            actions = random_actions(st, rng)
            if steps % 97 == 0:
                # adversarial probe: a masked-out action must be rejected
                uid = st.decidable_uids()[0]
                mask = st.available_actions(uid)
                blocked = [i for i, available in enumerate(mask) if not available]
                if blocked:
                    bad = dict(actions)
                    bad[uid] = action_from_index(
                        blocked[rng.randrange(len(blocked))], st.ops[uid].color, 3
                    )
                    tick_before = st.tick
                    with pytest.raises(IllegalActionError):
                        st.step(bad)
                    assert st.tick == tick_before
                    probes += 1
            st.step(actions)  # every mask-legal action must be accepted
            steps += 1
        episode += 1
    report(
        "masks: 100k legal steps accepted, masked-out probes rejected",
        True,
        f"{steps} legal steps, {probes} rejection probes",
    )


def test_criterion_bot_strength_over_random():
    cfg = load_scenario(2)
    rates = {}
    for kai in ("KAI0", "KAI1", "KAI2"):
        wins = 0
        for e in range(100):
            r = run_match(cfg, episode_seed(777, 2, kai, "random", e), kai, "random", episode=e)
            wins += r.winner == "red"
        rates[kai] = wins / 100
    report(
        "strength: every KAI beats uniform-random in >= 70% of 100 episodes",
        all(rate >= 0.70 for rate in rates.values()),
        ", ".join(f"{k} {v:.2f}" for k, v in rates.items()),
    )


def test_criterion_guide_shoot_gating():
    # chariot in range of a target only its infantry spotter can see
    positions = dict(
        red=((5, 3), (5, 4), (5, 10)),
        blue=((5, 11), (0, 22), (1, 22)),
        special_cells=((5, 11),),
    )
    scenario2_flags = flat_config(rows=17, cols=27, guide_shoot=True, **positions)
    scenario1_flags = flat_config(rows=17, cols=27, guide_shoot=False, **positions)

    def prepared_state(cfg):
        st = reset(cfg, seed=0)
        for _ in range(2):
            st.step({u: Action.stop() for u in st.decidable_uids()})
        return st

    enabled = prepared_state(scenario2_flags)
    disabled = prepared_state(scenario1_flags)
    chariot_blind = not enabled.visibility(1, 3)
    spotter_sees = enabled.visibility(2, 3)
    prep_ready = enabled.ops[1].stop_time >= 2
    guide_on = enabled.available_actions(1)[9] is True
    guide_off = not any(disabled.available_actions(1)[9:12])
    accepted = True
    try:
        acts = {u: Action.stop() for u in enabled.decidable_uids()}
        acts[1] = Action.guide_shoot(3)
        enabled.step(acts)
    except IllegalActionError:
        accepted = False
    report(
        "guide shoot: spotter-enabled when flagged, absent otherwise",
        chariot_blind and spotter_sees and prep_ready and guide_on and guide_off and accepted,
        f"blind={chariot_blind} spotter={spotter_sees} ready={prep_ready} "
        f"on={guide_on} off={guide_off} accepted={accepted}",
    )
