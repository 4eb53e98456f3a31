"""Scripted-opponent tests: targeting, movement, fallbacks, legality, determinism."""

import pytest

from poac.bots import Kai0Policy, Kai1Policy, Kai2Policy, RandomPolicy, _best_target_slot, make_policy
from poac.engine import Action, reset
from poac.errors import ConfigError
from poac.hexgrid import first_step_toward, hex_distance
from poac.observation import team_views
from poac.rng import Xorshift64Star
from poac.scenarios import load_scenario
from poac.service import run_match
from poac.units import BLUE, CHARIOT, INFANTRY, RED, TANK

from conftest import flat_config


def masks_for(state, views):
    return {uid: state.available_actions(uid) for uid in views}


def decisions(policy, state):
    views = team_views(state, policy.color)
    return policy.decide(views, masks_for(state, views))


def sample_states(scenario, seed, count, stride=7):
    """Reachable mid-game states collected from random-legal play."""
    from poac.engine import action_from_index

    cfg = load_scenario(scenario)
    states = []
    rng = Xorshift64Star(seed)
    episode = 0
    while len(states) < count:
        st = reset(cfg, seed=seed + episode, episode=episode)
        tick = 0
        while not st.terminated and len(states) < count:
            actions = {}
            for uid in st.decidable_uids():
                mask = st.available_actions(uid)
                options = [i for i, ok in enumerate(mask) if ok]
                actions[uid] = action_from_index(
                    options[rng.randrange(len(options))], st.ops[uid].color, 3
                )
            st.step(actions)
            tick += 1
            if tick % stride == 0:
                states.append(st)
                break  # keep states from distinct episodes uncorrelated
        episode += 1
    return states


class TestTargetPriority:
    def test_brute_force_enumeration_of_the_priority_table(self):
        # chariot > tank > infantry, then lowest blood, then lowest slot
        types = [TANK, CHARIOT, INFANTRY]
        rank = {CHARIOT: 0, TANK: 1, INFANTRY: 2}

        class Snap:
            def __init__(self, blood):
                self.blood = blood
                self.uid = 99

        bloods = [1.0, 5.5, 5.5]
        for subset in range(1, 8):
            slots = [k for k in range(3) if subset & (1 << k)]
            for b0 in (1.0, 3.0):
                intel = {k: Snap(bloods[k] if k else b0) for k in slots}
                expected = min(
                    slots, key=lambda k: (rank[types[k]], intel[k].blood, k)
                )
                assert _best_target_slot(slots, intel, types) == expected

    def test_chariot_preferred_over_infantry(self):
        # both blue chariot and blue infantry attackable by the red tank
        cfg = flat_config(
            red=((0, 0), (5, 20), (6, 20)),
            blue=((0, 5), (1, 2), (6, 22)),  # chariot at (1,2), infantry far
        )
        st = reset(cfg, seed=0)
        policy = Kai0Policy(RED, cfg)
        acts = decisions(policy, st)
        assert acts[0] == Action.shoot(4)  # the chariot, not the closer tank


class TestKai0Movement:
    def test_marches_on_the_center_along_the_shortest_path(self):
        cfg = load_scenario(5)  # 67x77: nobody in sight at spawn
        st = reset(cfg, seed=1)
        center = cfg.game_map.center()
        for color in (RED, BLUE):
            policy = Kai0Policy(color, cfg)
            acts = decisions(policy, st)
            for uid, action in acts.items():
                expected = first_step_toward(st.ops[uid].pos, center, cfg.game_map)
                assert action == Action.move(expected)

    def test_mid_move_operators_are_omitted(self):
        cfg = load_scenario(0)
        st = reset(cfg, seed=1)
        policy = Kai0Policy(RED, cfg)
        st.step({**{u: Action.stop() for u in st.decidable_uids()}, 2: Action.move(4)})
        acts = decisions(policy, st)
        assert 2 not in acts  # infantry is walking
        assert set(acts) == {0, 1}

    def test_at_center_with_nothing_to_do_stops(self):
        cfg = flat_config(
            red=((6, 11), (0, 0), (0, 4)),
            blue=((12, 20), (12, 16), (12, 22)),
        )
        st = reset(cfg, seed=0)
        policy = Kai0Policy(RED, cfg)
        acts = decisions(policy, st)
        assert acts[0] == Action.stop()  # tank sits exactly on (6,11)


class TestKai1:
    def test_infantry_heads_for_the_nearest_hidden_cell(self):
        cfg = load_scenario(1)
        st = reset(cfg, seed=1)
        policy = Kai1Policy(RED, cfg)
        acts = decisions(policy, st)
        infantry = st.ops[2]
        dest = policy._destinations[2]
        assert cfg.game_map.is_special(dest)
        nearest = min(
            hex_distance(infantry.pos, c) for c in cfg.game_map.special_cells()
        )
        assert hex_distance(infantry.pos, dest) == nearest
        step = first_step_toward(infantry.pos, dest, cfg.game_map)
        assert acts[2] == Action.move(step)

    def test_holding_a_hidden_cell_means_stop(self):
        special = (5, 5)
        cfg = flat_config(
            red=((0, 0), (0, 4), (5, 5)),
            blue=((12, 20), (12, 16), (12, 22)),
            special_cells=(special,),
        )
        st = reset(cfg, seed=0)
        policy = Kai1Policy(RED, cfg)
        acts = decisions(policy, st)
        assert acts[2] == Action.stop()

    def test_without_hidden_terrain_it_is_kai0(self):
        for st in sample_states(scenario=0, seed=123, count=50):
            for color in (RED, BLUE):
                cfg = st.config
                assert decisions(Kai1Policy(color, cfg), st) == decisions(
                    Kai0Policy(color, cfg), st
                )

    def test_tank_escorts_the_chariot(self):
        cfg = load_scenario(1)
        st = reset(cfg, seed=1)
        # park the chariot away from the tank
        st.ops[1].pos = st.ops[1].pos._replace(row=5)
        st._cache_tick = -1
        policy = Kai1Policy(RED, cfg)
        acts = decisions(policy, st)
        step = first_step_toward(st.ops[0].pos, st.ops[1].pos, cfg.game_map)
        assert acts[0] == Action.move(step)


class TestKai2:
    def _guide_setup(self):
        # blue tank hides on special terrain near the red infantry spotter;
        # the red chariot is in range but cannot see it
        cfg = flat_config(
            rows=13, cols=23,
            red=((5, 3), (5, 4), (5, 10)),     # tank, chariot, infantry(spotter)
            blue=((5, 11), (0, 22), (1, 22)),  # tank on hidden cell next to spotter
            special_cells=((5, 11),),
            guide_shoot=True,
        )
        return cfg

    def test_chariot_prefers_guide_shoot_for_unseen_targets(self):
        cfg = self._guide_setup()
        st = reset(cfg, seed=0)
        for _ in range(2):  # accumulate prep while everyone holds
            st.step({u: Action.stop() for u in st.decidable_uids()})
        assert st.visibility(1, 3) is False
        assert st.visibility(2, 3) is True
        assert st.available_actions(1)[9] is True
        policy = Kai2Policy(RED, cfg)
        acts = decisions(policy, st)
        assert acts[1] == Action.guide_shoot(3)

    def test_without_guide_shoot_it_is_kai1(self):
        for st in sample_states(scenario=1, seed=321, count=50):
            for color in (RED, BLUE):
                cfg = st.config
                assert decisions(Kai2Policy(color, cfg), st) == decisions(
                    Kai1Policy(color, cfg), st
                )

    def test_tank_plays_exactly_like_kai0(self):
        for st in sample_states(scenario=2, seed=55, count=30):
            cfg = st.config
            for color in (RED, BLUE):
                tank_uid = 0 if color == RED else 3
                if not st.ops[tank_uid].alive or st.ops[tank_uid].moving:
                    continue
                kai2 = decisions(Kai2Policy(color, cfg), st)
                kai0 = decisions(Kai0Policy(color, cfg), st)
                assert kai2.get(tank_uid) == kai0.get(tank_uid)

    def test_chariot_parks_inside_its_envelope_of_the_center(self):
        cfg = load_scenario(3)  # 27x37, long approach
        st = reset(cfg, seed=1)
        policy = Kai2Policy(RED, cfg)
        decisions(policy, st)
        dest = policy._chariot_dest[1]
        center = cfg.game_map.center()
        assert hex_distance(dest, center) <= 7
        assert hex_distance(st.ops[1].pos, dest) < hex_distance(st.ops[1].pos, center)


class TestLegalityAndDeterminism:
    def test_full_matches_emit_only_mask_legal_actions(self):
        # the engine rejects any illegal action, so completing is the proof
        for scenario, red, blue in [(0, "KAI0", "KAI0"), (1, "KAI1", "KAI0"), (2, "KAI2", "KAI1")]:
            result = run_match(load_scenario(scenario), seed=11, red=red, blue=blue)
            assert result.winner in ("red", "blue", "draw")

    def test_decisions_are_pure_functions_of_inputs(self):
        cfg = load_scenario(2)
        st = reset(cfg, seed=9)
        for name in ("KAI0", "KAI1", "KAI2"):
            a = decisions(make_policy(name, RED, cfg), st)
            b = decisions(make_policy(name, RED, cfg), st)
            assert a == b

    def test_random_policy_is_seed_deterministic(self):
        cfg = load_scenario(0)
        st = reset(cfg, seed=9)
        a = decisions(RandomPolicy(RED, cfg, seed=4), st)
        b = decisions(RandomPolicy(RED, cfg, seed=4), st)
        assert a == b

    def test_unknown_bot_name_rejected(self):
        with pytest.raises(ConfigError, match="unknown policy"):
            make_policy("KAI9", RED, load_scenario(0))
