"""Scenario config tests: bundled table, documents, overrides, validation."""

import json

import pytest

from poac.engine import reset
from poac.errors import ConfigError
from poac.hexgrid import HexCoord, load_map
from poac.scenarios import (
    apply_override,
    from_document,
    load_scenario,
    scenario_map_text,
)
from poac.service import run_match

BUNDLED_TABLE = {
    # id: (rows, cols, special_terrain, guide_shoot)
    0: (13, 23, False, False),
    1: (13, 23, True, False),
    2: (17, 27, True, True),
    3: (27, 37, True, True),
    4: (27, 37, True, True),
    5: (67, 77, True, True),
}


class TestBundledScenarios:
    @pytest.mark.parametrize("sid", sorted(BUNDLED_TABLE))
    def test_dimensions_and_flags(self, sid):
        rows, cols, special, guide = BUNDLED_TABLE[sid]
        cfg = load_scenario(sid)
        assert (cfg.game_map.rows, cfg.game_map.cols) == (rows, cols)
        assert cfg.special_terrain is special
        assert cfg.guide_shoot is guide
        assert cfg.max_ticks == 600
        assert cfg.roster == ("tank", "chariot", "infantry")

    def test_scenario_0_has_no_special_cells(self):
        assert load_scenario(0).game_map.special_cells() == []

    @pytest.mark.parametrize("sid", [1, 2, 3, 4, 5])
    def test_terrain_scenarios_have_special_cells(self, sid):
        assert len(load_scenario(sid).game_map.special_cells()) > 0

    def test_scenarios_3_and_4_share_shape_but_not_layout(self):
        a, b = load_scenario(3), load_scenario(4)
        assert (a.game_map.rows, a.game_map.cols) == (b.game_map.rows, b.game_map.cols)
        assert a.game_map.terrain != b.game_map.terrain

    @pytest.mark.parametrize("sid", sorted(BUNDLED_TABLE))
    def test_boards_and_spawns_are_mirror_images(self, sid):
        cfg = load_scenario(sid)
        m = cfg.game_map
        assert m.is_mirror_symmetric()
        assert tuple(m.mirror_coord(c) for c in cfg.init_red) == cfg.init_blue

    def test_scenario_3_map_round_trips_through_the_map_format(self):
        m = load_map(scenario_map_text(3))
        assert (m.rows, m.cols) == (27, 37)
        assert m == load_scenario(3).game_map

    def test_generation_is_stable_across_calls(self):
        assert load_scenario(2).game_map == load_scenario(2).game_map

    def test_unknown_id_rejected(self):
        with pytest.raises(ConfigError, match="unknown bundled scenario"):
            load_scenario(17)

    @pytest.mark.parametrize("sid", sorted(BUNDLED_TABLE))
    def test_every_bundle_plays_to_termination(self, sid):
        result = run_match(load_scenario(sid), seed=3, red="KAI0", blue="KAI0")
        assert result.winner in ("red", "blue", "draw")
        assert 0 < result.ticks <= 600


class TestDocuments:
    @pytest.mark.parametrize("sid", sorted(BUNDLED_TABLE))
    def test_round_trip_identity(self, sid):
        cfg = load_scenario(sid)
        doc = cfg.to_document()
        again = from_document(json.loads(json.dumps(doc)))
        assert again.to_document() == doc

    def test_load_scenario_accepts_json_text(self):
        cfg = load_scenario(0)
        again = load_scenario(cfg.dumps())
        assert again.to_document() == cfg.to_document()

    def test_single_init_override_keeps_the_rest(self):
        cfg = load_scenario(0)
        doc = cfg.to_document()
        doc["init_hex"]["red"][1] = [4, 4]
        patched = from_document(doc)
        st = reset(patched, seed=1)
        assert st.ops[1].pos == HexCoord(4, 4)
        assert st.ops[0].pos == cfg.init_red[0]
        assert st.ops[3].pos == cfg.init_blue[0]

    def test_unknown_field_is_named(self):
        doc = load_scenario(0).to_document()
        doc["wibble"] = 1
        with pytest.raises(ConfigError, match="wibble"):
            from_document(doc)

    def test_bad_probability_is_pathed(self):
        doc = load_scenario(0).to_document()
        doc["operator_specs"]["tank"]["p_vehicle"] = 1.7
        with pytest.raises(ConfigError, match="operator_specs.tank"):
            from_document(doc)

    def test_terrain_under_disabled_flag_is_rejected(self):
        doc = load_scenario(0).to_document()
        doc["map"]["terrain"][3] = "1" + doc["map"]["terrain"][3][1:]
        with pytest.raises(ConfigError, match="special_terrain"):
            from_document(doc)


class TestOverrides:
    def test_infantry_speed_one_makes_movement_synchronous(self):
        cfg = apply_override(load_scenario(0), "operator_specs.infantry.speed", 1)
        assert cfg.operator_specs["infantry"].ticks_per_hex == 1

    def test_max_ticks_caps_the_episode(self):
        cfg = apply_override(load_scenario(0), "max_ticks", 100)
        result = run_match(cfg, seed=5, red="random", blue="random")
        assert result.ticks <= 100

    def test_override_onto_an_occupied_cell_is_rejected(self):
        cfg = load_scenario(0)
        taken = [cfg.init_red[0].row, cfg.init_red[0].col]
        with pytest.raises(ConfigError, match="distinct"):
            apply_override(cfg, "init_hex.blue.0", taken)

    def test_unknown_path_is_rejected(self):
        with pytest.raises(ConfigError, match="unknown config field"):
            apply_override(load_scenario(0), "gravity", 9.8)

    def test_intermediate_path_errors_name_the_prefix(self):
        with pytest.raises(ConfigError, match="operator_specs.goblin"):
            apply_override(load_scenario(0), "operator_specs.goblin.speed", 1)

    def test_guide_shoot_flag_override(self):
        cfg = apply_override(load_scenario(2), "guide_shoot", False)
        assert cfg.guide_shoot is False

    def test_range_semantics_override_validated(self):
        with pytest.raises(ConfigError, match="range_semantics"):
            apply_override(load_scenario(0), "range_semantics", "psychic")


class TestMirroredScenario:
    def test_bundles_mirror_to_themselves_with_streams_swapped(self):
        cfg = load_scenario(1)
        mirrored = cfg.mirrored()
        assert mirrored.game_map == cfg.game_map
        assert mirrored.init_red == cfg.init_red
        assert mirrored.init_blue == cfg.init_blue
        assert mirrored.damage_stream_ids == (1, 0)

    def test_asymmetric_configs_mirror_geometrically(self):
        doc = load_scenario(1).to_document()
        doc["init_hex"]["red"] = [[0, 7], [1, 11], [2, 15]]
        cfg = from_document(doc)
        mirrored = cfg.mirrored()
        m = cfg.game_map
        assert mirrored.init_blue == tuple(m.mirror_coord(c) for c in cfg.init_red)
        assert mirrored.init_red == tuple(m.mirror_coord(c) for c in cfg.init_blue)
