"""Replay format tests: round-trips, digests, truncation recovery, verification."""

import pytest

from poac.errors import ReplayDigestError, ReplayFormatError
from poac.replay import ReplayRecord, read, record_match, summary, verify, write
from poac.scenarios import apply_override, load_scenario


@pytest.fixture(scope="module")
def recorded():
    record, result = record_match(load_scenario(0), seed=7, red="KAI0", blue="KAI0")
    return record, result


class TestRoundTrip:
    def test_read_write_identity(self, recorded):
        record, _ = recorded
        assert read(write(record)) == record

    def test_footer_matches_the_match(self, recorded):
        record, result = recorded
        assert record.footer["winner"] == result.winner
        assert record.footer["ticks"] == result.ticks
        assert len(record.ticks) == result.ticks

    def test_zero_tick_episode_round_trips_with_empty_body(self):
        cfg = apply_override(load_scenario(0), "max_ticks", 0)
        record, result = record_match(cfg, seed=1, red="KAI0", blue="KAI0")
        assert record.ticks == []
        assert record.footer["winner"] == "draw"
        assert read(write(record)) == record

    def test_bytes_input_accepted(self, recorded):
        record, _ = recorded
        assert read(write(record).encode()) == record


class TestIntegrity:
    def test_single_byte_tamper_is_caught(self, recorded):
        record, _ = recorded
        text = write(record)
        lines = text.splitlines()
        body_line = 3
        tampered = lines[body_line]
        flip = "5" if tampered[12] != "5" else "6"
        lines[body_line] = tampered[:12] + flip + tampered[13:]
        with pytest.raises((ReplayDigestError, ReplayFormatError)):
            read("\n".join(lines) + "\n")

    def test_wrong_magic_rejected(self):
        with pytest.raises(ReplayFormatError, match="not a replay"):
            read("HELLO 9\n{}\n")

    def test_truncated_body_recovers_prefix_with_warning(self, recorded):
        record, _ = recorded
        text = write(record)
        lines = text.splitlines()
        cut = lines[: 2 + max(1, len(record.ticks) // 2)]
        recovered = read("\n".join(cut) + "\n")
        assert recovered.truncated
        assert recovered.footer is None
        assert recovered.warnings
        assert len(recovered.ticks) == len(cut) - 2

    def test_torn_final_line_is_dropped(self, recorded):
        record, _ = recorded
        text = write(record)
        lines = text.splitlines()[:-1]  # drop footer
        lines[-1] = lines[-1][: len(lines[-1]) // 2]  # tear the last tick
        recovered = read("\n".join(lines) + "\n")
        assert recovered.truncated
        assert any("torn" in w for w in recovered.warnings)


class TestVerify:
    def test_unmodified_record_is_exact(self, recorded):
        record, _ = recorded
        report = verify(record)
        assert report.status == "exact"
        assert report.exact

    def test_one_altered_action_diverges_at_that_tick(self, recorded):
        record, _ = recorded
        tampered = ReplayRecord(
            header=record.header,
            ticks=[t for t in record.ticks],
            footer=record.footer,
        )
        victim = len(record.ticks) // 2
        original = tampered.ticks[victim]
        patched_actions = dict(original.actions)
        uid = sorted(patched_actions)[0]
        patched_actions[uid] = "x" if patched_actions[uid] != "x" else "e"
        from poac.replay import TickRecord

        tampered.ticks[victim] = TickRecord(
            tick=original.tick,
            actions=patched_actions,
            events=original.events,
            reward_red=original.reward_red,
        )
        report = verify(read(write(tampered)))
        assert report.status == "diverged"
        assert report.divergence_tick == original.tick

    def test_version_mismatch_reported_but_compared(self, recorded):
        record, _ = recorded
        header = dict(record.header)
        header["engine_version"] = "0.0.0-ancient"
        relabeled = read(write(ReplayRecord(header, record.ticks, record.footer)))
        report = verify(relabeled)
        assert report.engine_version_mismatch
        assert report.status == "exact"

    def test_long_fuzzed_episode_verifies_exact(self):
        cfg = apply_override(load_scenario(2), "max_ticks", 1000)
        record, result = record_match(cfg, seed=99, red="random", blue="random")
        assert result.ticks >= 600 or result.winner != "draw"
        assert verify(record).exact

    def test_truncated_record_verifies_as_prefix(self, recorded):
        record, _ = recorded
        text = write(record)
        lines = text.splitlines()
        recovered = read("\n".join(lines[:-1]) + "\n")  # no footer
        report = verify(recovered)
        assert report.status == "truncated"


class TestSummary:
    def test_summary_counts_events(self, recorded):
        record, result = recorded
        s = summary(record)
        assert s["winner"] == result.winner
        assert s["ticks"] == result.ticks
        assert s["shots"] >= s["hits"] >= 0
        assert s["deaths"] >= 1  # a decisive scenario-0 rush always kills
