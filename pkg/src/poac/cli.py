"""Command-line interface.

    poac play --scenario 0 --seed 7 --red KAI0 --blue KAI0 --record out.poacrep
    poac tournament --scenario 1 --red KAI1 --blue KAI0 --episodes 32
    poac serve --port 8040 --ui-dir frontend/dist --replay-dir replays/
    poac replay verify match.poacrep
    poac replay export match.poacrep [--format tsv|jsonl|frames]
    poac scenario validate my_scenario.json
    poac features [--format tsv|jsonl]
    poac map convert in.map out.map [--check]
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .errors import PoacError
from .hexgrid import load_map, save_map
from .observation import feature_layout
from .replay import frames, read_file, record_match, summary, verify
from .scenarios import apply_override, load_scenario
from .server import DEFAULT_PORT, serve
from .service import format_cells, run_match, run_tournament


def _scenario_arg(text: str):
    """A bundled id like '3', or a path to a scenario JSON document."""
    if text.isdigit():
        return int(text)
    with open(text, "r", encoding="utf-8") as fh:
        return json.load(fh)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="poac", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=f"poac {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("play", help="run one match to termination")
    p.add_argument("--scenario", default="0")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--red", default="KAI0")
    p.add_argument("--blue", default="KAI0")
    p.add_argument("--record", metavar="FILE", help="write a .poacrep replay")
    p.add_argument("--max-ticks", type=int, help="override the episode cap")

    p = sub.add_parser("tournament", help="cross controllers over scenarios")
    p.add_argument("--scenario", default="0", help="comma-separated ids or a config path")
    p.add_argument("--red", default="KAI0", help="comma-separated controller names")
    p.add_argument("--blue", default="KAI0", help="comma-separated controller names")
    p.add_argument("--episodes", type=int, default=32)
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=("tsv", "jsonl"), default="tsv")
    p.add_argument("--out", metavar="FILE", help="write the table here instead of stdout")

    p = sub.add_parser("serve", help="host the protocol servers and UI")
    p.add_argument("--port", type=int, default=DEFAULT_PORT,
                   help="HTTP bridge port; the TCP protocol binds port+1")
    p.add_argument("--ui-dir", help="static assets for the browser client")
    p.add_argument("--replay-dir", help="directory served to the replay viewer")
    p.add_argument("--realtime", type=int, metavar="MS",
                   help="auto-play Empty if a human side idles this long")

    p = sub.add_parser("replay", help="verify or export recorded episodes")
    replay_sub = p.add_subparsers(dest="replay_command", required=True)
    v = replay_sub.add_parser("verify", help="re-simulate and compare")
    v.add_argument("file")
    e = replay_sub.add_parser("export", help="summary table or viewer frames")
    e.add_argument("file")
    e.add_argument("--format", choices=("tsv", "jsonl", "frames"), default="tsv")
    e.add_argument("--side", choices=("red", "blue", "all"), default="all",
                   help="fog applied to exported frames")
    e.add_argument("--out", metavar="FILE")
    s = replay_sub.add_parser("serve", help="host the viewer for one replay dir")
    s.add_argument("dir")
    s.add_argument("--port", type=int, default=DEFAULT_PORT)
    s.add_argument("--ui-dir")

    p = sub.add_parser("scenario", help="scenario document tools")
    scenario_sub = p.add_subparsers(dest="scenario_command", required=True)
    sv = scenario_sub.add_parser("validate", help="check a config document")
    sv.add_argument("file")

    p = sub.add_parser("features", help="dump the feature-vector layout")
    p.add_argument("--format", choices=("tsv", "jsonl"), default="tsv")

    p = sub.add_parser("map", help="map file tools")
    map_sub = p.add_subparsers(dest="map_command", required=True)
    mc = map_sub.add_parser("convert", help="parse and rewrite canonically")
    mc.add_argument("infile")
    mc.add_argument("outfile", nargs="?")
    mc.add_argument("--check", action="store_true", help="validate only")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except PoacError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    if args.command == "play":
        config = load_scenario(_scenario_arg(args.scenario))
        if args.max_ticks is not None:
            config = apply_override(config, "max_ticks", args.max_ticks)
        if args.record:
            record, result = record_match(
                config, args.seed, args.red, args.blue, path=args.record
            )
        else:
            result = run_match(config, args.seed, args.red, args.blue)
        print(
            f"{config.name} seed={args.seed} {args.red} vs {args.blue}: "
            f"winner={result.winner} ticks={result.ticks} "
            f"bloods={result.blood_red:g}/{result.blood_blue:g}"
        )
        return 0

    if args.command == "tournament":
        scenarios = [_scenario_arg(s) for s in args.scenario.split(",")]
        pairings = [
            (red, blue)
            for red in args.red.split(",")
            for blue in args.blue.split(",")
        ]
        cells = run_tournament(pairings, scenarios, args.episodes, args.base_seed, jobs=args.jobs)
        table = format_cells(cells, args.format)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(table)
        else:
            sys.stdout.write(table)
        return 0

    if args.command == "serve":
        print(f"poac serving: http://0.0.0.0:{args.port} (TCP protocol on {args.port + 1})")
        serve(args.port, ui_dir=args.ui_dir, replay_dir=args.replay_dir,
              realtime_ms=args.realtime)
        return 0

    if args.command == "replay":
        return _dispatch_replay(args)

    if args.command == "scenario":
        with open(args.file, "r", encoding="utf-8") as fh:
            load_scenario(json.load(fh))
        print(f"{args.file}: valid")
        return 0

    if args.command == "features":
        layout = feature_layout(3)
        if args.format == "jsonl":
            for kind in ("observation", "global_state"):
                for row in layout[kind]:
                    print(json.dumps({"kind": kind, **row}))
        else:
            print("kind\tname\toffset\twidth\tnormalizer")
            for kind in ("observation", "global_state"):
                for row in layout[kind]:
                    print(f"{kind}\t{row['name']}\t{row['offset']}\t{row['width']}\t{row['normalizer']}")
        return 0

    if args.command == "map":
        with open(args.infile, "r", encoding="utf-8") as fh:
            game_map = load_map(fh.read())
        if args.check or not args.outfile:
            print(f"{args.infile}: valid {game_map.rows}x{game_map.cols} map "
                  f"({len(game_map.special_cells())} special cells)")
            return 0
        with open(args.outfile, "w", encoding="utf-8") as fh:
            fh.write(save_map(game_map))
        print(f"wrote {args.outfile}")
        return 0

    raise AssertionError(f"unhandled command {args.command}")


def _dispatch_replay(args) -> int:
    if args.replay_command == "verify":
        record = read_file(args.file)
        for warning in record.warnings:
            print(f"warning: {warning}", file=sys.stderr)
        report = verify(record)
        if report.engine_version_mismatch:
            print("warning: replay was recorded by a different engine version", file=sys.stderr)
        print(report.status if not report.detail else f"{report.status}: {report.detail}")
        return 0 if report.exact else 1

    if args.replay_command == "export":
        record = read_file(args.file)
        if args.format == "frames":
            body = json.dumps(frames(record, args.side))
        else:
            row = summary(record)
            if args.format == "jsonl":
                body = json.dumps(row) + "\n"
            else:
                keys = list(row)
                body = "\t".join(keys) + "\n" + "\t".join(str(row[k]) for k in keys) + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(body)
        else:
            sys.stdout.write(body)
        return 0

    if args.replay_command == "serve":
        print(f"poac replay viewer: http://0.0.0.0:{args.port}")
        serve(args.port, ui_dir=args.ui_dir, replay_dir=args.dir)
        return 0

    raise AssertionError(f"unhandled replay command {args.replay_command}")


if __name__ == "__main__":
    sys.exit(main())
