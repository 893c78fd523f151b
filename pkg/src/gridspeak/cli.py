"""Command line entry points: run scripts, explore regions, REPL, serve HTTP."""
from __future__ import annotations

import argparse
import sys

from .config import QuantifierTable, load_action_registry
from .core import GridspeakError, ParseError
from .executor import Simulation, load_script, run_script
from .grammar import Lexicon, parse_instruction
from .resolver import DEFAULT_SEED
from .world import load_world_file


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridspeak",
        description="Interpret and simulate grid-world instructions in controlled English.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("world", help="world definition YAML file")
        p.add_argument("--actions", help="action registry YAML file (defaults built in)")
        p.add_argument("--quantifiers", help="quantifier table YAML file (defaults built in)")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for path sampling")
        p.add_argument("--radius", type=float, default=None, help="closeness radius override")

    run = sub.add_parser("run", help="run instruction scripts to completion")
    add_common(run)
    run.add_argument(
        "--script",
        action="append",
        default=[],
        metavar="AGENT=FILE",
        help="assign a script file to an agent (repeatable)",
    )
    run.add_argument("--trace", help="also write the trace to this file")
    run.add_argument("--check", help="compare the trace against this golden file")
    run.add_argument("--max-ticks", type=int, default=2000, help="safety tick limit")
    run.set_defaults(func=cmd_run)

    repl = sub.add_parser("repl", help="interactively submit instructions")
    add_common(repl)
    repl.add_argument("--agent", help="agent receiving instructions (defaults when unique)")
    repl.set_defaults(func=cmd_repl)

    regions = sub.add_parser("regions", help="print the fuzzy region table for a location")
    add_common(regions)
    regions.add_argument("location", help="location id, e.g. 'Office 0'")
    regions.set_defaults(func=cmd_regions)

    serve = sub.add_parser("serve", help="serve the HTTP API")
    add_common(serve)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--tick-interval", type=float, default=0.1)
    serve.add_argument("--ui", help="directory of static UI files to mount at /ui")
    serve.set_defaults(func=cmd_serve)

    return parser


def _setup(args) -> tuple:
    world = load_world_file(args.world)
    registry = load_action_registry(args.actions)
    qtable = QuantifierTable.from_file(args.quantifiers) if args.quantifiers else QuantifierTable()
    return world, registry, qtable


def cmd_run(args) -> int:
    world, registry, qtable = _setup(args)
    scripts: dict[str, list[str]] = {}
    for spec in args.script:
        if "=" not in spec:
            print(f"--script expects AGENT=FILE, got {spec!r}", file=sys.stderr)
            return 1
        agent_id, path = spec.split("=", 1)
        if agent_id not in world.agents:
            print(f"unknown agent {agent_id!r}", file=sys.stderr)
            return 1
        scripts[agent_id] = load_script(path)
    lexicon = Lexicon.build(registry, world)
    for agent_id, lines in scripts.items():
        for line in lines:
            try:
                parse_instruction(line, lexicon)
            except ParseError as exc:
                print(f"{agent_id}: cannot parse {line!r}: {exc}", file=sys.stderr)
                return 1
    sim = run_script(
        world,
        scripts,
        registry=registry,
        qtable=qtable,
        seed=args.seed,
        radius=args.radius,
        max_ticks=args.max_ticks,
    )
    lines = [event.to_line() for event in sim.trace]
    for line in lines:
        print(line)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    if args.check:
        with open(args.check, "r", encoding="utf-8") as fh:
            expected = [l.rstrip("\n") for l in fh if l.strip()]
        if lines != expected:
            for i, (got, want) in enumerate(zip(lines + ["<end>"], expected + ["<end>"])):
                if got != want:
                    print(f"trace mismatch at line {i + 1}:", file=sys.stderr)
                    print(f"  expected: {want}", file=sys.stderr)
                    print(f"  got:      {got}", file=sys.stderr)
                    break
            return 2
    return 0


def cmd_repl(args) -> int:
    world, registry, qtable = _setup(args)
    sim = Simulation(world, registry=registry, qtable=qtable, seed=args.seed, radius=args.radius)
    agents = list(world.agents)
    default_agent = agents[0] if len(agents) == 1 else None
    if args.agent is not None:
        if args.agent not in world.agents:
            print(f"unknown agent {args.agent!r}", file=sys.stderr)
            return 1
        default_agent = args.agent
    print(f"agents: {', '.join(agents)}")
    if default_agent is None:
        print("address instructions as '<agent>: <instruction>'")
    while True:
        try:
            line = input("> ").strip()
        except EOFError:
            break
        if not line:
            continue
        if line.lower() in ("quit", "exit"):
            break
        agent_id, text = default_agent, line
        if ":" in line:
            head, rest = line.split(":", 1)
            if head.strip() in world.agents:
                agent_id, text = head.strip(), rest.strip()
        if agent_id is None:
            print("address instructions as '<agent>: <instruction>'")
            continue
        start = len(sim.trace)
        try:
            resolution = sim.submit(agent_id, text)
        except ParseError as exc:
            print(f"parse error: {exc}")
            continue
        if resolution.objects:
            print("selected: " + ", ".join(resolution.objects))
        if not resolution.warnings:
            print("no warnings")
        sim.run_until_idle()
        for event in sim.trace[start:]:
            print(event.to_line())
    return 0


def cmd_regions(args) -> int:
    world, _, _ = _setup(args)
    location_id = args.location
    if location_id not in world.locations:
        matches = [l for l in world.locations if l.lower() == location_id.lower()]
        if not matches:
            print(f"unknown location {location_id!r}", file=sys.stderr)
            return 1
        location_id = matches[0]
    rmap = world.region_map(location_id)
    print(f"{location_id}: gWidth={rmap.g_width} gLength={rmap.g_length}")
    for kind, instance, degree, cells in rmap.rows():
        if not cells:
            continue
        cell_text = " ".join(f"{c.x},{c.z}" for c in sorted(cells))
        print(f"{kind:<7} {instance:<2} {degree:<9} {cell_text}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    world, registry, qtable = _setup(args)
    app = create_app(
        world,
        registry=registry,
        qtable=qtable,
        seed=args.seed,
        radius=args.radius,
        tick_interval=args.tick_interval,
        ui_dir=args.ui,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"file not found: {exc.filename}", file=sys.stderr)
        return 1
    except GridspeakError as exc:
        print(str(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
