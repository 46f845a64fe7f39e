"""Batch command-line interface.

Every output records the seed and the sha256 of each input file. Verdicts and
simulation failures are data; the exit code is nonzero only for unreadable or
structurally invalid input.
"""
from __future__ import annotations

import argparse
import hashlib
import io
import json
import sys
from pathlib import Path

from .channel import load_channel
from .distribution import load_distribution
from .errors import BCCRError
from .maccm import build_plan, load_network
from .region import (
    RATE_KEEP,
    build_system,
    compare_regions,
    compute_profile,
    fmt,
    membership,
    project_to_rates,
    region_boundary,
    write_points_csv,
    write_region_csv,
)
from .simulator import SimConfig, load_sim_config, run_experiment

EXIT_STRUCTURE = 2


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _manifest(command: str, inputs: dict, seed: int, **extra) -> dict:
    return {
        "command": command,
        "seed": seed,
        "inputs": {k: {"path": str(p), "sha256": _sha256(p)} for k, p in inputs.items()},
        **extra,
    }


def _rounded(obj):
    """Round every float to 12 significant digits for stable output."""
    if isinstance(obj, float):
        return float(fmt(obj))
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    return obj


def _dump(obj) -> str:
    return json.dumps(_rounded(obj), indent=2, ensure_ascii=False) + "\n"


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _parse_point(text: str) -> tuple:
    try:
        values = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise BCCRError(f"--point must be comma-separated numbers, got {text!r}") from None
    if len(values) not in (2, 3):
        raise BCCRError("--point takes r0,r1,r2 (or r1,r2)")
    return values


def _parse_sizes(text: str) -> dict:
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        name, _, value = item.partition("=")
        if not value:
            raise BCCRError(f"--sizes entries look like W1=2, got {item!r}")
        out[name.strip().upper()] = int(value)
    return out


def _header_lines(manifest: dict) -> str:
    lines = [f"# command: {manifest['command']}", f"# seed: {manifest['seed']}"]
    for name, info in manifest["inputs"].items():
        lines.append(f"# {name}: {info['path']} sha256={info['sha256']}")
    return "\n".join(lines) + "\n"


def cmd_region(args) -> int:
    chan = load_channel(args.channel)
    dist = load_distribution(args.dist)
    profile = compute_profile(dist, chan)
    region = project_to_rates(build_system(profile, args.variant), RATE_KEEP[args.variant])
    manifest = _manifest("region", {"channel": args.channel, "dist": args.dist}, args.seed, variant=args.variant)
    buf = io.StringIO()
    buf.write(_header_lines(manifest))
    write_region_csv(region, buf)
    _emit(buf.getvalue(), args.out)
    profile_text = _dump({**manifest, "profile": profile.to_json()})
    if args.out:
        Path(args.profile_out or Path(args.out).with_suffix(".profile.json")).write_text(profile_text)
    elif args.profile_out:
        Path(args.profile_out).write_text(profile_text)
    return 0


def cmd_check(args) -> int:
    chan = load_channel(args.channel)
    dist = load_distribution(args.dist)
    profile = compute_profile(dist, chan)
    point = _parse_point(args.point)
    if args.variant == "nocm" and len(point) == 3:
        if point[0] != 0:
            raise BCCRError("the no-common-message region has r0 = 0")
        point = point[1:]
    if args.variant == "cm" and len(point) == 2:
        point = (0.0,) + point
    if min(point) < 0:
        raise BCCRError("rates must be nonnegative")
    inside = membership(point, profile, args.variant)
    region = project_to_rates(build_system(profile, args.variant), RATE_KEEP[args.variant])
    named = dict(zip(region.variables, point))
    rows = [(c, c.slack(named)) for c in region.constraints if not c.is_constant]
    if inside:
        listed = [{"row": str(c), "label": c.label, "slack": s} for c, s in rows if abs(s) <= 1e-9]
        key = "binding"
    else:
        listed = [{"row": str(c), "label": c.label, "slack": s} for c, s in rows if s < -1e-9]
        key = "violated"
    manifest = _manifest("check", {"channel": args.channel, "dist": args.dist}, args.seed, variant=args.variant)
    report = {**manifest, "point": list(point), "verdict": "in" if inside else "out", key: listed}
    _emit(_dump(report), args.out)
    return 0


def cmd_compare(args) -> int:
    chan = load_channel(args.channel)
    dist = load_distribution(args.dist)
    report = compare_regions(dist, chan, step=args.step)
    manifest = _manifest("compare", {"channel": args.channel, "dist": args.dist}, args.seed, step=args.step)
    _emit(_dump({**manifest, **report.to_json()}), args.out)
    return 0


def cmd_simulate(args) -> int:
    chan = load_channel(args.channel)
    dist = load_distribution(args.dist)
    config = load_sim_config(args.sim)
    overrides = {}
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        config = SimConfig(**{**config.to_json(), **overrides})
    report = run_experiment(dist, chan, config)
    inputs = {"channel": args.channel, "dist": args.dist, "sim": args.sim}
    manifest = _manifest("simulate", inputs, config.seed, config=config.to_json())
    _emit(_dump({**manifest, "report": report.to_json()}), args.out)
    return 0


def cmd_maccm(args) -> int:
    spec = load_network(args.network)
    graph = build_plan(spec)
    manifest = _manifest("maccm", {"network": args.network}, args.seed)
    if args.dot:
        header = "".join(f"// {line[2:]}\n" for line in _header_lines(manifest).splitlines())
        Path(args.dot).write_text(header + graph.to_dot())
    text = json.dumps({**manifest, "graph": json.loads(graph.to_json())}, indent=2) + "\n"
    _emit(text, args.out)
    return 0


def cmd_boundary(args) -> int:
    chan = load_channel(args.channel)
    sizes = _parse_sizes(args.sizes)
    points = region_boundary(chan, args.variant, args.budget, args.seed, sizes)
    manifest = _manifest("boundary", {"channel": args.channel}, args.seed, variant=args.variant, budget=args.budget)
    buf = io.StringIO()
    buf.write(_header_lines(manifest))
    write_points_csv(points, buf)
    _emit(buf.getvalue(), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bccr", description="Rate regions, simulation and message plans for the BCCR.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, variant=True):
        if variant:
            p.add_argument("--variant", choices=("cm", "nocm"), default="cm")
        p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("region", help="project the region of a distribution to rate space (CSV)")
    p.add_argument("channel")
    p.add_argument("dist")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--profile-out", help="profile JSON path (default: next to --out)")
    common(p)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("check", help="membership verdict for one rate point")
    p.add_argument("channel")
    p.add_argument("dist")
    p.add_argument("--point", required=True, help="r0,r1,r2")
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("compare", help="full region against its reductions")
    p.add_argument("channel")
    p.add_argument("dist")
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    common(p, variant=False)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("simulate", help="Monte Carlo run of the coding scheme")
    p.add_argument("channel")
    p.add_argument("dist")
    p.add_argument("sim")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    common(p, variant=False)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("maccm", help="message-plan graph of a network")
    p.add_argument("network")
    p.add_argument("--dot", help="write Graphviz DOT here")
    p.add_argument("--seed", type=int, default=0)
    common(p, variant=False)
    p.set_defaults(func=cmd_maccm)

    p = sub.add_parser("boundary", help="Pareto points over sampled distributions (CSV)")
    p.add_argument("channel")
    p.add_argument("--sizes", default="W1=2,U1=2,W2=2,V2=2,WB=2,UB=2,VB=2")
    p.add_argument("--budget", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_boundary)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (BCCRError, OSError, ValueError) as exc:
        print(f"bccr {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_STRUCTURE


if __name__ == "__main__":
    sys.exit(main())
