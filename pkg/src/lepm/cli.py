"""Command-line entry point: run, sweep, demo, and validate subcommands."""

from __future__ import annotations

import argparse
import itertools
import json
import sys

import yaml

from .config import ConfigError, load_config, validate_config
from .demo import run_demo, write_demo_csv
from .runner import run_experiment, sweep


def _parse_value(text: str):
    return yaml.safe_load(text)


def _parse_sets(pairs: list[str]) -> dict:
    overrides = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            raise SystemExit(f"--set expects key=value, got: {pair}")
        overrides[key] = _parse_value(value)
    return overrides


def _split_outside_brackets(text: str) -> list[str]:
    """Split on commas that are not nested inside [] brackets."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def _parse_grid(spec: str) -> list[dict]:
    """Turn "a=1,2;b=x,y" into the cartesian list of override mappings."""
    axes = []
    for axis in spec.split(";"):
        key, sep, values = axis.partition("=")
        if not sep:
            raise SystemExit(f"--grid axis needs key=v1,v2,... got: {axis}")
        axes.append([(key.strip(), _parse_value(v))
                     for v in _split_outside_brackets(values)])
    return [dict(cell) for cell in itertools.product(*axes)]


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="lepm",
        description="Delayed-network simulator with prospective compensation")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one configured experiment")
    p_run.add_argument("config")
    p_run.add_argument("--out", help="output directory (default from config)")
    p_run.add_argument("--seed", type=int, help="override config seed")
    p_run.add_argument("--every", type=int, help="metrics thinning cadence")
    p_run.add_argument("--set", action="append", default=[], metavar="K=V",
                       help="override a dotted config key")

    p_sweep = sub.add_parser("sweep", help="grid of runs across seeds")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--grid", default="",
                         help='axes like "delays.steps=5,10;seed=0,1"')
    p_sweep.add_argument("--grid-file",
                         help="YAML list of override mappings, one per cell")
    p_sweep.add_argument("--seeds", default="0",
                         help="comma-separated seed list")
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--workers", type=int)

    p_demo = sub.add_parser("demo",
                            help="three-neuron delayed streaming-GD chain")
    p_demo.add_argument("--delta", type=int, default=33,
                        help="message delay in steps")
    p_demo.add_argument("--steps", type=int, default=100_000)
    p_demo.add_argument("--lr", type=float, default=0.05)
    p_demo.add_argument("--period", type=int, default=100,
                        help="sine input period in steps")
    p_demo.add_argument("--out", default="demo.csv")

    p_val = sub.add_parser("validate", help="schema-check a config file")
    p_val.add_argument("config")

    args = parser.parse_args(argv)

    if args.command == "validate":
        with open(args.config) as fh:
            raw = yaml.safe_load(fh)
        violations = validate_config(raw)
        if violations:
            for v in violations:
                print(f"error: {v}")
            return 1
        print("ok")
        return 0

    if args.command == "run":
        overrides = _parse_sets(args.set)
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.every is not None:
            overrides["metrics.every"] = args.every
        try:
            cfg = load_config(args.config, overrides)
        except ConfigError as err:
            print(err, file=sys.stderr)
            return 1
        summary = run_experiment(cfg, args.out)
        print(json.dumps(summary, indent=2, sort_keys=True))
        return 0

    if args.command == "sweep":
        with open(args.config) as fh:
            base_raw = yaml.safe_load(fh) or {}
        violations = validate_config(base_raw)
        if violations:
            for v in violations:
                print(f"error: {v}", file=sys.stderr)
            return 1
        if args.grid_file:
            with open(args.grid_file) as fh:
                grid = yaml.safe_load(fh)
            if not isinstance(grid, list):
                raise SystemExit("--grid-file must contain a YAML list")
        elif args.grid:
            grid = _parse_grid(args.grid)
        else:
            grid = [{}]
        seeds = [int(s) for s in args.seeds.split(",")]
        rows = sweep(base_raw, grid, seeds, args.out, workers=args.workers)
        for row in rows:
            print(f"{row['cell']}: median={row['median']:.6g} "
                  f"range=[{row['min']:.6g}, {row['max']:.6g}] "
                  f"diverged={row['diverged']}/{row['n']}")
        return 0

    if args.command == "demo":
        result = run_demo(args.delta, args.steps, lr=args.lr,
                          period_steps=args.period)
        write_demo_csv(result.rows, args.out)
        print(f"wrote {args.out}: {len(result.rows)} steps, "
              f"{result.sign_changes} gradient sign changes, "
              f"converged={result.final_small}")
        return 0

    return 2


if __name__ == "__main__":
    raise SystemExit(main())
