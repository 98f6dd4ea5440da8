"""Command-line interface: simulate, gen-trace, report."""

from __future__ import annotations

import argparse
import os
import sys

from . import engine
from .errors import SimError
from .workloads import generate, load_workload_spec, save_trace


def _cmd_simulate(args) -> int:
    overrides = {}
    if args.policy is not None:
        overrides["policy"] = args.policy
    if args.fast_ratio is not None:
        overrides["fast_ratio"] = args.fast_ratio
    if args.seed is not None:
        overrides["workload.seed"] = args.seed
    config = engine.load_run_config(args.config, overrides)
    out_dir = args.out or config.label
    os.makedirs(out_dir, exist_ok=True)
    sim = engine.Simulation(config)
    tier_names = (config.fast_tier.name, config.slow_tier.name)
    try:
        for stat in sim.epochs():
            if args.verbose:
                print(f"epoch {stat.epoch_index}: {stat.simulated_time_ns / 1e9:.3f} s, "
                      f"{stat.relocations} relocations", file=sys.stderr)
    except SimError:
        if args.keep_partial and sim.stats:
            engine.write_epoch_csv(sim.stats, tier_names,
                                   os.path.join(out_dir, "epochs.csv"))
        raise
    engine.write_epoch_csv(sim.stats, tier_names, os.path.join(out_dir, "epochs.csv"))
    result = sim.result()
    engine.write_run_summary(result, os.path.join(out_dir, "run.json"))
    print(f"{result.label}: {result.total_simulated_ns / 1e9:.3f} s simulated, "
          f"{result.total_relocations} relocations, mapping {result.mapping_digest}")
    return 0


def _cmd_gen_trace(args) -> int:
    spec = load_workload_spec(args.spec)
    save_trace(generate(spec), args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_report(args) -> int:
    import json

    runs = []
    for run_dir in args.runs:
        path = os.path.join(run_dir, "run.json")
        try:
            with open(path) as f:
                payload = json.load(f)
        except (OSError, ValueError) as e:
            raise SimError(f"cannot read run summary {path}: {e}") from e
        runs.append((payload["label"], float(payload["total_simulated_ns"])))
    engine.write_comparison_csv(runs, args.baseline, args.out)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tiersim",
        description="Hybrid DRAM+NVM memory simulator with dynamic page remapping")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a simulation from a config file")
    sim.add_argument("--config", required=True)
    sim.add_argument("--policy", choices=("raminate", "none", "dram_cache", "static_oracle"))
    sim.add_argument("--fast-ratio", type=float, dest="fast_ratio")
    sim.add_argument("--seed", type=int)
    sim.add_argument("--out", help="output directory (default: run label)")
    sim.add_argument("--keep-partial", action="store_true")
    sim.add_argument("-v", "--verbose", action="store_true")
    sim.set_defaults(func=_cmd_simulate)

    gen = sub.add_parser("gen-trace", help="generate a workload trace file")
    gen.add_argument("--spec", required=True)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_gen_trace)

    rep = sub.add_parser("report", help="summarize finished runs against a baseline")
    rep.add_argument("--runs", nargs="+", required=True)
    rep.add_argument("--baseline", required=True)
    rep.add_argument("--out", required=True)
    rep.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SimError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
