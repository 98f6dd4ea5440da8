#!/usr/bin/env python3
"""Relocations per epoch across hot-set phase changes.

Runs the phased workload with long phases under dynamic remapping and prints
the per-epoch relocation counts, which spike at each phase boundary and decay
as the placement converges.
"""

import argparse
import os

from tiersim import engine


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=os.path.join(
        os.path.dirname(__file__), "..", "configs", "phased-remap.cfg"))
    parser.add_argument("--epochs", type=int, default=48)
    parser.add_argument("--phase-length", type=int, default=24)
    parser.add_argument("--out", default="runs/decay")
    args = parser.parse_args()

    config = engine.load_run_config(args.config, {
        "label": "decay",
        "workload.epochs": args.epochs,
        "workload.phase_length": args.phase_length,
    })
    result = engine.run(config)
    os.makedirs(args.out, exist_ok=True)
    names = (config.fast_tier.name, config.slow_tier.name)
    engine.write_epoch_csv(result.stats, names,
                           os.path.join(args.out, "epochs.csv"))
    for s in result.stats:
        bar = "#" * min(60, s.relocations)
        print(f"epoch {s.epoch_index:3d}  {s.relocations:5d} {bar}")


if __name__ == "__main__":
    main()
