#!/usr/bin/env python3
"""Elapsed-time comparison across placement policies and mixed ratios.

Runs the calibrated phased workload under four setups (all-DRAM, dynamic
remapping at a 1% mixed ratio, static 1% mapping, all-NVM), writes one run
directory each plus a summary CSV with slowdowns relative to all-DRAM.
"""

import argparse
import os

from tiersim import engine

SETUPS = [
    # label, policy, fast_ratio
    ("all-fast", "none", 1.0),
    ("remap-1pct", "raminate", 0.01),
    ("static-1pct", "none", 0.01),
    ("all-slow", "none", 0.0),
]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=os.path.join(
        os.path.dirname(__file__), "..", "configs", "phased-remap.cfg"))
    parser.add_argument("--out", default="runs")
    args = parser.parse_args()

    totals = []
    for label, policy, ratio in SETUPS:
        config = engine.load_run_config(
            args.config, {"label": label, "policy": policy, "fast_ratio": ratio})
        result = engine.run(config)
        out_dir = os.path.join(args.out, label)
        os.makedirs(out_dir, exist_ok=True)
        names = (config.fast_tier.name, config.slow_tier.name)
        engine.write_epoch_csv(result.stats, names,
                               os.path.join(out_dir, "epochs.csv"))
        engine.write_run_summary(result, os.path.join(out_dir, "run.json"))
        totals.append((label, result.total_simulated_ns))
        print(f"{label:12} {result.total_simulated_ns / 1e6:8.1f} ms  "
              f"{result.total_relocations:5d} relocations")

    summary = os.path.join(args.out, "summary.csv")
    engine.write_comparison_csv(totals, "all-fast", summary)
    print(f"wrote {summary}")


if __name__ == "__main__":
    main()
