#!/usr/bin/env python3
"""Device micro-benchmarks: per-hop chase latency and scan bandwidth sweep.

Prints a latency table (read-only and write-back pointer chase per preset)
and a worker-count bandwidth sweep per preset.
"""

import argparse

import tiersim as ts
from tiersim.memmodel import CACHELINE, FULL, READ_MISS, LlcFilter, effective_parallelism
from tiersim.workloads import WorkloadSpec

PRESETS = ("dram-interleaved", "dcpmm-interleaved", "dcpmm-noninterleaved")


def filtered_demand(spec, cache):
    llc = LlcFilter(cache)
    reads = wbs = 0
    for batch in ts.generate(spec).epochs():
        _, kinds, counts = llc.filter_arrays(batch.ops, batch.addrs)
        r = int(counts[kinds == READ_MISS].sum())
        reads += r
        wbs += int(counts.sum()) - r
    return ts.TierDemand(read_misses=reads, writebacks=wbs)


def chase_latency(tier, kind):
    cache = ts.CacheConfig(llc_capacity=256 * 1024, associativity=FULL, mlp=1)
    spec = WorkloadSpec(kind=kind, buffer_bytes=4 * cache.llc_capacity, epochs=3, seed=5)
    d = filtered_demand(spec, cache)
    t = ts.epoch_time({tier.name: d}, {tier.name: tier}, cache, parallelism=1)
    return t / (3 * spec.buffer_bytes // CACHELINE)


def scan_bandwidth(tier, kind, workers):
    cache = ts.CacheConfig(llc_capacity=0, mlp=16)
    spec = WorkloadSpec(kind=kind, buffer_bytes=4 * 1024 * 1024, workers=workers)
    d = filtered_demand(spec, cache)
    par = effective_parallelism(cache, kind, workers)
    t_s = ts.epoch_time({tier.name: d}, {tier.name: tier}, cache, parallelism=par) / 1e9
    payload = d.writeback_bytes if kind == "scan_wb" else d.read_bytes
    return payload / t_s / 1e9


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workers", type=int, nargs="+",
                        default=[1, 2, 4, 8, 16, 24])
    args = parser.parse_args()

    print("per-hop chase latency (ns)")
    print(f"{'preset':26} {'read-only':>10} {'with write-back':>16}")
    for name in PRESETS:
        tier = ts.load_tier_preset(name)
        print(f"{name:26} {chase_latency(tier, 'chase'):10.1f} "
              f"{chase_latency(tier, 'chase_wb'):16.1f}")

    for kind, label in (("scan", "read"), ("scan_wb", "write-back")):
        print(f"\n{label} bandwidth (GB/s) vs workers {args.workers}")
        for name in PRESETS:
            tier = ts.load_tier_preset(name)
            sweep = [scan_bandwidth(tier, kind, w) for w in args.workers]
            print(f"{name:26} " + " ".join(f"{b:7.1f}" for b in sweep))


if __name__ == "__main__":
    main()
