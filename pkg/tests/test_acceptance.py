"""End-to-end acceptance suite.

Each test covers one acceptance criterion and prints a single PASS/FAIL line
(bypassing pytest capture) so the whole gate is readable from the test log.
"""

import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import tiersim as ts
from tiersim.engine import epoch_csv_rows
from tiersim.memmodel import (CACHELINE, FULL, PAGE_SIZE, READ_MISS, LlcFilter,
                              demand_from_arrays, effective_parallelism)
from tiersim.optimizer import placement_cost
from tiersim.workloads import WorkloadSpec


def report(name: str, ok: bool, detail: str = "") -> None:
    tag = "PASS" if ok else "FAIL"
    suffix = f"  [{detail}]" if detail else ""
    print(f"[{tag}] {name}{suffix}", file=sys.__stdout__)
    assert ok, f"{name}: {detail}"


def chase_per_hop_ns(tier, kind: str) -> float:
    """Mean per-hop time for a pointer chase with a buffer 4x the LLC."""
    cache = ts.CacheConfig(llc_capacity=256 * 1024, associativity=FULL, mlp=1)
    spec = WorkloadSpec(kind=kind, buffer_bytes=4 * cache.llc_capacity,
                        epochs=3, seed=5)
    llc = LlcFilter(cache)
    total_ns = 0.0
    hops = 0
    par = effective_parallelism(cache, kind, 1)
    for batch in ts.generate(spec).epochs():
        pages, kinds, counts = llc.filter_arrays(batch.ops, batch.addrs)
        d = ts.TierDemand(
            read_misses=int(counts[kinds == READ_MISS].sum()),
            writebacks=int(counts[kinds != READ_MISS].sum()))
        total_ns += ts.epoch_time({tier.name: d}, {tier.name: tier}, cache,
                                  parallelism=par)
        hops += spec.buffer_bytes // CACHELINE
    return total_ns / hops


def scan_throughput(tier, kind: str, workers: int) -> tuple[float, float]:
    """(read GB/s, writeback GB/s) of a saturating multi-worker scan."""
    cache = ts.CacheConfig(llc_capacity=0, mlp=16)
    spec = WorkloadSpec(kind=kind, buffer_bytes=4 * 1024 * 1024,
                        workers=workers, epochs=1)
    batch = ts.generate(spec).epoch(0)
    pages, kinds, counts = LlcFilter(cache).filter_arrays(batch.ops, batch.addrs)
    d = ts.TierDemand(read_misses=int(counts[kinds == READ_MISS].sum()),
                      writebacks=int(counts[kinds != READ_MISS].sum()))
    par = effective_parallelism(cache, kind, workers)
    t_s = ts.epoch_time({tier.name: d}, {tier.name: tier}, cache,
                        parallelism=par) / 1e9
    return d.read_bytes / t_s / 1e9, d.writeback_bytes / t_s / 1e9


def test_closed_loop_latency(dram, dcpmm):
    targets = [(dram, "chase", 93.5), (dram, "chase_wb", 96.1),
               (dcpmm, "chase", 374.1), (dcpmm, "chase_wb", 391.2)]
    got = [chase_per_hop_ns(tier, kind) for tier, kind, _ in targets]
    ok = all(abs(g - want) / want <= 0.02 for g, (_, _, want) in zip(got, targets))
    report("closed-loop latency (per-hop ns, +/-2%)", ok,
           " ".join(f"{g:.1f}/{want}" for g, (_, _, want) in zip(got, targets)))


def test_closed_loop_bandwidth(dram, dcpmm):
    dram_r, _ = scan_throughput(dram, "scan", 24)
    _, dram_w = scan_throughput(dram, "scan_wb", 24)
    dcpmm_r, _ = scan_throughput(dcpmm, "scan", 24)
    _, dcpmm_w = scan_throughput(dcpmm, "scan_wb", 24)
    targets = [(dram_r, 101.3), (dram_w, 37.4), (dcpmm_r, 37.6), (dcpmm_w, 2.9)]
    ok = all(abs(g - want) / want <= 0.05 for g, want in targets)
    sweep = [scan_throughput(dcpmm, "scan", w)[0] for w in (1, 2, 4, 8, 16, 24)]
    ok = ok and all(a <= b * (1 + 1e-9) for a, b in zip(sweep, sweep[1:]))
    report("closed-loop bandwidth (GB/s, +/-5%, nondecreasing in workers)", ok,
           " ".join(f"{g:.1f}/{want}" for g, want in targets))


def test_interleave_factor(dcpmm):
    six, _ = scan_throughput(dcpmm, "scan", 24)
    one, _ = scan_throughput(dcpmm.with_channels(1), "scan", 24)
    ratio = six / one
    report("interleave factor (6 channels vs 1, 6.0x +/-1%)",
           abs(ratio - 6.0) / 6.0 <= 0.01, f"ratio={ratio:.3f}")


# ---------------------------------------------------------------------------
# calibrated phased workload, shared across the comparison criteria
# ---------------------------------------------------------------------------

RAM = 64 * 1024 * 1024


def comparison_config(dram, dcpmm, policy, fast_ratio, label, **wl):
    wl_kw = dict(kind="phased", buffer_bytes=RAM, epochs=24, seed=7,
                 zipf_s=1.1, hot_fraction=0.02, events_per_epoch=40000,
                 phase_length=12)
    wl_kw.update(wl)
    return ts.RunConfig(
        fast_tier=dram, slow_tier=dcpmm,
        cache=ts.CacheConfig(llc_capacity=256 * 1024, associativity=16),
        ram_bytes=RAM, fast_ratio=fast_ratio,
        policy=ts.PolicyConfig(kind=policy), workload=ts.WorkloadSpec(**wl_kw),
        label=label)


@pytest.fixture(scope="module")
def comparison_runs(dram, dcpmm):
    cfgs = {
        "fast1": comparison_config(dram, dcpmm, "none", 1.0, "fast1"),
        "raminate": comparison_config(dram, dcpmm, "raminate", 0.01, "raminate"),
        "none": comparison_config(dram, dcpmm, "none", 0.01, "none"),
        "fast0": comparison_config(dram, dcpmm, "none", 0.0, "fast0"),
    }
    return {k: ts.run(c) for k, c in cfgs.items()}


def test_elapsed_time_ordering(comparison_runs):
    t = {k: r.total_simulated_ns for k, r in comparison_runs.items()}
    ordered = t["fast1"] < t["raminate"] < t["none"] <= t["fast0"]
    slow_r = t["raminate"] / t["fast1"] - 1
    slow_n = t["none"] / t["fast1"] - 1
    ok = ordered and slow_r <= 0.6 * slow_n
    report("elapsed-time ordering + slowdown ratio <= 0.6", ok,
           f"T={t['fast1'] / 1e6:.1f}/{t['raminate'] / 1e6:.1f}/"
           f"{t['none'] / 1e6:.1f}/{t['fast0'] / 1e6:.1f} ms, "
           f"slowdowns {slow_r:.2f} vs {slow_n:.2f}")


def vm_slow_share(stat):
    """Slow-tier share of the traffic the guest itself created (relocation
    traffic is hypervisor work and excluded)."""
    by_tier = {}
    for name, c in stat.tiers.items():
        by_tier[name] = c.read_bytes + c.writeback_bytes - c.migration_bytes
    total = sum(by_tier.values())
    return by_tier["dcpmm"] / total if total else 0.0


def test_traffic_reduction(comparison_runs):
    ram_shares = [vm_slow_share(s) for s in comparison_runs["raminate"].stats]
    none_shares = [vm_slow_share(s) for s in comparison_runs["none"].stats]
    first = ram_shares[0]
    steady = np.mean(ram_shares[-6:])  # tail of the final phase
    ok = steady <= 0.5 * first and all(s >= 0.9 for s in none_shares)
    report("traffic reduction (steady slow share <= 50% of epoch 1; "
           "static >= 90%)", ok,
           f"raminate {first:.2f} -> {steady:.2f}, "
           f"static min {min(none_shares):.2f}")


def test_relocation_decay(dram, dcpmm):
    cfg = comparison_config(dram, dcpmm, "raminate", 0.01, "decay",
                            epochs=48, phase_length=24)
    relocs = [s.relocations for s in ts.run(cfg).stats]
    ok = all(r <= 1000 for r in relocs)
    for phase in (relocs[:24], relocs[24:]):
        ok = ok and np.mean(phase[:2]) > 3 * np.mean(phase[2:])
    report("relocation decay (first 2 epochs > 3x rest, all <= 1000)", ok,
           f"phase starts {relocs[:3]} / {relocs[24:27]}")


# ---------------------------------------------------------------------------
# optimality
# ---------------------------------------------------------------------------

def test_oracle_equivalence(dram, dcpmm):
    # stationary skew: the online policy must settle on the same 8 fast pages
    # the offline placement picks, for every seed
    def cfg(seed, policy):
        wl = ts.WorkloadSpec(kind="phased", buffer_bytes=64 * PAGE_SIZE,
                             epochs=10, seed=seed, zipf_s=1.0,
                             hot_fraction=1.0, events_per_epoch=50000)
        return ts.RunConfig(fast_tier=dram, slow_tier=dcpmm,
                            cache=ts.CacheConfig(llc_capacity=0),
                            ram_bytes=64 * PAGE_SIZE, fast_ratio=8 / 64,
                            policy=ts.PolicyConfig(kind=policy), workload=wl)

    # small-instance cross-check: the offline placement really is the
    # enumerated optimum (the 64-page instance is far too large to enumerate)
    from itertools import combinations
    rng = np.random.default_rng(0)
    heat = rng.integers(0, 99, 12).astype(float)
    m = ts.create_mapping(12 * PAGE_SIZE, 4 / 12, dram, dcpmm)
    best = min(placement_cost(heat, np.array(c)) for c in combinations(range(12), 4))
    enum_ok = placement_cost(heat, ts.static_oracle(heat, m)) == best

    converged = 0
    for seed in range(100):
        online = ts.run(cfg(seed, "raminate"))
        offline = ts.run(cfg(seed, "static_oracle"))
        if sorted(online.final_fast_pages) == sorted(offline.final_fast_pages):
            converged += 1
    report("oracle equivalence (100 seeds, <= 10 epochs)",
           enum_ok and converged == 100, f"{converged}/100 converged")


# ---------------------------------------------------------------------------
# determinism & conservation
# ---------------------------------------------------------------------------

def test_repeated_runs_byte_identical(dram, dcpmm):
    cfg = comparison_config(dram, dcpmm, "raminate", 0.01, "det",
                            epochs=6, events_per_epoch=10000)
    names = ("dram", "dcpmm")
    a = "\n".join(epoch_csv_rows(ts.run(cfg).stats, names))
    b = "\n".join(epoch_csv_rows(ts.run(cfg).stats, names))
    report("determinism (byte-identical CSV across repeated runs)", a == b,
           f"{len(a)} bytes")


N_PROPERTY_CASES = 1000
_seen = [0, True]


@given(data=st.data())
@settings(max_examples=N_PROPERTY_CASES, deadline=None)
def test_conservation_and_bijection_property(data):
    dram = ts.load_tier_preset("dram-interleaved")
    dcpmm = ts.load_tier_preset("dcpmm-interleaved")
    n_pages = 16
    n = data.draw(st.integers(1, 120))
    ops = np.array(data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)),
                   dtype=np.uint8)
    lines = data.draw(st.lists(st.integers(0, n_pages * 64 - 1),
                               min_size=n, max_size=n))
    addrs = np.array(lines, dtype=np.int64) * CACHELINE
    cache = ts.CacheConfig(llc_capacity=data.draw(st.sampled_from([0, 2048, 8192])),
                           associativity=data.draw(st.sampled_from([2, "full"])))
    llc = LlcFilter(cache, memory_bytes=n_pages * PAGE_SIZE)
    m = ts.create_mapping(n_pages * PAGE_SIZE, 0.5, dram, dcpmm)
    swaps = data.draw(st.lists(
        st.tuples(st.integers(0, 7), st.integers(8, 15)), max_size=3,
        unique_by=(lambda p: p[0], lambda p: p[1])))
    ok = True
    for _ in range(2):
        pages, kinds, counts = llc.filter_arrays(ops, addrs)
        demands = demand_from_arrays(pages, kinds, counts, m.tier_idx)
        # conservation: the per-tier split repartitions the filter output
        ok &= sum(d.read_misses for d in demands) == int(
            counts[kinds == READ_MISS].sum())
        ok &= sum(d.writebacks for d in demands) == int(
            counts[kinds != READ_MISS].sum())
        valid = [(a, b) for a, b in swaps if m.tier_idx[a] != m.tier_idx[b]]
        ts.swap_pages(m, valid)
        m.check_bijection()
        ok &= int(m.drain_migration_bytes().sum()) == 4 * PAGE_SIZE * len(valid)
    _seen[0] += 1
    _seen[1] &= ok
    assert ok


def test_zz_property_suite_summary():
    # runs after the property test above; reports the aggregate case count
    report(f"conservation & bijection properties ({_seen[0]} cases)",
           _seen[1] and _seen[0] >= N_PROPERTY_CASES, f"cases={_seen[0]}")
