"""Epoch orchestration: generate -> LLC-filter -> attribute -> monitor ->
optimize -> time, with per-epoch metrics and CSV reporting.

One epoch equals one optimization interval, so each pass through the loop is
one monitor/optimize cycle.  Swaps are planned and applied at the end of the
epoch whose traffic motivated them, and their migration traffic is charged to
that same epoch.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import mapping as mp
from .config import parse_kv, parse_size
from .errors import ConfigError, SimError
from .memmodel import (PAGE_SIZE, WRITEBACK, CacheConfig,
                       DeviceTier, LlcFilter, demand_from_arrays,
                       effective_parallelism, epoch_time, load_tier_preset)
from .monitor import PageHeat
from .optimizer import DramPageCache, PolicyConfig, plan_swaps, static_oracle
from .workloads import WorkloadSpec, generate


@dataclass
class TierCounters:
    read_misses: int = 0
    writebacks: int = 0
    read_bytes: int = 0
    writeback_bytes: int = 0
    migration_bytes: int = 0


@dataclass
class EpochStats:
    epoch_index: int
    simulated_time_ns: float
    cumulative_time_ns: float
    relocations: int
    tiers: dict[str, TierCounters]


@dataclass(frozen=True)
class RunConfig:
    fast_tier: DeviceTier
    slow_tier: DeviceTier
    cache: CacheConfig
    ram_bytes: int
    fast_ratio: float
    policy: PolicyConfig
    workload: WorkloadSpec
    compute_time_ns: float = 0.0
    write_weight: float = 2.0
    decay_alpha: float = 0.5
    label: str = "run"

    def __post_init__(self):
        if self.fast_tier.name == self.slow_tier.name:
            raise ConfigError("fast and slow tiers must have distinct names")
        w = self.workload
        if w.kind in ("chase", "chase_wb") and w.buffer_bytes > self.ram_bytes:
            raise ConfigError("chase buffer exceeds guest RAM")
        if w.kind in ("scan", "scan_wb") and w.workers * w.buffer_bytes > self.ram_bytes:
            raise ConfigError("scan buffers exceed guest RAM")
        if w.kind == "phased" and w.buffer_bytes > self.ram_bytes:
            raise ConfigError("phased footprint exceeds guest RAM")


@dataclass
class RunResult:
    config: RunConfig
    stats: list[EpochStats]
    total_simulated_ns: float
    mapping_digest: str
    final_fast_pages: np.ndarray
    total_relocations: int = 0

    @property
    def label(self) -> str:
        return self.config.label


def _oracle_mapping(config: RunConfig, trace) -> mp.PageMapping:
    """Offline placement: tally whole-run post-LLC heat, then map the top
    pages onto the fast tier.  The pre-pass uses its own cold cache."""
    n_pages = config.ram_bytes // PAGE_SIZE
    llc = LlcFilter(config.cache, memory_bytes=config.ram_bytes)
    heat = np.zeros(n_pages)
    for batch in trace.epochs():
        pages, kinds, counts = llc.filter_arrays(batch.ops, batch.addrs)
        if len(pages):
            w = np.where(kinds == WRITEBACK, config.write_weight, 1.0) * counts
            heat += np.bincount(pages, weights=w, minlength=n_pages)
    base = mp.create_mapping(config.ram_bytes, config.fast_ratio,
                             config.fast_tier, config.slow_tier)
    fast_set = static_oracle(heat, base)
    tier_idx = np.full(n_pages, mp.SLOW, dtype=np.uint8)
    tier_idx[fast_set] = mp.FAST
    frame_idx = np.empty(n_pages, dtype=np.int64)
    frame_idx[tier_idx == mp.FAST] = np.arange(len(fast_set))
    frame_idx[tier_idx == mp.SLOW] = np.arange(n_pages - len(fast_set))
    return mp.PageMapping(base.tier_names, tier_idx, frame_idx,
                          base.fast_capacity_pages, base.slow_capacity_pages)


class Simulation:
    """One simulation run's mutable state; drive it with step() or run()."""

    def __init__(self, config: RunConfig):
        self.config = config
        n_pages = config.ram_bytes // PAGE_SIZE
        self.trace = generate(config.workload)
        kind = config.policy.kind
        if kind == "static_oracle":
            self.mapping = _oracle_mapping(config, self.trace)
        else:
            self.mapping = mp.create_mapping(config.ram_bytes, config.fast_ratio,
                                             config.fast_tier, config.slow_tier)
        self.page_cache = None
        if kind == "dram_cache":
            n_fast = len(self.mapping.fast_pages)
            if n_fast < 1:
                raise ConfigError("dram_cache policy needs at least one fast page")
            self.page_cache = DramPageCache(n_fast)
        self.llc = LlcFilter(config.cache, memory_bytes=config.ram_bytes)
        self.heat = PageHeat(n_pages, write_weight=config.write_weight,
                             decay_alpha=config.decay_alpha)
        self.tiers = {config.fast_tier.name: config.fast_tier,
                      config.slow_tier.name: config.slow_tier}
        self.parallelism = effective_parallelism(
            config.cache, config.workload.kind, config.workload.workers)
        self.cumulative = 0.0
        self.stats: list[EpochStats] = []

    def step(self, e: int) -> EpochStats:
        config = self.config
        kind = config.policy.kind
        batch = self.trace.epoch(e)
        pages, kinds, counts = self.llc.filter_arrays(batch.ops, batch.addrs)
        relocations = 0
        if kind == "dram_cache":
            fast_d, slow_d = self.page_cache.attribute(pages, kinds, counts)
            demands = [fast_d, slow_d]
        else:
            demands = demand_from_arrays(pages, kinds, counts, self.mapping.tier_idx)
            self.heat.record((pages, kinds, counts))
            self.heat.end_epoch()
            if kind == "raminate" and config.policy.max_pairs > 0:
                rankings = self.heat.rank(self.mapping)
                plan = plan_swaps(rankings, self.heat.decayed_score, config.policy, e)
                relocations = mp.swap_pages(self.mapping, plan.pairs)
        mig = self.mapping.drain_migration_bytes()
        counters: dict[str, TierCounters] = {}
        demand_by_name = {}
        for t, name in ((mp.FAST, config.fast_tier.name),
                        (mp.SLOW, config.slow_tier.name)):
            d = demands[t]
            d.extra_read_bytes += int(mig[t][0])
            d.extra_writeback_bytes += int(mig[t][1])
            counters[name] = TierCounters(
                read_misses=d.read_misses,
                writebacks=d.writebacks,
                read_bytes=d.read_bytes,
                writeback_bytes=d.writeback_bytes,
                migration_bytes=int(mig[t][0] + mig[t][1]),
            )
            demand_by_name[name] = d
        t_ns = epoch_time(demand_by_name, self.tiers, config.cache,
                          config.compute_time_ns, parallelism=self.parallelism)
        self.cumulative += t_ns
        stat = EpochStats(e, t_ns, self.cumulative, relocations, counters)
        self.stats.append(stat)
        return stat

    def epochs(self) -> Iterator[EpochStats]:
        for e in range(self.trace.n_epochs):
            try:
                yield self.step(e)
            except SimError as err:
                raise SimError(f"epoch {e}: {err}") from err

    def result(self) -> RunResult:
        return RunResult(
            config=self.config,
            stats=self.stats,
            total_simulated_ns=self.stats[-1].cumulative_time_ns if self.stats else 0.0,
            mapping_digest=self.mapping.digest(),
            final_fast_pages=self.mapping.fast_pages,
            total_relocations=sum(s.relocations for s in self.stats),
        )


def iter_epochs(config: RunConfig) -> Iterator[EpochStats]:
    yield from Simulation(config).epochs()


def run(config: RunConfig) -> RunResult:
    sim = Simulation(config)
    for _ in sim.epochs():
        pass
    return sim.result()


# ---------------------------------------------------------------------------
# Reporting
# ---------------------------------------------------------------------------

def csv_header(tier_names: tuple[str, str]) -> str:
    cols = ["epoch", "simulated_time_ns", "cumulative_time_ns", "relocations"]
    for name in tier_names:
        for c in ("read_misses", "writebacks", "read_bytes", "writeback_bytes",
                  "migration_bytes"):
            cols.append(f"{name}_{c}")
    return ",".join(cols)


def epoch_csv_rows(stats: list[EpochStats], tier_names: tuple[str, str]) -> Iterator[str]:
    yield csv_header(tier_names)
    for s in stats:
        row = [str(s.epoch_index), f"{s.simulated_time_ns:.3f}",
               f"{s.cumulative_time_ns:.3f}", str(s.relocations)]
        for name in tier_names:
            c = s.tiers[name]
            row += [str(c.read_misses), str(c.writebacks), str(c.read_bytes),
                    str(c.writeback_bytes), str(c.migration_bytes)]
        yield ",".join(row)


def write_epoch_csv(stats: list[EpochStats], tier_names: tuple[str, str],
                    path: str) -> None:
    try:
        with open(path, "w") as f:
            for line in epoch_csv_rows(stats, tier_names):
                f.write(line + "\n")
    except OSError as e:
        raise SimError(f"cannot write {path}: {e}") from e


def write_run_summary(result: RunResult, path: str) -> None:
    payload = {
        "label": result.label,
        "total_simulated_ns": result.total_simulated_ns,
        "epochs": len(result.stats),
        "total_relocations": result.total_relocations,
        "mapping_digest": result.mapping_digest,
        "policy": result.config.policy.kind,
        "fast_ratio": result.config.fast_ratio,
        "seed": result.config.workload.seed,
    }
    try:
        with open(path, "w") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write("\n")
    except OSError as e:
        raise SimError(f"cannot write {path}: {e}") from e


def write_comparison_csv(runs: list[tuple[str, float]], baseline: str,
                         path: str) -> None:
    """Summary CSV: label, total simulated time, and time relative to the
    named baseline run (a run against itself reports 1.0)."""
    totals = dict(runs)
    if baseline not in totals:
        raise ConfigError(f"baseline {baseline!r} not among runs {sorted(totals)}")
    base = totals[baseline]
    try:
        with open(path, "w") as f:
            f.write("label,total_time_ns,slowdown\n")
            for label, total in runs:
                f.write(f"{label},{total:.3f},{total / base:.6f}\n")
    except OSError as e:
        raise SimError(f"cannot write {path}: {e}") from e


# ---------------------------------------------------------------------------
# Run-config files (key = value)
# ---------------------------------------------------------------------------

_WL_FIELDS = {
    "kind": str, "buffer_bytes": parse_size, "workers": int, "epochs": int,
    "seed": int, "zipf_s": float, "phase_length": int, "hot_fraction": float,
    "events_per_epoch": int, "path": str,
}


def parse_run_config(text: str, overrides: dict | None = None) -> RunConfig:
    kv = parse_kv(text)
    if overrides:
        kv.update({k: str(v) for k, v in overrides.items() if v is not None})
    wl_kwargs = {}
    top: dict[str, str] = {}
    for key, val in kv.items():
        if key.startswith("workload."):
            sub = key[len("workload."):]
            if sub not in _WL_FIELDS:
                raise ConfigError(f"unknown workload key {key!r}")
            wl_kwargs[sub] = _WL_FIELDS[sub](val)
        else:
            top[key] = val
    if "kind" not in wl_kwargs:
        raise ConfigError("config needs workload.kind")
    workload = WorkloadSpec(**wl_kwargs)

    def pop(key, conv, default):
        return conv(top.pop(key)) if key in top else default

    fast_tier = load_tier_preset(top.pop("fast_tier", "dram-interleaved"))
    slow_tier = load_tier_preset(top.pop("slow_tier", "dcpmm-interleaved"))
    cache = CacheConfig(
        llc_capacity=pop("llc_capacity", parse_size, 36 * 1024 * 1024),
        associativity=pop("associativity", lambda s: s if s == "full" else int(s), 16),
        mlp=pop("mlp", float, None),
    )
    policy = PolicyConfig(
        kind=pop("policy", str, "raminate"),
        max_pairs=pop("max_pairs", int, 1000),
        interval_s=pop("interval_s", float, 5.0),
        hysteresis_margin=pop("hysteresis_margin", float, 0.0),
    )
    config = RunConfig(
        fast_tier=fast_tier,
        slow_tier=slow_tier,
        cache=cache,
        ram_bytes=pop("ram", parse_size, 64 * 1024 * 1024),
        fast_ratio=pop("fast_ratio", float, 0.01),
        policy=policy,
        workload=workload,
        compute_time_ns=pop("compute_time_ns", float, 0.0),
        write_weight=pop("write_weight", float, 2.0),
        decay_alpha=pop("decay_alpha", float, 0.5),
        label=top.pop("label", "run"),
    )
    if top:
        raise ConfigError(f"unknown config keys: {sorted(top)}")
    return config


def load_run_config(path: str, overrides: dict | None = None) -> RunConfig:
    try:
        with open(path) as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    return parse_run_config(text, overrides)
