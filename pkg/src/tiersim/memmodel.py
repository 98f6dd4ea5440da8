"""Memory device tiers, the last-level-cache filter, and the epoch timing model.

Timing closure: a stream of accesses is first reduced to the traffic that
actually reaches memory devices (read misses and dirty-eviction write-backs),
then converted to busy time per tier.  Configured latencies already absorb the
TLB penalty, so no separate TLB model exists.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from importlib import resources
from typing import Iterable, NamedTuple

import numpy as np

from .errors import AddressRangeError, ConfigError

CACHELINE = 64
PAGE_SIZE = 4096
LINES_PER_PAGE = PAGE_SIZE // CACHELINE

# MissRecord kinds
READ_MISS = 0
WRITEBACK = 1

FULL = "full"  # associativity sentinel


@dataclass(frozen=True)
class DeviceTier:
    """One memory device class (e.g. interleaved DRAM or DCPMM).

    Latencies are per-access costs; ``writeback_latency`` is the increment a
    write-back adds on top of the read path, so that an access stream with one
    read miss and one dirty eviction per reference costs
    ``read_latency + writeback_latency``.  Bandwidth scales linearly with the
    channel count; latency does not.
    """

    name: str
    read_latency: float            # ns per cacheline fetch
    writeback_latency: float       # ns added per write-back reaching this device
    read_bandwidth_per_channel: float       # bytes/s
    writeback_bandwidth_per_channel: float  # bytes/s
    channels: int
    capacity: int                  # bytes

    def __post_init__(self):
        if self.read_latency <= 0 or self.writeback_latency <= 0:
            raise ConfigError(f"tier {self.name}: latencies must be > 0")
        if self.read_bandwidth_per_channel <= 0 or self.writeback_bandwidth_per_channel <= 0:
            raise ConfigError(f"tier {self.name}: bandwidths must be > 0")
        if self.channels < 1:
            raise ConfigError(f"tier {self.name}: channels must be >= 1")
        if self.capacity < PAGE_SIZE or self.capacity % PAGE_SIZE:
            raise ConfigError(f"tier {self.name}: capacity must be a positive multiple of {PAGE_SIZE}")

    @property
    def read_bandwidth(self) -> float:
        return self.read_bandwidth_per_channel * self.channels

    @property
    def writeback_bandwidth(self) -> float:
        return self.writeback_bandwidth_per_channel * self.channels

    @property
    def capacity_pages(self) -> int:
        return self.capacity // PAGE_SIZE

    def with_channels(self, channels: int) -> "DeviceTier":
        return replace(self, channels=channels)


def load_tier_preset(name: str) -> DeviceTier:
    """Load a shipped tier preset (``dram-interleaved``, ``dcpmm-interleaved``,
    ``dcpmm-noninterleaved``) or a key=value config file by path."""
    try:
        ref = resources.files("tiersim").joinpath(f"presets/{name}.cfg")
        text = ref.read_text()
    except FileNotFoundError:
        try:
            with open(name) as f:
                text = f.read()
        except OSError as e:
            raise ConfigError(f"unknown tier preset or file: {name}") from e
    kv = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, val = line.partition("=")
        kv[key.strip()] = val.strip()
    try:
        return DeviceTier(
            name=kv["name"],
            read_latency=float(kv["read_latency_ns"]),
            writeback_latency=float(kv["writeback_latency_ns"]),
            read_bandwidth_per_channel=float(kv["read_bandwidth_per_channel"]),
            writeback_bandwidth_per_channel=float(kv["writeback_bandwidth_per_channel"]),
            channels=int(kv["channels"]),
            capacity=int(kv["capacity"]),
        )
    except KeyError as e:
        raise ConfigError(f"tier preset {name}: missing key {e}") from e


@dataclass(frozen=True)
class CacheConfig:
    """Last-level cache model parameters.

    ``mlp`` is the assumed number of overlapping outstanding memory requests
    per worker; ``None`` lets the workload kind pick its default (1 for
    serialized pointer chases, 16 for scans, 4 for mixed/phased traffic).
    ``llc_capacity`` of 0 disables the cache entirely (every access reaches
    memory; writes charge an allocate fetch plus an immediate write-back).
    """

    llc_capacity: int = 36 * 1024 * 1024
    cacheline_size: int = CACHELINE
    associativity: int | str = 16
    mlp: float | None = None

    def __post_init__(self):
        if self.cacheline_size != CACHELINE:
            raise ConfigError(f"cacheline_size is fixed at {CACHELINE}")
        if self.llc_capacity < 0 or self.llc_capacity % CACHELINE:
            raise ConfigError("llc_capacity must be a nonnegative multiple of the cacheline size")
        if self.mlp is not None and self.mlp < 1:
            raise ConfigError("mlp must be >= 1")
        if self.associativity != FULL:
            if not isinstance(self.associativity, int) or self.associativity < 1:
                raise ConfigError("associativity must be a positive integer or 'full'")


class MissRecord(NamedTuple):
    page_id: int
    tier_at_miss: str | None
    kind: int      # READ_MISS | WRITEBACK
    count: int


class LlcFilter:
    """Set-associative LRU cache filter with dirty-line tracking.

    Accepts a stream of (op, byte_address) events and emits the post-cache
    traffic: read misses (a write miss allocates, so it also fetches) and
    dirty-eviction write-backs.  Consecutive events hitting the same page with
    the same outcome are run-length merged; order is preserved.  State
    persists across calls so an engine can feed one epoch at a time.
    """

    def __init__(self, cache: CacheConfig, memory_bytes: int | None = None):
        self.cache = cache
        self.memory_bytes = memory_bytes
        self.bypass = cache.llc_capacity == 0
        if not self.bypass:
            nlines = cache.llc_capacity // CACHELINE
            ways = nlines if cache.associativity == FULL else cache.associativity
            if nlines % ways:
                raise ConfigError("llc_capacity must be divisible by associativity * cacheline_size")
            self.ways = ways
            self.nsets = nlines // ways
            # per set: line_number -> dirty flag, in LRU order (oldest first)
            self.sets: list[dict[int, bool]] = [dict() for _ in range(self.nsets)]

    def filter_arrays(self, ops, addrs):
        """Filter a batch; returns (pages, kinds, counts) int64 arrays."""
        if self.memory_bytes is not None and len(addrs):
            amax = int(np.max(addrs))
            amin = int(np.min(addrs))
            if amax >= self.memory_bytes or amin < 0:
                bad = amax if amax >= self.memory_bytes else amin
                raise AddressRangeError(f"address {bad:#x} outside guest memory of {self.memory_bytes} bytes")
        if self.bypass:
            return self._bypass_arrays(ops, addrs)
        ops_l = ops if isinstance(ops, list) else np.asarray(ops).tolist()
        addrs_l = addrs if isinstance(addrs, list) else np.asarray(addrs).tolist()
        pages, kinds, counts = self._filter_loop(ops_l, addrs_l)
        return (
            np.asarray(pages, dtype=np.int64),
            np.asarray(kinds, dtype=np.int64),
            np.asarray(counts, dtype=np.int64),
        )

    def _bypass_arrays(self, ops, addrs):
        # No cache: every access is a read miss; every write adds a write-back.
        ops = np.asarray(ops, dtype=np.uint8)
        pg = np.asarray(addrs, dtype=np.int64) >> 12
        npages = int(pg.max()) + 1 if len(pg) else 0
        reads = np.bincount(pg, minlength=npages)
        wbs = np.bincount(pg[ops == 1], minlength=npages)
        rp = np.nonzero(reads)[0]
        wp = np.nonzero(wbs)[0]
        pages = np.concatenate([rp, wp])
        kinds = np.concatenate([np.full(len(rp), READ_MISS, dtype=np.int64),
                                np.full(len(wp), WRITEBACK, dtype=np.int64)])
        counts = np.concatenate([reads[rp], wbs[wp]]).astype(np.int64)
        return pages, kinds, counts

    def _filter_loop(self, ops, addrs):
        sets = self.sets
        nsets = self.nsets
        ways = self.ways
        out_pages: list[int] = []
        out_kinds: list[int] = []
        out_counts: list[int] = []
        last_page = -1
        last_kind = -1
        for op, addr in zip(ops, addrs):
            line = addr >> 6
            s = sets[line % nsets]
            dirty = s.pop(line, None)
            if dirty is not None:
                # hit: refresh recency, maybe dirty
                s[line] = dirty or op == 1
                continue
            page = addr >> 12
            if page == last_page and last_kind == READ_MISS:
                out_counts[-1] += 1
            else:
                out_pages.append(page)
                out_kinds.append(READ_MISS)
                out_counts.append(1)
                last_page = page
                last_kind = READ_MISS
            if len(s) == ways:
                victim = next(iter(s))
                if s.pop(victim):
                    vpage = victim >> 6
                    if vpage == last_page and last_kind == WRITEBACK:
                        out_counts[-1] += 1
                    else:
                        out_pages.append(vpage)
                        out_kinds.append(WRITEBACK)
                        out_counts.append(1)
                        last_page = vpage
                        last_kind = WRITEBACK
            s[line] = op == 1
        return out_pages, out_kinds, out_counts

    def filter(self, events: Iterable) -> list[MissRecord]:
        """Filter an iterable of (op, addr[, worker]) events into MissRecords."""
        ops = []
        addrs = []
        for e in events:
            ops.append(e[0])
            addrs.append(e[1])
        pages, kinds, counts = self.filter_arrays(ops, addrs)
        return [MissRecord(int(p), None, int(k), int(c))
                for p, k, c in zip(pages, kinds, counts)]

    def resident_lines(self) -> int:
        if self.bypass:
            return 0
        return sum(len(s) for s in self.sets)


def llc_filter(trace: Iterable, cache: CacheConfig,
               memory_bytes: int | None = None) -> list[MissRecord]:
    """One-shot cold-cache filtering of an ordered event stream."""
    return LlcFilter(cache, memory_bytes=memory_bytes).filter(trace)


@dataclass
class TierDemand:
    """Aggregate post-LLC demand placed on one tier during an epoch."""

    read_misses: int = 0
    writebacks: int = 0
    extra_read_bytes: int = 0   # page-granular traffic (migrations, cache fills)
    extra_writeback_bytes: int = 0

    @property
    def read_bytes(self) -> int:
        return self.read_misses * CACHELINE + self.extra_read_bytes

    @property
    def writeback_bytes(self) -> int:
        return self.writebacks * CACHELINE + self.extra_writeback_bytes

    def add(self, other: "TierDemand") -> None:
        self.read_misses += other.read_misses
        self.writebacks += other.writebacks
        self.extra_read_bytes += other.extra_read_bytes
        self.extra_writeback_bytes += other.extra_writeback_bytes


def tier_busy_time(demand: TierDemand, tier: DeviceTier, parallelism: float) -> float:
    """Busy nanoseconds of one tier: the larger of the serialized latency cost
    (scaled down by the request-level parallelism) and either direction's
    bandwidth-limited transfer time."""
    if parallelism < 1:
        raise ConfigError("parallelism must be >= 1")
    lat = (demand.read_misses * tier.read_latency
           + demand.writebacks * tier.writeback_latency) / parallelism
    rd = demand.read_bytes / tier.read_bandwidth * 1e9
    wr = demand.writeback_bytes / tier.writeback_bandwidth * 1e9
    return max(lat, rd, wr)


def epoch_time(demands: dict[str, TierDemand], tiers: dict[str, DeviceTier],
               cache: CacheConfig, compute_time_ns: float = 0.0,
               parallelism: float | None = None) -> float:
    """Simulated nanoseconds for one epoch: slowest tier plus compute time.

    Tiers serve their demand concurrently; the epoch ends when the busiest
    tier drains.  ``parallelism`` defaults to the cache's mlp (times worker
    count, when the engine supplies it).
    """
    if parallelism is None:
        parallelism = cache.mlp if cache.mlp is not None else 1.0
    busy = 0.0
    for name, demand in demands.items():
        busy = max(busy, tier_busy_time(demand, tiers[name], parallelism))
    return busy + compute_time_ns


def demand_from_arrays(pages, kinds, counts, tier_idx, n_tiers: int = 2):
    """Split (pages, kinds, counts) miss aggregates into per-tier totals.

    ``tier_idx`` maps page -> tier index.  Returns a list of TierDemand
    indexed by tier, plus per-kind count arrays for conservation checks.
    """
    demands = [TierDemand() for _ in range(n_tiers)]
    if len(pages) == 0:
        return demands
    t = tier_idx[pages]
    key = t * 2 + kinds
    totals = np.bincount(key, weights=counts, minlength=n_tiers * 2).astype(np.int64)
    for i in range(n_tiers):
        demands[i].read_misses = int(totals[i * 2 + READ_MISS])
        demands[i].writebacks = int(totals[i * 2 + WRITEBACK])
    return demands


def mlp_default_for(kind: str) -> float:
    """Workload-class parallelism defaults: chases are serialized by design,
    scans overlap heavily, mixed traffic sits in between."""
    if kind.startswith("chase"):
        return 1.0
    if kind.startswith("scan"):
        return 16.0
    return 4.0


def effective_parallelism(cache: CacheConfig, workload_kind: str, workers: int) -> float:
    base = cache.mlp if cache.mlp is not None else mlp_default_for(workload_kind)
    return base * max(1, workers)
