"""Benchmark access-pattern generators and external trace ingestion.

All generators are pure functions of (spec, seed): re-iterating a trace
regenerates byte-identical batches.  Traces are produced one epoch at a time
so multi-gigabyte-equivalent workloads never materialize in full.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Iterator, NamedTuple

import numpy as np

from .config import parse_kv, parse_size
from .errors import ConfigError, TraceFormatError
from .memmodel import CACHELINE, PAGE_SIZE

OP_READ = 0
OP_WRITE = 1

KINDS = ("chase", "chase_wb", "scan", "scan_wb", "phased", "external")


class AccessEvent(NamedTuple):
    op: int            # OP_READ | OP_WRITE
    addr: int          # guest byte address
    worker_id: int = 0


@dataclass
class EventBatch:
    ops: np.ndarray      # uint8
    addrs: np.ndarray    # int64
    workers: np.ndarray  # int32

    def __len__(self) -> int:
        return len(self.ops)

    def events(self) -> Iterator[AccessEvent]:
        for o, a, w in zip(self.ops.tolist(), self.addrs.tolist(), self.workers.tolist()):
            yield AccessEvent(o, a, w)

    @staticmethod
    def empty() -> "EventBatch":
        return EventBatch(np.empty(0, np.uint8), np.empty(0, np.int64), np.empty(0, np.int32))

    @staticmethod
    def concat(batches: list["EventBatch"]) -> "EventBatch":
        if not batches:
            return EventBatch.empty()
        return EventBatch(np.concatenate([b.ops for b in batches]),
                          np.concatenate([b.addrs for b in batches]),
                          np.concatenate([b.workers for b in batches]))


@dataclass(frozen=True)
class WorkloadSpec:
    kind: str
    buffer_bytes: int = 0       # chase/scan: per-buffer size; phased: footprint
    workers: int = 1
    epochs: int = 1
    seed: int = 0
    zipf_s: float = 1.1
    phase_length: int = 12      # epochs per hot-set phase
    hot_fraction: float = 0.02
    events_per_epoch: int = 0   # phased/external; 0 = derived
    path: str = ""              # external trace file

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown workload kind {self.kind!r}")
        if self.kind != "external":
            if self.buffer_bytes <= 0 or self.buffer_bytes % CACHELINE:
                raise ConfigError("buffer_bytes must be a positive multiple of the cacheline size")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if self.phase_length < 1:
            raise ConfigError("phase_length must be >= 1")
        if not 0.0 < self.hot_fraction <= 1.0 and self.kind == "phased":
            raise ConfigError("hot_fraction must be in (0, 1]")
        if self.zipf_s < 0:
            raise ConfigError("zipf_s must be >= 0")


class Trace:
    """A deterministic, re-iterable stream of per-epoch event batches."""

    def __init__(self, n_epochs: int, batch_fn: Callable[[int], EventBatch],
                 spec: WorkloadSpec | None = None):
        self.n_epochs = n_epochs
        self._batch_fn = batch_fn
        self.spec = spec

    def epoch(self, i: int) -> EventBatch:
        return self._batch_fn(i)

    def epochs(self) -> Iterator[EventBatch]:
        for i in range(self.n_epochs):
            yield self._batch_fn(i)

    def events(self) -> Iterator[AccessEvent]:
        for batch in self.epochs():
            yield from batch.events()

    def rechunk(self, n_epochs: int) -> "Trace":
        """Re-split the whole stream into n equal-as-possible epochs."""
        flat = EventBatch.concat(list(self.epochs()))
        bounds = np.linspace(0, len(flat), n_epochs + 1).astype(np.int64)

        def batch(i: int) -> EventBatch:
            lo, hi = int(bounds[i]), int(bounds[i + 1])
            return EventBatch(flat.ops[lo:hi], flat.addrs[lo:hi], flat.workers[lo:hi])

        return Trace(n_epochs, batch, self.spec)


def zipf_pmf(n: int, s: float) -> np.ndarray:
    ranks = np.arange(1, n + 1, dtype=np.float64)
    p = ranks ** -s
    return p / p.sum()


def chase_cycle(n_lines: int, seed: int) -> np.ndarray:
    """Uniform single-cycle permutation over all cacheline slots (iterative
    swap-with-prefix), returned as the traversal order starting at slot 0.
    Every slot appears exactly once per lap; no self-loops for n >= 2."""
    if n_lines < 2:
        raise ConfigError("chase buffer must hold at least 2 cachelines")
    rng = np.random.default_rng([seed, 0xC1C])
    succ = np.arange(n_lines, dtype=np.int64)
    for i in range(n_lines - 1, 0, -1):
        j = int(rng.integers(0, i))
        succ[i], succ[j] = succ[j], succ[i]
    order = np.empty(n_lines, dtype=np.int64)
    cur = 0
    succ_l = succ.tolist()
    for k in range(n_lines):
        order[k] = cur
        cur = succ_l[cur]
    return order


def gen_chase(spec: WorkloadSpec) -> Trace:
    """Random-order pointer chase over 64-byte cacheline objects.

    One lap per epoch: a read per hop, and for ``chase_wb`` also an update of
    the second 8 bytes of the cacheline just visited.  The buffer should be
    well above the LLC capacity for miss-dominated behavior (not enforced)."""
    n_lines = spec.buffer_bytes // CACHELINE
    order = chase_cycle(n_lines, spec.seed)
    with_writes = spec.kind == "chase_wb"
    read_addrs = order * CACHELINE
    if with_writes:
        addrs = np.empty(2 * n_lines, dtype=np.int64)
        addrs[0::2] = read_addrs
        addrs[1::2] = read_addrs + 8
        ops = np.zeros(2 * n_lines, dtype=np.uint8)
        ops[1::2] = OP_WRITE
    else:
        addrs = read_addrs
        ops = np.zeros(n_lines, dtype=np.uint8)
    workers = np.zeros(len(ops), dtype=np.int32)

    def batch(_: int) -> EventBatch:
        return EventBatch(ops, addrs, workers)

    return Trace(spec.epochs, batch, spec)


def gen_scan(spec: WorkloadSpec) -> Trace:
    """Concurrent sequential scans over disjoint per-worker buffers.

    Worker w owns [w * buffer_bytes, (w+1) * buffer_bytes); each epoch is one
    ascending cacheline pass per worker, interleaved round-robin at event
    granularity.  ``scan_wb`` writes each line right after reading it."""
    n_lines = spec.buffer_bytes // CACHELINE
    if n_lines < 1:
        raise ConfigError("scan buffer must hold at least one cacheline")
    w = spec.workers
    with_writes = spec.kind == "scan_wb"
    base = np.arange(n_lines, dtype=np.int64) * CACHELINE
    offsets = np.arange(w, dtype=np.int64) * spec.buffer_bytes
    if with_writes:
        seq = np.empty(2 * n_lines, dtype=np.int64)
        seq[0::2] = base
        seq[1::2] = base + 8
        op_seq = np.zeros(2 * n_lines, dtype=np.uint8)
        op_seq[1::2] = OP_WRITE
    else:
        seq = base
        op_seq = np.zeros(n_lines, dtype=np.uint8)
    # round-robin: event e comes from worker e % w, step e // w
    addrs = (seq[:, None] + offsets[None, :]).ravel()
    ops = np.repeat(op_seq, w)
    workers = np.tile(np.arange(w, dtype=np.int32), len(seq))

    def batch(_: int) -> EventBatch:
        return EventBatch(ops, addrs, workers)

    return Trace(spec.epochs, batch, spec)


def scan_epoch_demand(spec: WorkloadSpec, llc_lines: int,
                      epoch_index: int) -> tuple[int, int]:
    """Closed-form (read_misses, writebacks) for one scan epoch, matching the
    streamed path when the combined footprint exceeds the LLC and buffer
    lines divide evenly across cache sets.  The first epoch retains one
    cache-full of dirty lines, so its write-backs run short by that amount."""
    n_lines = (spec.buffer_bytes // CACHELINE) * spec.workers
    if n_lines <= llc_lines:
        raise ConfigError("aggregate scan path requires footprint > LLC capacity")
    reads = n_lines
    if spec.kind != "scan_wb":
        return reads, 0
    wbs = n_lines if epoch_index > 0 else max(0, n_lines - llc_lines)
    return reads, wbs


def gen_phased(spec: WorkloadSpec) -> Trace:
    """Skewed traffic whose hot page set jumps every ``phase_length`` epochs.

    Per phase a hot set of ``hot_fraction`` of the footprint's pages is drawn
    without replacement; 90% of events follow a Zipf(zipf_s) law over it and
    10% fall uniformly over all pages.  Reads outnumber writes 2:1.  The
    90/10 mix and the 2:1 ratio are calibration knobs, not measured facts."""
    n_pages = spec.buffer_bytes // PAGE_SIZE
    hot_pages = max(1, round(spec.hot_fraction * n_pages))
    if n_pages < 1:
        raise ConfigError("phased footprint must be at least one page")
    events = spec.events_per_epoch or 4 * n_pages
    pmf = zipf_pmf(hot_pages, spec.zipf_s)

    def batch(epoch: int) -> EventBatch:
        phase = epoch // spec.phase_length
        phase_rng = np.random.default_rng([spec.seed, 1, phase])
        hot_set = phase_rng.choice(n_pages, size=hot_pages, replace=False)
        rng = np.random.default_rng([spec.seed, 2, epoch])
        hot_mask = rng.random(events) < 0.9
        ranks = rng.choice(hot_pages, size=events, p=pmf)
        uniform = rng.integers(0, n_pages, size=events)
        pages = np.where(hot_mask, hot_set[ranks], uniform)
        lines = rng.integers(0, PAGE_SIZE // CACHELINE, size=events)
        ops = (rng.random(events) < (1.0 / 3.0)).astype(np.uint8)
        addrs = pages * PAGE_SIZE + lines * CACHELINE
        return EventBatch(ops, addrs, np.zeros(events, dtype=np.int32))

    return Trace(spec.epochs, batch, spec)


def generate(spec: WorkloadSpec) -> Trace:
    if spec.kind in ("chase", "chase_wb"):
        return gen_chase(spec)
    if spec.kind in ("scan", "scan_wb"):
        return gen_scan(spec)
    if spec.kind == "phased":
        return gen_phased(spec)
    if spec.kind == "external":
        if not spec.path:
            raise ConfigError("external workload needs a trace path")
        trace = load_trace(spec.path)
        return trace.rechunk(spec.epochs) if spec.epochs > 1 else trace
    raise ConfigError(f"unknown workload kind {spec.kind!r}")


_BIN_DTYPE = np.dtype([("op", "u1"), ("addr", "<u8"), ("worker", "<u2")])
_OP_CHARS = {"R": OP_READ, "W": OP_WRITE}


def load_trace(path: str, ram_bytes: int | None = None) -> Trace:
    """Load an external trace: line-oriented ``OP,byte_address,worker`` text,
    or the binary variant (record count, then 1-byte op / 8-byte LE address /
    2-byte LE worker records) when the file ends in ``.bin``."""
    if path.endswith(".bin"):
        with open(path, "rb") as f:
            head = f.read(8)
            if len(head) not in (0, 8):
                raise TraceFormatError(f"{path}: truncated header")
            count = int.from_bytes(head, "little") if head else 0
            raw = f.read()
        if len(raw) != count * _BIN_DTYPE.itemsize:
            raise TraceFormatError(f"{path}: expected {count} records, payload is {len(raw)} bytes")
        rec = np.frombuffer(raw, dtype=_BIN_DTYPE)
        ops = rec["op"].astype(np.uint8)
        addrs = rec["addr"].astype(np.int64)
        workers = rec["worker"].astype(np.int32)
        if np.any(ops > 1):
            raise TraceFormatError(f"{path}: unknown op code")
    else:
        ops_l: list[int] = []
        addrs_l: list[int] = []
        workers_l: list[int] = []
        with open(path) as f:
            for lineno, raw_line in enumerate(f, 1):
                line = raw_line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split(",")
                if len(parts) != 3:
                    raise TraceFormatError(f"{path}:{lineno}: expected OP,address,worker")
                op_s, addr_s, worker_s = (p.strip() for p in parts)
                if op_s not in _OP_CHARS:
                    raise TraceFormatError(f"{path}:{lineno}: unknown op {op_s!r}")
                try:
                    addr = int(addr_s)
                    worker = int(worker_s)
                except ValueError:
                    raise TraceFormatError(f"{path}:{lineno}: bad integer field") from None
                if addr < 0:
                    raise TraceFormatError(f"{path}:{lineno}: negative address")
                ops_l.append(_OP_CHARS[op_s])
                addrs_l.append(addr)
                workers_l.append(worker)
        ops = np.asarray(ops_l, dtype=np.uint8)
        addrs = np.asarray(addrs_l, dtype=np.int64)
        workers = np.asarray(workers_l, dtype=np.int32)
    if ram_bytes is not None and len(addrs) and int(addrs.max()) >= ram_bytes:
        raise TraceFormatError(f"{path}: address {int(addrs.max())} outside RAM of {ram_bytes} bytes")
    flat = EventBatch(ops, addrs, workers)
    return Trace(1, lambda _i: flat)


def save_trace(trace: Trace, path: str) -> None:
    """Write all epochs of a trace to a file (format picked by extension)."""
    flat = EventBatch.concat(list(trace.epochs()))
    if path.endswith(".bin"):
        rec = np.empty(len(flat), dtype=_BIN_DTYPE)
        rec["op"] = flat.ops
        rec["addr"] = flat.addrs.astype(np.uint64)
        rec["worker"] = flat.workers.astype(np.uint16)
        with open(path, "wb") as f:
            f.write(len(flat).to_bytes(8, "little"))
            f.write(rec.tobytes())
    else:
        with open(path, "w") as f:
            for o, a, w in zip(flat.ops.tolist(), flat.addrs.tolist(), flat.workers.tolist()):
                f.write(f"{'W' if o else 'R'},{a},{w}\n")


_SPEC_FIELDS = {
    "kind": str, "buffer_bytes": parse_size, "workers": int, "epochs": int,
    "seed": int, "zipf_s": float, "phase_length": int, "hot_fraction": float,
    "events_per_epoch": int, "path": str,
}


def parse_workload_spec(text: str) -> WorkloadSpec:
    kv = parse_kv(text)
    kwargs = {}
    for key, val in kv.items():
        if key not in _SPEC_FIELDS:
            raise ConfigError(f"unknown workload spec key {key!r}")
        kwargs[key] = _SPEC_FIELDS[key](val)
    if "kind" not in kwargs:
        raise ConfigError("workload spec needs a 'kind'")
    return WorkloadSpec(**kwargs)


def load_workload_spec(path: str) -> WorkloadSpec:
    with open(path) as f:
        return parse_workload_spec(f.read())
