"""Guest page -> (tier, frame) mapping with explicit migration accounting.

The mapping realizes a per-VM RAM mixed from a fast and a slow tier.  The
slow region occupies guest pages from offset 0; the fast region sits at the
top of guest RAM.  Swapping a pair of pages exchanges their frames and
accrues one full page read plus one full page write on each tier, so the
relocation cost contends with workload traffic in the epoch it happens.
"""

from __future__ import annotations

import io
from typing import Sequence

import numpy as np

from .errors import CapacityError, ConfigError, PlanError, SimError
from .memmodel import PAGE_SIZE, DeviceTier

FAST = 0
SLOW = 1


class PageMapping:
    page_size = PAGE_SIZE

    def __init__(self, tier_names: tuple[str, str], tier_idx: np.ndarray,
                 frame_idx: np.ndarray, fast_capacity_pages: int,
                 slow_capacity_pages: int):
        self.tier_names = tier_names          # (fast name, slow name)
        self.tier_idx = tier_idx              # per guest page: FAST | SLOW
        self.frame_idx = frame_idx            # per guest page: frame within tier
        self.fast_capacity_pages = fast_capacity_pages
        self.slow_capacity_pages = slow_capacity_pages
        # accrued migration traffic since last drain: {tier_index: [read, write]}
        self.migration_bytes = np.zeros((2, 2), dtype=np.int64)

    @property
    def n_pages(self) -> int:
        return len(self.tier_idx)

    @property
    def ram_bytes(self) -> int:
        return self.n_pages * PAGE_SIZE

    @property
    def fast_pages(self) -> np.ndarray:
        return np.nonzero(self.tier_idx == FAST)[0]

    @property
    def slow_pages(self) -> np.ndarray:
        return np.nonzero(self.tier_idx == SLOW)[0]

    def resolve(self, guest_page: int) -> tuple[str, int]:
        if not 0 <= guest_page < self.n_pages:
            raise SimError(f"guest page {guest_page} out of range (0..{self.n_pages - 1})")
        return self.tier_names[self.tier_idx[guest_page]], int(self.frame_idx[guest_page])

    def drain_migration_bytes(self) -> np.ndarray:
        """Return and reset the accrued per-tier [read, write] migration bytes."""
        out = self.migration_bytes.copy()
        self.migration_bytes[:] = 0
        return out

    def check_bijection(self) -> None:
        """Exhaustive consistency scan (test hook, not on the hot path)."""
        for t, cap in ((FAST, self.fast_capacity_pages), (SLOW, self.slow_capacity_pages)):
            frames = self.frame_idx[self.tier_idx == t]
            if len(frames) > cap:
                raise SimError(f"tier {self.tier_names[t]}: {len(frames)} pages over capacity {cap}")
            if len(np.unique(frames)) != len(frames):
                raise SimError(f"tier {self.tier_names[t]}: double-mapped frame")

    def dump(self, fileobj) -> None:
        """Write the mapping as a text table: guest_page tier frame."""
        fileobj.write("# guest_page tier frame\n")
        for p in range(self.n_pages):
            fileobj.write(f"{p} {self.tier_names[self.tier_idx[p]]} {self.frame_idx[p]}\n")

    def dumps(self) -> str:
        buf = io.StringIO()
        self.dump(buf)
        return buf.getvalue()

    def digest(self) -> str:
        """Stable digest of the mapping state (for run summaries)."""
        import hashlib
        h = hashlib.sha256()
        h.update(self.tier_idx.tobytes())
        h.update(self.frame_idx.tobytes())
        return h.hexdigest()[:16]


def create_mapping(ram_bytes: int, fast_ratio: float, fast_tier: DeviceTier,
                   slow_tier: DeviceTier) -> PageMapping:
    """Lay out guest RAM: slow region from guest offset 0, fast region at the
    top of the guest address space, ``round(fast_ratio * pages)`` pages wide."""
    if not 0.0 <= fast_ratio <= 1.0:
        raise ConfigError("fast_ratio must be within [0, 1]")
    if ram_bytes <= 0 or ram_bytes % PAGE_SIZE:
        raise ConfigError("ram_bytes must be a positive multiple of the page size")
    n_pages = ram_bytes // PAGE_SIZE
    n_fast = round(fast_ratio * n_pages)
    n_slow = n_pages - n_fast
    if n_fast > fast_tier.capacity_pages:
        raise CapacityError(f"fast tier {fast_tier.name} holds {fast_tier.capacity_pages} pages, need {n_fast}")
    if n_slow > slow_tier.capacity_pages:
        raise CapacityError(f"slow tier {slow_tier.name} holds {slow_tier.capacity_pages} pages, need {n_slow}")
    tier_idx = np.full(n_pages, SLOW, dtype=np.uint8)
    tier_idx[n_slow:] = FAST
    frame_idx = np.empty(n_pages, dtype=np.int64)
    frame_idx[:n_slow] = np.arange(n_slow)
    frame_idx[n_slow:] = np.arange(n_fast)
    return PageMapping((fast_tier.name, slow_tier.name), tier_idx, frame_idx,
                       fast_tier.capacity_pages, slow_tier.capacity_pages)


def swap_pages(mapping: PageMapping, pairs: Sequence[tuple[int, int]]) -> int:
    """Exchange frame assignments for each (slow page, fast page) pair.

    Validation rejects the whole plan before any mutation: every page must
    appear at most once and each pair must cross tiers.  Returns the number
    of pairs applied; migration bytes accrue on the mapping.
    """
    if not pairs:
        return 0
    seen: set[int] = set()
    for a, b in pairs:
        for p in (a, b):
            if not 0 <= p < mapping.n_pages:
                raise PlanError(f"page {p} out of range")
            if p in seen:
                raise PlanError(f"page {p} appears twice in the plan")
            seen.add(p)
        if mapping.tier_idx[a] == mapping.tier_idx[b]:
            raise PlanError(f"pages {a} and {b} map to the same tier")
    idx_a = np.fromiter((a for a, _ in pairs), dtype=np.int64, count=len(pairs))
    idx_b = np.fromiter((b for _, b in pairs), dtype=np.int64, count=len(pairs))
    ta = mapping.tier_idx[idx_a].copy()
    fa = mapping.frame_idx[idx_a].copy()
    mapping.tier_idx[idx_a] = mapping.tier_idx[idx_b]
    mapping.frame_idx[idx_a] = mapping.frame_idx[idx_b]
    mapping.tier_idx[idx_b] = ta
    mapping.frame_idx[idx_b] = fa
    # per pair: each tier reads the outgoing page and writes the incoming one
    mapping.migration_bytes += len(pairs) * PAGE_SIZE
    return len(pairs)


def restore_mapping(text: str, fast_tier: DeviceTier, slow_tier: DeviceTier) -> PageMapping:
    """Rebuild a mapping from the dump() text table."""
    names = (fast_tier.name, slow_tier.name)
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        page_s, tier, frame_s = line.split()
        rows.append((int(page_s), tier, int(frame_s)))
    n_pages = len(rows)
    tier_idx = np.empty(n_pages, dtype=np.uint8)
    frame_idx = np.empty(n_pages, dtype=np.int64)
    for page, tier, frame in rows:
        if not 0 <= page < n_pages:
            raise SimError(f"mapping dump: page {page} out of range")
        try:
            tier_idx[page] = names.index(tier)
        except ValueError:
            raise SimError(f"mapping dump: unknown tier {tier}") from None
        frame_idx[page] = frame
    m = PageMapping(names, tier_idx, frame_idx,
                    fast_tier.capacity_pages, slow_tier.capacity_pages)
    m.check_bijection()
    return m
