"""Per-epoch swap planning plus two reference policies.

The online policy pairs the i-th hottest slow page with the i-th coldest
fast page and keeps the pair only while the swap strictly improves the
heat-weighted placement.  Both input lists are sorted, so the first
non-improving pair ends the plan.  The static oracle gives a lower-bound
placement from whole-run heat; the page-cache policy emulates the hardware
mode where the fast tier acts as a direct-mapped cache of the slow tier.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .mapping import FAST, PageMapping
from .memmodel import PAGE_SIZE, READ_MISS, WRITEBACK, TierDemand

POLICIES = ("raminate", "none", "dram_cache", "static_oracle")


@dataclass(frozen=True)
class PolicyConfig:
    kind: str = "raminate"
    max_pairs: int = 1000
    interval_s: float = 5.0         # optimization cadence = epoch length
    hysteresis_margin: float = 0.0  # score units a swap must win by

    def __post_init__(self):
        if self.kind not in POLICIES:
            raise ConfigError(f"unknown policy {self.kind!r}; pick one of {POLICIES}")
        if self.max_pairs < 0:
            raise ConfigError("max_pairs must be >= 0")
        if self.interval_s <= 0:
            raise ConfigError("interval must be > 0")
        if self.hysteresis_margin < 0:
            raise ConfigError("hysteresis_margin must be >= 0")


@dataclass
class SwapPlan:
    pairs: list[tuple[int, int]] = field(default_factory=list)  # (hot slow, cold fast)
    epoch_index: int = 0

    def __len__(self) -> int:
        return len(self.pairs)


def plan_swaps(rankings: tuple[np.ndarray, np.ndarray], scores: np.ndarray,
               config: PolicyConfig, epoch_index: int = 0) -> SwapPlan:
    """Greedy rank-i-to-rank-i pairing under the swap budget."""
    hot_slow, cold_fast = rankings
    n = min(len(hot_slow), len(cold_fast), config.max_pairs)
    pairs = []
    for i in range(n):
        h = int(hot_slow[i])
        c = int(cold_fast[i])
        if scores[h] <= scores[c] + config.hysteresis_margin:
            break  # both lists sorted: no later pair can qualify
        pairs.append((h, c))
    return SwapPlan(pairs, epoch_index)


def static_oracle(total_heat: np.ndarray, mapping: PageMapping) -> np.ndarray:
    """Ideal fast-tier page set: the top pages by whole-run heat, as many as
    the fast tier holds; ties break toward the lower page index.  Returns the
    selected guest pages in ascending order."""
    n_fast = int(np.count_nonzero(mapping.tier_idx == FAST))
    if n_fast == 0:
        return np.empty(0, dtype=np.int64)
    idx = np.arange(mapping.n_pages)
    order = np.lexsort((idx, -total_heat))
    return np.sort(order[:n_fast])


def placement_cost(total_heat: np.ndarray, fast_set: np.ndarray) -> float:
    """Slow-tier heat of a placement; the quantity the oracle minimizes."""
    return float(total_heat.sum() - total_heat[fast_set].sum())


class DramPageCache:
    """Fast tier as a direct-mapped page-granular cache of the slow tier.

    Emulates the hardware caching mode: guest page p lives in slot
    ``p % cache_pages``.  A hit charges the access to the fast tier; a miss
    fills the page (slow read + fast write), writes a displaced dirty page
    back to the slow tier first, then serves the access from the fast tier.
    """

    def __init__(self, cache_pages: int):
        if cache_pages < 1:
            raise ConfigError("page cache needs at least one page")
        self.cache_pages = cache_pages
        self.tags = np.full(cache_pages, -1, dtype=np.int64)
        self.dirty = np.zeros(cache_pages, dtype=bool)
        self.hits = 0
        self.misses = 0

    def attribute(self, pages, kinds, counts) -> tuple[TierDemand, TierDemand]:
        """Attribute a miss stream; returns (fast demand, slow demand)."""
        fast = TierDemand()
        slow = TierDemand()
        tags = self.tags
        dirty = self.dirty
        cp = self.cache_pages
        for page, kind, count in zip(
                np.asarray(pages).tolist(), np.asarray(kinds).tolist(),
                np.asarray(counts).tolist()):
            slot = page % cp
            if tags[slot] != page:
                self.misses += 1
                if dirty[slot]:
                    slow.extra_writeback_bytes += PAGE_SIZE
                slow.extra_read_bytes += PAGE_SIZE
                fast.extra_writeback_bytes += PAGE_SIZE
                tags[slot] = page
                dirty[slot] = False
            else:
                self.hits += 1
            if kind == READ_MISS:
                fast.read_misses += count
            else:
                fast.writebacks += count
                dirty[slot] = True
        return fast, slow
