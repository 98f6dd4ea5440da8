"""Per-page access-intensity tracking and hotness ranking.

Heat counts post-LLC traffic only: lines that stay cache-resident gain
nothing from migration, so they should not attract it.  Write-backs are
weighted more heavily than read misses because the slow tier's write path is
far weaker than its read path.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .mapping import PageMapping
from .memmodel import WRITEBACK, MissRecord


class PageHeat:
    def __init__(self, n_pages: int, write_weight: float = 2.0,
                 decay_alpha: float = 0.5):
        if not 0.0 <= decay_alpha < 1.0:
            raise ConfigError("decay_alpha must be in [0, 1)")
        if write_weight < 0:
            raise ConfigError("write_weight must be >= 0")
        self.n_pages = n_pages
        self.write_weight = write_weight
        self.decay_alpha = decay_alpha
        self.counts = np.zeros(n_pages)        # current epoch
        self.decayed_score = np.zeros(n_pages)  # across epochs

    def record(self, miss_records) -> None:
        """Tally one epoch's miss records (write-backs scaled by write_weight)."""
        if isinstance(miss_records, tuple):
            pages, kinds, counts = miss_records
        else:
            if not miss_records:
                return
            pages = np.fromiter((r.page_id for r in miss_records), dtype=np.int64)
            kinds = np.fromiter((r.kind for r in miss_records), dtype=np.int64)
            counts = np.fromiter((r.count for r in miss_records), dtype=np.int64)
        if len(pages) == 0:
            return
        w = np.where(kinds == WRITEBACK, self.write_weight, 1.0) * counts
        self.counts += np.bincount(pages, weights=w, minlength=self.n_pages)

    def sampled_record(self, miss_records: list[MissRecord], scan_count: int = 5) -> None:
        """Accessed-bit emulation: the record stream is split into
        ``scan_count`` sub-interval scans and each page contributes at most
        one count per scan, regardless of how hard it was hit."""
        if scan_count < 1:
            raise ConfigError("scan_count must be >= 1")
        if not miss_records:
            return
        pages = np.fromiter((r.page_id for r in miss_records), dtype=np.int64)
        for chunk in np.array_split(pages, scan_count):
            if len(chunk):
                touched = np.unique(chunk)
                self.counts[touched] += 1.0

    def end_epoch(self) -> None:
        """Fold the epoch tallies into the decayed score and reset them."""
        self.decayed_score *= self.decay_alpha
        self.decayed_score += self.counts
        self.counts[:] = 0.0

    def rank(self, mapping: PageMapping) -> tuple[np.ndarray, np.ndarray]:
        """(hot_slow, cold_fast): slow-tier pages by score descending and
        fast-tier pages by score ascending; ties break toward the lower guest
        page index in both orderings."""
        if mapping.n_pages != self.n_pages:
            raise ConfigError("heat and mapping cover different page ranges")
        scores = self.decayed_score
        slow = mapping.slow_pages
        fast = mapping.fast_pages
        # lexsort: last key is primary
        hot_slow = slow[np.lexsort((slow, -scores[slow]))]
        cold_fast = fast[np.lexsort((fast, scores[fast]))]
        return hot_slow, cold_fast

    def dump_histogram(self, fileobj) -> None:
        """Debug CSV of the current decayed scores, one row per page."""
        fileobj.write("page,score\n")
        for p in range(self.n_pages):
            fileobj.write(f"{p},{self.decayed_score[p]:g}\n")
