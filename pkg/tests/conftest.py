import numpy as np
import pytest

import tiersim as ts

MiB = 1024 * 1024


@pytest.fixture(scope="session")
def dram():
    return ts.load_tier_preset("dram-interleaved")


@pytest.fixture(scope="session")
def dcpmm():
    return ts.load_tier_preset("dcpmm-interleaved")


@pytest.fixture(scope="session")
def dcpmm_single():
    return ts.load_tier_preset("dcpmm-noninterleaved")


def reads(addrs):
    """Build a read-only event list from byte addresses."""
    return [(0, a) for a in addrs]


def writes(addrs):
    return [(1, a) for a in addrs]


class RefLru:
    """Brute-force fully-associative LRU stack with dirty tracking.

    Independent oracle for the cache filter: a plain recency list, no sets,
    no run-length tricks.  Returns per-event outcomes.
    """

    def __init__(self, capacity_lines):
        self.capacity = capacity_lines
        self.stack = []   # most recent last
        self.dirty = {}

    def access(self, op, addr):
        """Returns (read_miss: bool, writeback_line: int | None)."""
        line = addr // 64
        wb = None
        if line in self.dirty:
            self.stack.remove(line)
            self.stack.append(line)
            if op == 1:
                self.dirty[line] = True
            return False, None
        if len(self.stack) == self.capacity:
            victim = self.stack.pop(0)
            if self.dirty.pop(victim):
                wb = victim
        self.stack.append(line)
        self.dirty[line] = op == 1
        return True, wb
