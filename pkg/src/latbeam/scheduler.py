"""Work distribution for token expansion.

Two strategies with identical semantics and different contention profiles:

* static: a prefix sum over active-token out-degrees splits the frame's
  arcs into equal contiguous ranges, one per worker, before the pass runs.
* dynamic: workers repeatedly claim the next unprocessed token from a
  shared atomic counter and expand all of that token's arcs.

Both enumerate every (token, out-arc) pair exactly once, so recombination
sees the same candidate multiset either way and decoding results are
scheduler-invariant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._atomics import atomic_add_i64


class Dispatcher:
    """Atomic take-a-number counter over [0, total)."""

    def __init__(self, total: int):
        self.total = int(total)
        self.cell = np.zeros(1, dtype=np.int64)

    def __repr__(self):
        return f"Dispatcher(total={self.total}, next={int(self.cell[0])})"


def claim_next(d: Dispatcher) -> int | None:
    """Claim the next token index, or None once all are taken.

    Every index in [0, total) is handed out exactly once across all
    concurrent claimers.
    """
    i = atomic_add_i64(d.cell, 0, 1)
    return i if i < d.total else None


@dataclass(frozen=True)
class StaticPartition:
    prefix: np.ndarray
    ranges: list[tuple[int, int]]

    @property
    def num_arcs(self) -> int:
        return int(self.prefix[-1])

    def locate(self, g: int) -> tuple[int, int]:
        """Map a global arc index to (token index, local arc offset)."""
        i = int(np.searchsorted(self.prefix, g, side="right")) - 1
        return i, g - int(self.prefix[i])


def static_partition(out_degrees: np.ndarray, workers: int) -> StaticPartition:
    """Tile the frame's global arc indices into one range per worker.

    Worker w owns [w*ceil(A/P), min((w+1)*ceil(A/P), A)); the ranges tile
    [0, A) exactly, and trailing workers may come up short (or empty) when
    A is not divisible by P.
    """
    out_degrees = np.asarray(out_degrees, dtype=np.int64)
    n = len(out_degrees)
    prefix = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(out_degrees, out=prefix[1:])
    total = int(prefix[-1])
    chunk = -(-total // workers) if total else 0
    ranges = []
    for w in range(workers):
        lo = min(w * chunk, total)
        hi = min((w + 1) * chunk, total)
        ranges.append((lo, hi))
    return StaticPartition(prefix, ranges)
