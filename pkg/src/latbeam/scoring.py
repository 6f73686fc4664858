"""Word error rate, lattice oracle error rate, and lattice density."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UsageError
from .lattice import FinalLattice


@dataclass(frozen=True)
class WerResult:
    substitutions: int
    insertions: int
    deletions: int

    @property
    def errors(self) -> int:
        return self.substitutions + self.insertions + self.deletions


def wer(hyp: list[int], ref: list[int]) -> WerResult:
    """Edit-distance word counts of a hypothesis against a reference.

    Ties between alignments are broken preferring substitutions, then
    insertions, then deletions.
    """
    if len(ref) == 0:
        raise UsageError("reference word sequence is empty")
    h, r = len(hyp), len(ref)
    d = np.zeros((h + 1, r + 1), dtype=np.int64)
    d[:, 0] = np.arange(h + 1)
    d[0, :] = np.arange(r + 1)
    for i in range(1, h + 1):
        for j in range(1, r + 1):
            d[i, j] = min(
                d[i - 1, j - 1] + (hyp[i - 1] != ref[j - 1]),
                d[i - 1, j] + 1,
                d[i, j - 1] + 1,
            )
    subs = ins = dels = 0
    i, j = h, r
    while i > 0 or j > 0:
        if i > 0 and j > 0 and d[i, j] == d[i - 1, j - 1] + (
            hyp[i - 1] != ref[j - 1]
        ):
            if hyp[i - 1] != ref[j - 1]:
                subs += 1
            i, j = i - 1, j - 1
        elif i > 0 and d[i, j] == d[i - 1, j] + 1:
            ins += 1
            i -= 1
        else:
            dels += 1
            j -= 1
    return WerResult(subs, ins, dels)


def wer_percent(hyp: list[int], ref: list[int]) -> float:
    """100 * (substitutions + insertions + deletions) / len(ref)."""
    return 100.0 * wer(hyp, ref).errors / len(ref)


def oracle_wer(fl: FinalLattice, ref: list[int]) -> int:
    """Fewest word errors over all complete paths through the lattice.

    Epsilon output labels contribute no words.  Raises UsageError when the
    reference is empty or the lattice has no complete path.
    """
    if len(ref) == 0:
        raise UsageError("reference word sequence is empty")
    n, r = fl.num_nodes, len(ref)
    inf = np.iinfo(np.int64).max // 2
    best = np.full((n, r + 1), inf, dtype=np.int64)
    best[fl.start, 0] = 0

    order = np.argsort(fl.from_, kind="stable")
    frm = fl.from_[order]
    to = fl.to[order]
    ol = fl.olabel[order]

    def close_deletions() -> None:
        for j in range(1, r + 1):
            np.minimum(best[:, j], best[:, j - 1] + 1, out=best[:, j])

    # Deletion closure plus arc relaxation, swept to a fixpoint; cycles can
    # only involve epsilon outputs, so the error table is non-increasing
    # and integer-valued, giving a finite sweep bound (one per product-graph
    # node in the worst case).
    for _ in range(n * (r + 1) + 2):
        close_deletions()
        before = best.copy()
        for a in range(len(frm)):
            u, v, w = int(frm[a]), int(to[a]), int(ol[a])
            if w == 0:
                np.minimum(best[v], best[u], out=best[v])
            else:
                # insertion: emit w without consuming reference
                np.minimum(best[v, :], best[u, :] + 1, out=best[v, :])
                # match/substitution against each reference position
                cost = best[u, :r] + (w != np.asarray(ref, dtype=np.int64))
                np.minimum(best[v, 1:], cost, out=best[v, 1:])
        close_deletions()
        if np.array_equal(best, before):
            break
    else:
        raise UsageError("lattice oracle search failed to converge")

    result = int(min(best[int(f), r] for f in fl.final_ids))
    if result >= inf:
        raise UsageError("lattice has no complete path")
    return result


def oracle_wer_percent(fl: FinalLattice, ref: list[int]) -> float:
    return 100.0 * oracle_wer(fl, ref) / len(ref)


def lattice_density(fl: FinalLattice, num_frames: int | None = None) -> float:
    """Arcs per acoustic frame."""
    t = num_frames if num_frames is not None else fl.num_frames
    if t is None:
        raise UsageError(
            "lattice does not carry a frame count; pass num_frames"
        )
    if t < 1:
        raise UsageError("frame count must be >= 1")
    return fl.num_arcs / float(t)
