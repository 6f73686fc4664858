"""Per-frame acoustic cost matrices.

A matrix row holds the negative log-likelihood cost of each acoustic label
for one frame; column j scores ilabel j+1 (ilabel 0 is epsilon and never
consumes a frame).  The engine treats these as opaque costs produced by
whatever model ran upstream, scaled by a single multiplier.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ParseError, UsageError


class CostMatrix:
    def __init__(self, costs: np.ndarray):
        costs = np.ascontiguousarray(costs, dtype=np.float64)
        if costs.ndim != 2 or costs.shape[0] < 1 or costs.shape[1] < 1:
            raise UsageError("cost matrix must be 2-D with T >= 1 and D >= 1")
        if not np.all(np.isfinite(costs)):
            raise UsageError("cost matrix entries must be finite")
        self.costs = costs
        self.costs.setflags(write=False)

    @property
    def num_frames(self) -> int:
        return self.costs.shape[0]

    @property
    def num_labels(self) -> int:
        return self.costs.shape[1]


def load_cost_matrix(text) -> CostMatrix:
    """Parse "T D" then T rows of D whitespace-separated finite reals."""
    if hasattr(text, "read"):
        text = text.read()
    lines = [ln for ln in str(text).splitlines()]
    if not lines or not lines[0].split():
        raise ParseError(1, "missing 'T D' header")
    head = lines[0].split()
    if len(head) != 2:
        raise ParseError(1, f"header must be 'T D', got {lines[0]!r}")
    try:
        t, d = int(head[0]), int(head[1])
    except ValueError:
        raise ParseError(1, f"non-integer header {lines[0]!r}") from None
    if t < 1 or d < 1:
        raise ParseError(1, f"dimensions must be >= 1, got T={t} D={d}")

    rows = []
    row_no = 0
    for line_no, line in enumerate(lines[1:], 2):
        toks = line.split()
        if not toks:
            continue
        row_no += 1
        if row_no > t:
            raise ParseError(line_no, f"more than {t} data rows")
        if len(toks) != d:
            raise ParseError(line_no, f"row {row_no} has {len(toks)} of {d} entries")
        try:
            vals = [float(x) for x in toks]
        except ValueError:
            raise ParseError(line_no, f"non-numeric entry in row {row_no}") from None
        if not all(math.isfinite(v) for v in vals):
            raise ParseError(line_no, f"non-finite entry in row {row_no}")
        rows.append(vals)
    if row_no != t:
        raise ParseError(len(lines), f"expected {t} data rows, found {row_no}")
    return CostMatrix(np.asarray(rows, dtype=np.float64))


def write_cost_matrix(m: CostMatrix) -> str:
    lines = [f"{m.num_frames} {m.num_labels}"]
    for row in m.costs:
        lines.append(" ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def acoustic_cost(m: CostMatrix, frame: int, ilabel: int, scale: float = 1.0) -> float:
    """scale × costs[frame][ilabel−1]; epsilon (ilabel 0) has no cost here."""
    if ilabel == 0:
        raise UsageError("epsilon arcs carry no acoustic cost")
    if not 1 <= ilabel <= m.num_labels:
        raise UsageError(f"ilabel {ilabel} out of range [1, {m.num_labels}]")
    if not 0 <= frame < m.num_frames:
        raise UsageError(f"frame {frame} out of range [0, {m.num_frames})")
    return scale * float(m.costs[frame, ilabel - 1])
