"""Decoding-graph container: load, validate, and serve an immutable WFST.

The graph is stored as flat arrays in a compressed-sparse-row shape: arcs
sorted by source state, one global arc array, and a per-state offset table,
so every state's out-arcs form one contiguous range.  Arc ids are assigned
after sorting and equal each arc's position in the global array, which is
what lets the decoder index per-arc scratch buffers densely.

Everything is immutable after load and safe for unrestricted concurrent
reads from any number of workers and utterances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, UsageError, ValidationError


@dataclass(frozen=True)
class Arc:
    src: int
    dst: int
    ilabel: int
    olabel: int
    weight: float
    id: int


class Wfst:
    """Immutable decoding graph with contiguous per-state arc ranges."""

    def __init__(
        self,
        num_states: int,
        start_state: int,
        arc_offsets: np.ndarray,
        arc_src: np.ndarray,
        arc_dst: np.ndarray,
        arc_ilabel: np.ndarray,
        arc_olabel: np.ndarray,
        arc_weight: np.ndarray,
        final_costs: dict[int, float],
    ):
        self.num_states = num_states
        self.start_state = start_state
        self.arc_offsets = arc_offsets
        self.arc_src = arc_src
        self.arc_dst = arc_dst
        self.arc_ilabel = arc_ilabel
        self.arc_olabel = arc_olabel
        self.arc_weight = arc_weight
        self.final_costs = final_costs
        # Dense view of final costs for the kernels; +inf marks non-final.
        fc = np.full(num_states, np.inf)
        for s, c in final_costs.items():
            fc[s] = c
        self.final_cost_array = fc
        self.max_ilabel = int(arc_ilabel.max()) if len(arc_ilabel) else 0
        for arr in (arc_offsets, arc_src, arc_dst, arc_ilabel, arc_olabel,
                    arc_weight, fc):
            arr.setflags(write=False)

    @property
    def num_arcs(self) -> int:
        return len(self.arc_src)

    def arc(self, arc_id: int) -> Arc:
        if not 0 <= arc_id < self.num_arcs:
            raise UsageError(f"arc id {arc_id} out of range [0, {self.num_arcs})")
        return Arc(
            int(self.arc_src[arc_id]),
            int(self.arc_dst[arc_id]),
            int(self.arc_ilabel[arc_id]),
            int(self.arc_olabel[arc_id]),
            float(self.arc_weight[arc_id]),
            arc_id,
        )

    def out_arc_range(self, state: int) -> tuple[int, int]:
        if not 0 <= state < self.num_states:
            raise UsageError(f"state {state} out of range [0, {self.num_states})")
        return int(self.arc_offsets[state]), int(self.arc_offsets[state + 1])

    def out_arcs(self, state: int) -> list[Arc]:
        lo, hi = self.out_arc_range(state)
        return [self.arc(i) for i in range(lo, hi)]


def out_arcs(w: Wfst, state: int) -> list[Arc]:
    return w.out_arcs(state)


def _split_lines(text) -> list[str]:
    if isinstance(text, str):
        return text.splitlines()
    if hasattr(text, "read"):
        return text.read().splitlines()
    return [str(line).rstrip("\n") for line in text]


def load_wfst_text(text) -> Wfst:
    """Parse the textual graph format.

    Each line is an arc "src dst ilabel olabel [weight]" (weight defaults
    to 0), a final state "state [final_cost]" (cost defaults to 0), or
    blank.  The first arc line's src is the start state.
    """
    src, dst, il, ol, wt = [], [], [], [], []
    finals: dict[int, float] = {}
    start_state = None

    for line_no, line in enumerate(_split_lines(text), 1):
        toks = line.split()
        if not toks:
            continue
        if len(toks) in (4, 5):
            try:
                s, d, i, o = (int(t) for t in toks[:4])
                w = float(toks[4]) if len(toks) == 5 else 0.0
            except ValueError:
                raise ParseError(line_no, f"malformed arc line {line!r}") from None
            if min(s, d, i, o) < 0:
                raise ParseError(line_no, f"negative field in arc line {line!r}")
            if not math.isfinite(w) or w < 0.0:
                raise ValidationError(
                    f"line {line_no}: arc weight must be finite and >= 0, got {toks[4]}"
                )
            if start_state is None:
                start_state = s
            src.append(s)
            dst.append(d)
            il.append(i)
            ol.append(o)
            wt.append(w)
        elif len(toks) in (1, 2):
            try:
                s = int(toks[0])
                c = float(toks[1]) if len(toks) == 2 else 0.0
            except ValueError:
                raise ParseError(line_no, f"malformed final line {line!r}") from None
            if s < 0:
                raise ParseError(line_no, f"negative state in final line {line!r}")
            if not math.isfinite(c) or c < 0.0:
                raise ValidationError(
                    f"line {line_no}: final cost must be finite and >= 0"
                )
            finals[s] = c
        else:
            raise ParseError(line_no, f"expected 1-2 or 4-5 fields, got {len(toks)}")

    if start_state is None:
        raise ValidationError("input defines no arcs, so no start state exists")
    if not finals:
        raise ValidationError("input defines no final state")

    src_a = np.asarray(src, dtype=np.int32)
    order = np.argsort(src_a, kind="stable")
    src_a = src_a[order]
    dst_a = np.asarray(dst, dtype=np.int32)[order]
    il_a = np.asarray(il, dtype=np.int32)[order]
    ol_a = np.asarray(ol, dtype=np.int32)[order]
    wt_a = np.asarray(wt, dtype=np.float64)[order]

    num_states = 1 + max(
        int(src_a.max()), int(dst_a.max()), max(finals), start_state
    )
    counts = np.bincount(src_a, minlength=num_states)
    offsets = np.zeros(num_states + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])

    return Wfst(num_states, start_state, offsets, src_a, dst_a, il_a, ol_a,
                wt_a, finals)


def _fmt(x: float) -> str:
    return repr(float(x))


def write_wfst_text(w: Wfst) -> str:
    """Inverse of load_wfst_text: the start state's arcs come first so the
    start survives the first-line convention; re-writing a loaded graph
    reproduces the text exactly."""
    lines = []

    def emit_state(s: int) -> None:
        lo, hi = w.out_arc_range(s)
        for i in range(lo, hi):
            lines.append(
                f"{w.arc_src[i]} {w.arc_dst[i]} {w.arc_ilabel[i]} "
                f"{w.arc_olabel[i]} {_fmt(w.arc_weight[i])}"
            )

    emit_state(w.start_state)
    for s in range(w.num_states):
        if s != w.start_state:
            emit_state(s)
    for s in sorted(w.final_costs):
        lines.append(f"{s} {_fmt(w.final_costs[s])}")
    return "\n".join(lines) + "\n"


def load_symbols(text) -> dict[str, int]:
    """Word symbol table: one "word<TAB>id" pair per line."""
    table: dict[str, int] = {}
    for line_no, line in enumerate(_split_lines(text), 1):
        toks = line.split()
        if not toks:
            continue
        if len(toks) != 2:
            raise ParseError(line_no, f"expected 'word id', got {line!r}")
        try:
            table[toks[0]] = int(toks[1])
        except ValueError:
            raise ParseError(line_no, f"non-integer id in {line!r}") from None
    return table
