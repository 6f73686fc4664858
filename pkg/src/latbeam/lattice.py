"""Exact lattice generation, pruning, and finalization.

During decoding every beam-surviving token passing (winner or not) is
recorded as a lattice arc.  Arcs land in a sharded store: K preallocated
vectors, each with an atomic length counter, so workers append concurrently
without locks; a worker pushes to shard worker_id mod K.  Nothing is ever
moved or freed mid-decode — nodes are (frame, index) pairs into the
per-frame token lists, which never reorder, and pruning only flags arcs.

Pruning works in extra-cost space: an arc's extra cost is the cost of the
best complete path through it minus the best overall path cost, computed by
backward relaxation from a terminus (the live frontier mid-decode, the
final-weighted last frame at the end).  Arcs whose extra cost exceeds
lattice_beam are flagged; compaction and dense renumbering happen once, in
finalize_lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ._atomics import atomic_add_i64
from .errors import (
    CapacityError,
    DecodeFailure,
    InternalInvariantError,
    ParseError,
    UsageError,
)

CONVERGE_TOL = 1e-9


class LatticeNodeId(NamedTuple):
    frame: int
    idx: int


@dataclass(frozen=True)
class LatticeArc:
    """Resolved lattice arc, as served by queries and finalization."""

    from_node: LatticeNodeId
    to_node: LatticeNodeId
    ilabel: int
    olabel: int
    graph_cost: float
    acoustic_cost: float
    extra_cost: float = math.inf
    pruned: bool = False


class StagedPass(NamedTuple):
    """What recombination pushes: endpoints are resolved at aggregation.

    pred is the previous frame's token index for emitting passes and the
    source state id for epsilon passes; cost is the destination candidate
    cost; ac the scaled acoustic cost (0 for epsilon).
    """

    arc_id: int
    pred: int
    cost: float
    ac: float


@dataclass
class FrameTokens:
    """One frame's aggregated tokens; doubles as the frame's node list.

    pred_arc/pred_idx are -1 for the initial token.  For a token reached
    by an emitting arc, pred_idx indexes the previous frame's list; for an
    epsilon arc it indexes this same frame's list (epsilon passes do not
    consume a frame).
    """

    frame: int
    states: np.ndarray
    costs: np.ndarray
    pred_arc: np.ndarray
    pred_idx: np.ndarray

    @property
    def n(self) -> int:
        return len(self.states)

    def token(self, i: int) -> "Token":
        return Token(
            cost=float(self.costs[i]),
            pred_arc=int(self.pred_arc[i]) if self.pred_arc[i] >= 0 else None,
            pred_token=int(self.pred_idx[i]) if self.pred_idx[i] >= 0 else None,
            state=int(self.states[i]),
            frame=self.frame,
        )


@dataclass(frozen=True)
class Token:
    cost: float
    pred_arc: int | None
    pred_token: int | None
    state: int
    frame: int


STATUS_LIVE = 0
STATUS_PRUNED = 1
STATUS_VOID = 2


class ShardedArcStore:
    """K fixed-capacity arrays with atomic cursors; push never blocks.

    Slots are claimed by an atomic fetch-add on the owning shard's counter,
    so no two pushes can alias a slot under any interleaving.  Block marks
    (one per decoded frame) snapshot the counters so later passes can
    address exactly the arcs of one frame.
    """

    def __init__(self, capacity: int, num_shards: int):
        if capacity < 1 or num_shards < 1:
            raise UsageError("store capacity and shard count must be >= 1")
        self.num_shards = int(num_shards)
        self.shard_capacity = -(-int(capacity) // self.num_shards)
        size = self.num_shards * self.shard_capacity
        self.counts = np.zeros(self.num_shards, dtype=np.int64)
        self.arc = np.empty(size, dtype=np.int64)
        self.pred = np.empty(size, dtype=np.int64)
        self.cost = np.empty(size, dtype=np.float64)
        self.ac = np.empty(size, dtype=np.float64)
        self.from_idx = np.empty(size, dtype=np.int32)
        self.to_idx = np.empty(size, dtype=np.int32)
        self.status = np.empty(size, dtype=np.uint8)
        self.extra = np.empty(size, dtype=np.float64)
        self.marks: list[np.ndarray] = [np.zeros(self.num_shards, dtype=np.int64)]

    @property
    def total_pushed(self) -> int:
        return int(self.counts.sum())

    def end_block(self) -> None:
        self.marks.append(self.counts.copy())

    def push(self, arc_id: int, pred: int, cost: float, ac: float,
             worker_id: int) -> int:
        k = worker_id % self.num_shards
        slot = atomic_add_i64(self.counts, k, 1)
        if slot >= self.shard_capacity:
            raise CapacityError(
                "--max-lattice-arcs",
                f"lattice shard {k} overflowed its {self.shard_capacity}-slot "
                "capacity; raise --max-lattice-arcs",
            )
        g = k * self.shard_capacity + slot
        self.arc[g] = arc_id
        self.pred[g] = pred
        self.cost[g] = cost
        self.ac[g] = ac
        return g

    def bulk_stage(self, worker_id: int, arc_ids, preds, costs, acs) -> None:
        """Single-writer append of whole column slices (fallback engine)."""
        k = worker_id % self.num_shards
        n = len(arc_ids)
        s0 = int(self.counts[k])
        if s0 + n > self.shard_capacity:
            raise CapacityError(
                "--max-lattice-arcs",
                f"lattice shard {k} overflowed its {self.shard_capacity}-slot "
                "capacity; raise --max-lattice-arcs",
            )
        g0 = k * self.shard_capacity + s0
        self.arc[g0:g0 + n] = arc_ids
        self.pred[g0:g0 + n] = preds
        self.cost[g0:g0 + n] = costs
        self.ac[g0:g0 + n] = acs
        self.counts[k] = s0 + n

    def slots_in(self, block_lo: int | None = None,
                 block_hi: int | None = None) -> np.ndarray:
        """Global slot indices of blocks [block_lo, block_hi), shard-major.

        With no arguments, every pushed slot (shards scanned 0..K-1, slots
        in push order within a shard).
        """
        cap = self.shard_capacity
        lo = (self.marks[block_lo] if block_lo is not None
              else np.zeros(self.num_shards, dtype=np.int64))
        hi = self.marks[block_hi] if block_hi is not None else self.counts
        parts = [np.arange(k * cap + lo[k], k * cap + hi[k], dtype=np.int64)
                 for k in range(self.num_shards)]
        return np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)


def arc_push(store: ShardedArcStore, rec: StagedPass, worker_id: int) -> None:
    store.push(rec.arc_id, rec.pred, rec.cost, rec.ac, worker_id)


def collect_arcs(store: ShardedArcStore,
                 frame_range: tuple[int, int] | None = None) -> list[StagedPass]:
    """Deterministic shard-order readback of pushed records."""
    if frame_range is None:
        slots = store.slots_in()
    else:
        slots = store.slots_in(frame_range[0], frame_range[1])
    return [
        StagedPass(int(store.arc[g]), int(store.pred[g]),
                   float(store.cost[g]), float(store.ac[g]))
        for g in slots
    ]


class Lattice:
    """Lattice under construction: per-frame nodes plus the arc store.

    frames[f] is frame f's token list (frame 0 holds the initial token and
    its epsilon closure).  Block f of the store holds the arcs recorded
    while building frame f: emitting arcs from frame f-1 and epsilon arcs
    within frame f.
    """

    def __init__(self, wfst, store: ShardedArcStore):
        self.wfst = wfst
        self.store = store
        self.frames: list[FrameTokens] = []
        self.node_extra: list[np.ndarray | None] = []
        self.start_idx: int | None = None
        self.best_final_cost: float | None = None
        self.partial: bool | None = None
        self.final_token_costs: np.ndarray | None = None
        self.final_prune_done = False

    @property
    def num_frames(self) -> int:
        """Acoustic frame count T (frames list holds T+1 token lists)."""
        return len(self.frames) - 1

    def append_frame(self, toks: FrameTokens) -> None:
        if not self.frames:
            pos = int(np.searchsorted(toks.states, self.wfst.start_state))
            if pos >= toks.n or toks.states[pos] != self.wfst.start_state:
                raise UsageError(
                    "frame 0 token list is missing the start state"
                )
            self.start_idx = pos
        self.frames.append(toks)
        self.node_extra.append(None)
        self.store.end_block()

    def mark_final(self, final_token_costs: np.ndarray | None,
                   best_final_cost: float | None) -> None:
        """Record how the last frame terminates before the final prune."""
        self.partial = final_token_costs is None
        self.final_token_costs = final_token_costs
        self.best_final_cost = best_final_cost
        self.final_prune_done = True

    def block_arrays(self, block: int) -> dict[str, np.ndarray]:
        """Resolved columns of one block, with frame-typed endpoints."""
        st = self.store
        slots = st.slots_in(block, block + 1)
        arc_ids = st.arc[slots]
        il = self.wfst.arc_ilabel[arc_ids]
        from_frame = np.where(il > 0, block - 1, block)
        return {
            "slots": slots,
            "arc_id": arc_ids,
            "ilabel": il,
            "olabel": self.wfst.arc_olabel[arc_ids],
            "graph_cost": self.wfst.arc_weight[arc_ids],
            "acoustic_cost": st.ac[slots],
            "cost": st.cost[slots],
            "from_frame": from_frame,
            "from_idx": st.from_idx[slots],
            "to_frame": np.full(len(slots), block, dtype=np.int64),
            "to_idx": st.to_idx[slots],
            "status": st.status[slots],
            "extra": st.extra[slots],
        }

    def live_arc_table(self, include_pruned: bool = False) -> dict[str, np.ndarray]:
        """Concatenated non-void arcs over all blocks (pruned optional)."""
        cols: dict[str, list[np.ndarray]] = {}
        for b in range(len(self.frames)):
            blk = self.block_arrays(b)
            keep = (blk["status"] == STATUS_LIVE)
            if include_pruned:
                keep |= blk["status"] == STATUS_PRUNED
            for key, arr in blk.items():
                cols.setdefault(key, []).append(arr[keep])
        return {k: np.concatenate(v) if v else np.empty(0) for k, v in cols.items()}

    def arcs(self, include_pruned: bool = False) -> list[LatticeArc]:
        t = self.live_arc_table(include_pruned=include_pruned)
        return [
            LatticeArc(
                LatticeNodeId(int(t["from_frame"][i]), int(t["from_idx"][i])),
                LatticeNodeId(int(t["to_frame"][i]), int(t["to_idx"][i])),
                int(t["ilabel"][i]),
                int(t["olabel"][i]),
                float(t["graph_cost"][i]),
                float(t["acoustic_cost"][i]),
                float(t["extra"][i]),
                bool(t["status"][i] == STATUS_PRUNED),
            )
            for i in range(len(t["slots"]))
        ]

    def resolve_block(self, block: int, cutoff: float,
                      kept: FrameTokens) -> None:
        """Promote the block's staged passes to lattice arcs.

        Drops (marks void) passes over the final cutoff, passes into states
        that did not keep a token, and duplicate epsilon relaxations of one
        arc (keeping the cheapest).  Endpoint indices are resolved against
        the kept token lists.
        """
        st = self.store
        slots = st.slots_in(block, block + 1)
        if len(slots) == 0 or kept.n == 0:
            st.status[slots] = STATUS_VOID
            return
        arc_ids = st.arc[slots]
        il = self.wfst.arc_ilabel[arc_ids]
        cand = st.cost[slots]
        dst = self.wfst.arc_dst[arc_ids]

        pos = np.minimum(np.searchsorted(kept.states, dst), kept.n - 1)
        ok = (cand <= cutoff) & (kept.states[pos] == dst)

        is_eps = il == 0
        if np.any(is_eps & ok):
            # Re-relaxed epsilon arcs appear once per improving round; only
            # the cheapest instance becomes a lattice arc.
            eps_sel = np.flatnonzero(is_eps & ok)
            order = np.lexsort((cand[eps_sel], arc_ids[eps_sel]))
            sorted_arcs = arc_ids[eps_sel][order]
            first = np.ones(len(order), dtype=bool)
            first[1:] = sorted_arcs[1:] != sorted_arcs[:-1]
            ok[eps_sel[order[~first]]] = False

        from_resolved = st.pred[slots].copy()
        eps_ok = is_eps & ok
        if np.any(eps_ok):
            src_pos = np.minimum(
                np.searchsorted(kept.states, st.pred[slots]), kept.n - 1
            )
            if np.any(kept.states[src_pos[eps_ok]] != st.pred[slots][eps_ok]):
                raise InternalInvariantError(
                    "epsilon lattice arc references a source state that kept "
                    "no token"
                )
            from_resolved[is_eps] = src_pos[is_eps]

        st.from_idx[slots] = from_resolved
        st.to_idx[slots] = pos
        st.status[slots] = np.where(ok, STATUS_LIVE, STATUS_VOID).astype(np.uint8)
        st.extra[slots] = np.inf


def prune_lattice(lat: Lattice, frontier: FrameTokens, lattice_beam: float,
                  final_costs: np.ndarray | None = None) -> None:
    """Flag arcs whose extra cost exceeds lattice_beam.

    Backward sweeps from the frontier: node extra costs start at zero on
    the frontier (final-cost-adjusted when final_costs is given) and
    relax backward, frame by frame, with an in-frame fixpoint for epsilon
    arcs; an arc's extra cost is
        forward(from) + graph + acoustic − forward(to) + node_extra(to),
    its from-node's extra the min over its out-arcs.  Sweeps repeat until
    no value moves by more than 1e-9 (one sweep suffices for this layered
    relaxation; the second confirms), and a sweep stops descending early
    at a frame whose extras did not change since the last prune — nothing
    below can have changed either.  Already-pruned arcs stay pruned and do
    not participate; nodes are never removed.
    """
    if lattice_beam < 0:
        raise UsageError("lattice_beam must be >= 0")
    t = frontier.frame
    # Identity check only: an overlapped prune runs against frame t while
    # the decoder is already appending frame t+1, so "newest" would race.
    if not (0 <= t < len(lat.frames)) or lat.frames[t] is not frontier:
        raise UsageError("frontier is not a frame of this lattice")
    if frontier.n == 0:
        raise UsageError("frontier is empty")

    if final_costs is None:
        terminus = np.zeros(frontier.n)
    else:
        totals = frontier.costs + final_costs
        best_total = totals.min()
        if not math.isfinite(best_total):
            raise UsageError("final_costs leave no finite-cost terminus")
        terminus = totals - best_total

    flag_lo = t + 1
    sweeps = 0
    changed_any = True
    while changed_any:
        sweeps += 1
        if sweeps > t + 2:
            raise InternalInvariantError(
                f"extra-cost relaxation did not converge in {t + 2} sweeps"
            )
        changed_any = False
        for f in range(t, -1, -1):
            new_extra = _relax_frame(lat, f, t, terminus)
            old = lat.node_extra[f]
            if old is None:
                changed = True
            else:
                # inf - inf (a node unreachable backward both times) is an
                # unchanged value, not a move.
                with np.errstate(invalid="ignore"):
                    delta = np.abs(new_extra - old)
                changed = bool(np.any(delta > CONVERGE_TOL))
            lat.node_extra[f] = new_extra
            if changed:
                changed_any = True
                flag_lo = min(flag_lo, f)
            elif f < t:
                # Extras here match the previous pass and everything below
                # depends only on them, so nothing deeper can have moved.
                break

    for b in range(flag_lo, t + 1):
        _flag_block(lat, b, lattice_beam)


def _relax_frame(lat: Lattice, f: int, t: int, terminus: np.ndarray) -> np.ndarray:
    """Fresh node extras for frame f from frame f+1's extras and frame f's
    epsilon arcs (relaxed to an in-frame fixpoint)."""
    n = lat.frames[f].n
    fwd = lat.frames[f].costs
    new_extra = terminus.copy() if f == t else np.full(n, np.inf)

    if f < t:
        blk = lat.block_arrays(f + 1)
        sel = (blk["status"] == STATUS_LIVE) & (blk["ilabel"] > 0)
        if np.any(sel):
            nxt = lat.node_extra[f + 1]
            fwd_next = lat.frames[f + 1].costs
            cand = (fwd[blk["from_idx"][sel]] + blk["graph_cost"][sel]
                    + blk["acoustic_cost"][sel]
                    - fwd_next[blk["to_idx"][sel]] + nxt[blk["to_idx"][sel]])
            np.minimum.at(new_extra, blk["from_idx"][sel], cand)

    blk = lat.block_arrays(f)
    sel = (blk["status"] == STATUS_LIVE) & (blk["ilabel"] == 0)
    if np.any(sel):
        src = blk["from_idx"][sel]
        dst = blk["to_idx"][sel]
        base = fwd[src] + blk["graph_cost"][sel] - fwd[dst]
        for _ in range(n + 1):
            cand = base + new_extra[dst]
            before = new_extra[src].copy()
            np.minimum.at(new_extra, src, cand)
            with np.errstate(invalid="ignore"):
                moved = np.any(before - new_extra[src] > CONVERGE_TOL)
            if not moved:
                break
        else:
            raise InternalInvariantError(
                f"epsilon extra-cost fixpoint did not settle within frame {f}"
            )
    return np.maximum(new_extra, 0.0)


def _flag_block(lat: Lattice, b: int, lattice_beam: float) -> None:
    st = lat.store
    slots = st.slots_in(b, b + 1)
    if len(slots) == 0:
        return
    live = st.status[slots] == STATUS_LIVE
    if not np.any(live):
        return
    sl = slots[live]
    arc_ids = st.arc[sl]
    il = lat.wfst.arc_ilabel[arc_ids]
    from_f = np.where(il > 0, b - 1, b)
    fwd_from = np.empty(len(sl))
    for fr in np.unique(from_f):
        m = from_f == fr
        fwd_from[m] = lat.frames[fr].costs[st.from_idx[sl][m]]
    fwd_to = lat.frames[b].costs[st.to_idx[sl]]
    node_x = lat.node_extra[b][st.to_idx[sl]]
    extra = np.maximum(
        fwd_from + lat.wfst.arc_weight[arc_ids] + st.ac[sl] - fwd_to + node_x,
        0.0,
    )
    st.extra[sl] = extra
    doomed = sl[extra > lattice_beam]
    st.status[doomed] = STATUS_PRUNED


@dataclass
class FinalLattice:
    """Compacted, densely renumbered lattice ready for scoring and disk."""

    num_nodes: int
    start: int
    final_ids: np.ndarray
    final_costs: np.ndarray
    from_: np.ndarray
    to: np.ndarray
    ilabel: np.ndarray
    olabel: np.ndarray
    graph_cost: np.ndarray
    acoustic_cost: np.ndarray
    node_frame: np.ndarray | None = None
    node_idx: np.ndarray | None = None
    num_frames: int | None = None

    @property
    def num_arcs(self) -> int:
        return len(self.from_)

    def same_lattice(self, other: "FinalLattice") -> bool:
        return (
            self.num_nodes == other.num_nodes
            and self.start == other.start
            and np.array_equal(self.final_ids, other.final_ids)
            and np.array_equal(self.final_costs, other.final_costs)
            and np.array_equal(self.from_, other.from_)
            and np.array_equal(self.to, other.to)
            and np.array_equal(self.ilabel, other.ilabel)
            and np.array_equal(self.olabel, other.olabel)
            and np.array_equal(self.graph_cost, other.graph_cost)
            and np.array_equal(self.acoustic_cost, other.acoustic_cost)
        )


def finalize_lattice(lat: Lattice) -> FinalLattice:
    """Compact surviving arcs and renumber referenced nodes densely.

    Node ids are assigned in (frame, idx) lexicographic order; arcs are
    emitted in a canonical (from, to, ilabel, olabel, costs) order so the
    written lattice is identical for every worker count and scheduler.
    Nodes never referenced by a surviving arc vanish implicitly.
    """
    if not lat.final_prune_done:
        raise UsageError("finalize requires the final prune to have run")
    t = lat.live_arc_table()
    if len(t["slots"]) == 0:
        raise DecodeFailure("no lattice arcs survived pruning")

    shift = np.int64(32)
    from_key = (t["from_frame"].astype(np.int64) << shift) | t["from_idx"].astype(np.int64)
    to_key = (t["to_frame"].astype(np.int64) << shift) | t["to_idx"].astype(np.int64)
    node_keys = np.unique(np.concatenate([from_key, to_key]))
    from_id = np.searchsorted(node_keys, from_key)
    to_id = np.searchsorted(node_keys, to_key)

    order = np.lexsort((
        t["acoustic_cost"], t["graph_cost"], t["olabel"], t["ilabel"],
        to_id, from_id,
    ))

    node_frame = (node_keys >> shift).astype(np.int64)
    node_idx = (node_keys & np.int64(0xFFFFFFFF)).astype(np.int64)

    start_key = np.int64(0) << shift | np.int64(lat.start_idx)
    start_pos = int(np.searchsorted(node_keys, start_key))
    if start_pos >= len(node_keys) or node_keys[start_pos] != start_key:
        raise DecodeFailure("surviving arcs do not connect to the start node")

    last = lat.num_frames
    at_last = node_frame == last
    if lat.partial:
        final_ids = np.flatnonzero(at_last)
        final_costs = np.zeros(len(final_ids))
    else:
        tok_costs = lat.final_token_costs
        is_final = np.isfinite(tok_costs[node_idx * at_last]) & at_last
        final_ids = np.flatnonzero(is_final)
        final_costs = tok_costs[node_idx[final_ids]]
    if len(final_ids) == 0:
        raise DecodeFailure("no terminal node survived pruning")

    return FinalLattice(
        num_nodes=len(node_keys),
        start=start_pos,
        final_ids=final_ids.astype(np.int64),
        final_costs=final_costs.astype(np.float64),
        from_=from_id[order].astype(np.int64),
        to=to_id[order].astype(np.int64),
        ilabel=t["ilabel"][order].astype(np.int64),
        olabel=t["olabel"][order].astype(np.int64),
        graph_cost=t["graph_cost"][order].astype(np.float64),
        acoustic_cost=t["acoustic_cost"][order].astype(np.float64),
        node_frame=node_frame,
        node_idx=node_idx,
        num_frames=last,
    )


def _fmt(x: float) -> str:
    return repr(float(x))


def write_lattice_text(fl: FinalLattice) -> str:
    lines = [f"NODES {fl.num_nodes} ARCS {fl.num_arcs} START {fl.start}"]
    for i in range(len(fl.final_ids)):
        lines.append(f"F {fl.final_ids[i]} {_fmt(fl.final_costs[i])}")
    for i in range(fl.num_arcs):
        lines.append(
            f"A {fl.from_[i]} {fl.to[i]} {fl.ilabel[i]} {fl.olabel[i]} "
            f"{_fmt(fl.graph_cost[i])} {_fmt(fl.acoustic_cost[i])}"
        )
    return "\n".join(lines) + "\n"


def read_lattice_text(text) -> FinalLattice:
    if hasattr(text, "read"):
        text = text.read()
    lines = str(text).splitlines()
    if not lines:
        raise ParseError(1, "empty lattice text")
    head = lines[0].split()
    if len(head) != 6 or head[0] != "NODES" or head[2] != "ARCS" or head[4] != "START":
        raise ParseError(1, f"bad header {lines[0]!r}")
    try:
        n, m, start = int(head[1]), int(head[3]), int(head[5])
    except ValueError:
        raise ParseError(1, f"non-integer header field in {lines[0]!r}") from None

    fids, fcosts = [], []
    cols: list[list] = [[], [], [], [], [], []]
    for line_no, line in enumerate(lines[1:], 2):
        toks = line.split()
        if not toks:
            continue
        if toks[0] == "F" and len(toks) == 3:
            try:
                fids.append(int(toks[1]))
                fcosts.append(float(toks[2]))
            except ValueError:
                raise ParseError(line_no, f"bad final line {line!r}") from None
        elif toks[0] == "A" and len(toks) == 7:
            try:
                for i in range(4):
                    cols[i].append(int(toks[1 + i]))
                cols[4].append(float(toks[5]))
                cols[5].append(float(toks[6]))
            except ValueError:
                raise ParseError(line_no, f"bad arc line {line!r}") from None
        else:
            raise ParseError(line_no, f"unrecognized line {line!r}")

    if len(cols[0]) != m:
        raise ParseError(len(lines), f"header promised {m} arcs, found {len(cols[0])}")
    ids = np.asarray(fids, dtype=np.int64)
    refs = [np.asarray(c, dtype=np.int64) for c in cols[:2]]
    if (len(ids) and (ids.min() < 0 or ids.max() >= n)) or any(
        len(r) and (r.min() < 0 or r.max() >= n) for r in refs
    ) or not 0 <= start < n:
        raise ParseError(1, "node reference out of range")
    return FinalLattice(
        num_nodes=n,
        start=start,
        final_ids=ids,
        final_costs=np.asarray(fcosts, dtype=np.float64),
        from_=refs[0],
        to=refs[1],
        ilabel=np.asarray(cols[2], dtype=np.int64),
        olabel=np.asarray(cols[3], dtype=np.int64),
        graph_cost=np.asarray(cols[4], dtype=np.float64),
        acoustic_cost=np.asarray(cols[5], dtype=np.float64),
    )
