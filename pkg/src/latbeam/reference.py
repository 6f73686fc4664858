"""Slow, obviously-correct reference implementations.

The decoder here is a plain dict-and-loop Viterbi beam search that makes
every rule explicit: one pass over all emitting candidates, winner per
state by (float32 cost, arc id), a fixed cutoff from the frame's true
best, Jacobi epsilon rounds that admit only strict improvements, and the
same resolution rules for staged lattice passes.  It shares no code with
the parallel engine beyond the cost-packing helpers, so agreement between
the two is meaningful evidence.

brute_force_extra_costs recomputes lattice extra costs from first
principles (independent backward best-completion costs) rather than the
engine's in-place extra relaxation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import packing
from .acoustics import CostMatrix
from .errors import DecodeFailure, InternalInvariantError, UsageError
from .wfst import Wfst


class RefArc(NamedTuple):
    """One live lattice arc of the reference decode."""

    arc_id: int
    from_idx: int
    to_idx: int
    cost: float
    ac: float
    is_eps: bool


@dataclass
class RefFrame:
    states: np.ndarray
    costs: np.ndarray
    pred_arc: np.ndarray
    pred_idx: np.ndarray

    @property
    def n(self) -> int:
        return len(self.states)


@dataclass
class RefResult:
    words: list[int]
    alignment: list[tuple[int, int]]
    total_cost: float
    partial: bool
    frames: list[RefFrame]
    blocks: list[list[RefArc]]
    cutoffs: list[float]
    packs: list[tuple[np.ndarray, np.ndarray]]


def _key(cost: float, arc_id: int) -> tuple:
    return (np.float32(cost), arc_id)


def serial_decode(wfst: Wfst, matrix: CostMatrix, beam: float,
                  acoustic_scale: float = 1.0) -> RefResult:
    """Reference beam decode; mirrors the engine's observable rules."""
    if not (math.isfinite(beam) and beam > 0):
        raise UsageError("beam must be a positive finite number")
    if wfst.max_ilabel > matrix.num_labels:
        raise UsageError(
            f"graph uses input label {wfst.max_ilabel} but the cost matrix "
            f"has only {matrix.num_labels} columns"
        )
    off = wfst.arc_offsets
    dst = wfst.arc_dst
    ilab = wfst.arc_ilabel
    olab = wfst.arc_olabel
    wgt = wfst.arc_weight

    frames: list[RefFrame] = []
    blocks: list[list[RefArc]] = []
    cutoffs: list[float] = []
    packs: list[tuple[np.ndarray, np.ndarray]] = []

    # winners: state -> [key, cost, kind, pred, arc]; kind in
    # {"init", "emit", "eps"}; pred is the previous frame's token index for
    # emit, the source state for eps.
    start = wfst.start_state
    winners: dict[int, list] = {
        start: [_key(0.0, 0), 0.0, "init", -1, -1]
    }
    cutoff = 0.0 + float(beam)
    staged_eps = _eps_rounds(wfst, winners, [(start, 0.0)], cutoff)
    frames.append(_aggregate(winners, cutoff, prev_n=0))
    blocks.append(_resolve(frames[-1], [], staged_eps, cutoff, dst))
    cutoffs.append(cutoff)
    packs.append(_pack_map(frames[-1], winners))

    for t in range(1, matrix.num_frames + 1):
        prev = frames[-1]
        acrow = matrix.costs[t - 1] * float(acoustic_scale)
        winners = {}
        staged_emit: list[tuple[int, int, float, float]] = []
        best = math.inf
        for i in range(prev.n):
            s = int(prev.states[i])
            c = float(prev.costs[i])
            for a in range(int(off[s]), int(off[s + 1])):
                il = int(ilab[a])
                if il == 0:
                    continue
                ac = float(acrow[il - 1])
                cand = (c + float(wgt[a])) + ac
                if cand < best:
                    best = cand
                staged_emit.append((a, i, cand, ac))
                key = _key(cand, a)
                cur = winners.get(int(dst[a]))
                if cur is None or key < cur[0]:
                    winners[int(dst[a])] = [key, cand, "emit", i, a]
        if not math.isfinite(best):
            raise DecodeFailure(
                f"beam search died at frame {t}: no emitting candidates"
            )
        cutoff = best + float(beam)
        seeds = sorted(
            (s, w[1]) for s, w in winners.items() if w[1] <= cutoff
        )
        if not seeds:
            raise DecodeFailure(f"no tokens survived the beam at frame {t}")
        staged_eps = _eps_rounds(wfst, winners, seeds, cutoff)
        frames.append(_aggregate(winners, cutoff, prev_n=prev.n))
        blocks.append(
            _resolve(frames[-1], staged_emit, staged_eps, cutoff, dst)
        )
        cutoffs.append(cutoff)
        packs.append(_pack_map(frames[-1], winners))

    last = frames[-1]
    finals = wfst.final_cost_array[last.states]
    totals = last.costs + finals
    partial = not bool(np.any(np.isfinite(totals)))
    if partial:
        best_idx = int(np.argmin(last.costs))
        total_cost = float(last.costs[best_idx])
    else:
        best_idx = int(np.argmin(totals))
        total_cost = float(totals[best_idx])

    words, alignment = _walk_back(wfst, frames, best_idx)
    return RefResult(words, alignment, total_cost, partial, frames, blocks,
                     cutoffs, packs)


def _eps_rounds(wfst: Wfst, winners: dict, seeds: list[tuple[int, float]],
                cutoff: float) -> list[tuple[int, int, float]]:
    """Jacobi epsilon relaxation to a fixpoint under a fixed cutoff."""
    off = wfst.arc_offsets
    dst = wfst.arc_dst
    ilab = wfst.arc_ilabel
    wgt = wfst.arc_weight
    staged: list[tuple[int, int, float]] = []
    frontier = list(seeds)
    rounds = 0
    while frontier:
        rounds += 1
        if rounds > wfst.num_states + 1:
            raise InternalInvariantError(
                "epsilon relaxation failed to settle within the state count"
            )
        improved: set[int] = set()
        for u, cu in frontier:
            for a in range(int(off[u]), int(off[u + 1])):
                if int(ilab[a]) != 0:
                    continue
                cand = cu + float(wgt[a])
                if cand > cutoff:
                    continue
                staged.append((a, u, cand))
                v = int(dst[a])
                key = _key(cand, a)
                cur = winners.get(v)
                if cur is None or key < cur[0]:
                    winners[v] = [key, cand, "eps", u, a]
                    improved.add(v)
        frontier = sorted((v, winners[v][1]) for v in improved)
    return staged


def _aggregate(winners: dict, cutoff: float, prev_n: int) -> RefFrame:
    kept = sorted(
        (s, w) for s, w in winners.items()
        if w[1] <= cutoff or w[2] == "init"
    )
    states = np.array([s for s, _ in kept], dtype=np.int32)
    costs = np.array([w[1] for _, w in kept], dtype=np.float64)
    pred_arc = np.full(len(kept), -1, dtype=np.int64)
    pred_idx = np.full(len(kept), -1, dtype=np.int64)
    pos = {s: i for i, (s, _) in enumerate(kept)}
    for i, (s, w) in enumerate(kept):
        if w[2] == "init":
            continue
        pred_arc[i] = w[4]
        if w[2] == "emit":
            pred_idx[i] = w[3]
        else:
            if w[3] not in pos:
                raise InternalInvariantError(
                    "epsilon winner's source state kept no token"
                )
            pred_idx[i] = pos[w[3]]
    return RefFrame(states, costs, pred_arc, pred_idx)


def _resolve(frame: RefFrame, staged_emit, staged_eps, cutoff: float,
             dst: np.ndarray) -> list[RefArc]:
    pos = {int(s): i for i, s in enumerate(frame.states)}
    out: list[RefArc] = []
    for a, i, cand, ac in staged_emit:
        if cand > cutoff:
            continue
        p = pos.get(int(dst[a]))
        if p is None:
            continue
        out.append(RefArc(a, i, p, cand, ac, False))
    cheapest: dict[int, tuple[float, int]] = {}
    for a, u, cand in staged_eps:
        p = pos.get(int(dst[a]))
        if p is None:
            continue
        cur = cheapest.get(a)
        if cur is None or cand < cur[0]:
            cheapest[a] = (cand, u)
    for a in sorted(cheapest):
        cand, u = cheapest[a]
        if u not in pos:
            raise InternalInvariantError(
                "epsilon lattice arc references a source state that kept "
                "no token"
            )
        out.append(RefArc(a, pos[u], pos[int(dst[a])], cand, 0.0, True))
    return out


def _pack_map(frame: RefFrame, winners: dict):
    words = np.empty(frame.n, dtype=np.uint64)
    for i, s in enumerate(frame.states):
        w = winners[int(s)]
        arc = 0 if w[2] == "init" else w[4]
        words[i] = packing.pack_word(w[1], arc)
    return frame.states.copy(), words


def _walk_back(wfst: Wfst, frames: list[RefFrame], last_idx: int):
    words: list[int] = []
    alignment: list[tuple[int, int]] = []
    f = len(frames) - 1
    i = last_idx
    while True:
        fr = frames[f]
        a = int(fr.pred_arc[i])
        if a < 0:
            if f != 0:
                raise InternalInvariantError(
                    f"initial token found at frame {f}"
                )
            break
        ol = int(wfst.arc_olabel[a])
        if ol > 0:
            words.append(ol)
        if int(wfst.arc_ilabel[a]) > 0:
            alignment.append((int(wfst.arc_ilabel[a]), f - 1))
            i = int(fr.pred_idx[i])
            f -= 1
        else:
            i = int(fr.pred_idx[i])
    words.reverse()
    alignment.reverse()
    return words, alignment


# ---------------------------------------------------------------------------
# Independent extra-cost computation
# ---------------------------------------------------------------------------

def lattice_oracle_inputs(lat):
    """Extract (frame_costs, blocks, terminal_costs, live_extras) from a
    work lattice, in the shape brute_force_extra_costs expects.

    Only live arcs are listed: pruned arcs no longer participate in the
    engine's relaxation, so the oracle must complete paths over the same
    arc set.  live_extras[f] holds the engine's stored extra cost per
    listed arc for direct comparison.
    """
    from .lattice import STATUS_LIVE

    frame_costs = [fr.costs for fr in lat.frames]
    blocks = []
    live_extras = []
    for b in range(len(lat.frames)):
        blk = lat.block_arrays(b)
        live = np.flatnonzero(blk["status"] == STATUS_LIVE)
        blocks.append([
            (bool(blk["ilabel"][i] == 0), int(blk["from_idx"][i]),
             int(blk["to_idx"][i]), float(blk["graph_cost"][i]),
             float(blk["acoustic_cost"][i]))
            for i in live
        ])
        live_extras.append(blk["extra"][live])
    if lat.partial:
        terminal = -frame_costs[-1]
    else:
        terminal = np.asarray(lat.final_token_costs, dtype=np.float64)
    return frame_costs, blocks, terminal, live_extras


def brute_force_extra_costs(frame_costs: list[np.ndarray],
                            blocks: list[list[tuple]],
                            terminal_costs: np.ndarray):
    """Extra costs from backward best-completion costs.

    frame_costs[f] holds frame f's forward (token) costs; blocks[f] holds
    tuples (is_eps, from_idx, to_idx, graph_cost, acoustic_cost) for the
    arcs recorded at frame f (emitting arcs land in frame f from f-1,
    epsilon arcs stay within frame f).  terminal_costs gives the path
    terminus cost per last-frame node: final costs for a finished decode,
    -forward for a mid-decode or partial terminus (which zeroes the
    frontier's node extras).

    Returns (node_extras per frame, arc_extras per block, best_total).
    """
    t = len(frame_costs) - 1
    if len(blocks) != t + 1:
        raise UsageError("blocks and frame_costs disagree on frame count")
    if not np.any(np.isfinite(np.asarray(terminal_costs, dtype=np.float64)
                              + frame_costs[t])):
        raise UsageError("terminal costs leave no finite-cost terminus")
    bwd = [np.full(len(c), np.inf) for c in frame_costs]
    bwd[t] = np.asarray(terminal_costs, dtype=np.float64).copy()
    for f in range(t, -1, -1):
        if f < t:
            for is_eps, u, v, g, ac in blocks[f + 1]:
                if is_eps:
                    continue
                cand = g + ac + bwd[f + 1][v]
                if cand < bwd[f][u]:
                    bwd[f][u] = cand
        eps = [rec for rec in blocks[f] if rec[0]]
        for _ in range(len(frame_costs[f]) + 1):
            moved = False
            for is_eps, u, v, g, ac in eps:
                cand = g + bwd[f][v]
                if cand < bwd[f][u] - 1e-15:
                    bwd[f][u] = cand
                    moved = True
            if not moved:
                break
        else:
            raise InternalInvariantError(
                f"epsilon completion costs did not settle within frame {f}"
            )

    start_candidates = frame_costs[0] + bwd[0]
    best_total = float(np.min(start_candidates))
    if not math.isfinite(best_total):
        raise UsageError("no complete path through the lattice")

    node_extras = [
        np.maximum(frame_costs[f] + bwd[f] - best_total, 0.0)
        for f in range(t + 1)
    ]
    arc_extras = []
    for f in range(t + 1):
        ex = np.empty(len(blocks[f]))
        for j, (is_eps, u, v, g, ac) in enumerate(blocks[f]):
            if is_eps:
                ex[j] = frame_costs[f][u] + g + bwd[f][v] - best_total
            else:
                ex[j] = frame_costs[f - 1][u] + g + ac + bwd[f][v] - best_total
        arc_extras.append(np.maximum(ex, 0.0))
    return node_extras, arc_extras, best_total
