"""Hot expansion passes, in two interchangeable engines.

The accelerated engine compiles the per-arc token-passing loop with numba
(nogil, so a pool of real threads runs it in parallel) and synchronizes
through the atomic primitives in ``_atomics``.  The fallback engine runs
the same passes as vectorised numpy over the whole frame at once.

Both engines leave identical state behind: recombination is an atomic min
over a fixed candidate multiset, which no ordering can change, and the
(float32 cost, arc id) packing breaks ties totally.  The engines may stage
different supersets of lattice passes (the accelerated one prunes against
a monotonically tightening running cutoff, so a stale cutoff can let a
doomed candidate through), but frame aggregation re-filters everything at
the exact final cutoff, restoring equality.

Cost arithmetic is ordered identically everywhere — (token + graph) +
acoustic, in float64 — so costs agree bit-for-bit across engines, worker
counts, and schedulers.
"""

from __future__ import annotations

import numpy as np

from . import packing
from ._atomics import HAVE_NUMBA, numba_active, use_numba  # noqa: F401 (re-export)

_MASK32 = np.uint64(0xFFFFFFFF)


# ---------------------------------------------------------------------------
# Accelerated engine
# ---------------------------------------------------------------------------

if HAVE_NUMBA:
    from numba import njit

    from ._atomics import (
        _atomic_add_i64,
        _atomic_umin_u64,
        _bitcast_f32_u32,
        _bitcast_f64_u64,
        _bitcast_u64_f64,
    )

    SIGN32 = np.uint32(0x80000000)
    FULL32 = np.uint32(0xFFFFFFFF)
    SIGN64 = np.uint64(0x8000000000000000)
    FULL64 = np.uint64(0xFFFFFFFFFFFFFFFF)

    @njit(cache=True, nogil=True, inline="always")
    def _enc32(cost):
        u = _bitcast_f32_u32(np.float32(cost))
        if u & SIGN32:
            return u ^ FULL32
        return u | SIGN32

    @njit(cache=True, nogil=True, inline="always")
    def _enc64(cost):
        u = _bitcast_f64_u64(np.float64(cost))
        if u & SIGN64:
            return u ^ FULL64
        return u | SIGN64

    @njit(cache=True, nogil=True, inline="always")
    def _pack(cost, arc_id):
        return (np.uint64(_enc32(cost)) << np.uint64(32)) | np.uint64(arc_id)

    @njit(cache=True, nogil=True)
    def _seed_cell(cell):
        cell[0] = _enc64(np.inf)

    @njit(cache=True, nogil=True, inline="always")
    def _cell_value(cell):
        u = cell[0]
        if u & SIGN64:
            u = u ^ SIGN64
        else:
            u = u ^ FULL64
        return _bitcast_u64_f64(u)

    @njit(cache=True, nogil=True, inline="always")
    def _emit_arc(a, i, tok_cost, arc_dst, arc_il, arc_w, acrow, beam,
                  state_pack, buf_cost, buf_pred, buf_frame, frame_id,
                  best_cell, st_counts, st_arc, st_pred, st_cost, st_ac,
                  shard_cap, shard_id, err_flag, local_best, bound):
        il = arc_il[a]
        if il == 0:
            return local_best, bound, True
        cand = tok_cost + arc_w[a] + acrow[il - 1]
        if cand < local_best:
            local_best = cand
            _atomic_umin_u64(best_cell, 0, _enc64(cand))
            nb = cand + beam
            if nb < bound:
                bound = nb
        # Recombine unconditionally so the winning pack per state is the min
        # over the frame's full candidate multiset, independent of how stale
        # each worker's running bound happens to be.
        word = _pack(cand, a)
        old = _atomic_umin_u64(state_pack, arc_dst[a], word)
        if old > word:
            buf_cost[a] = cand
            buf_pred[a] = i
            buf_frame[a] = frame_id
        if cand > bound:
            # Refresh from the shared frame best before giving up; a stale
            # bound is only ever looser than the final cutoff, so anything
            # skipped here was doomed anyway.
            bound = _cell_value(best_cell) + beam
            if cand > bound:
                return local_best, bound, True
        slot = _atomic_add_i64(st_counts, shard_id, 1)
        if slot >= shard_cap:
            err_flag[0] = 1
            return local_best, bound, False
        g = shard_id * shard_cap + slot
        st_arc[g] = a
        st_pred[g] = i
        st_cost[g] = cand
        st_ac[g] = acrow[il - 1]
        return local_best, bound, True

    @njit(cache=True, nogil=True)
    def emit_static_kernel(g0, g1, prefix, tok_states, tok_costs, arc_off,
                           arc_dst, arc_il, arc_w, acrow, beam, state_pack,
                           buf_cost, buf_pred, buf_frame, frame_id, best_cell,
                           st_counts, st_arc, st_pred, st_cost, st_ac,
                           shard_cap, shard_id, err_flag):
        if g0 >= g1:
            return
        # Owner token of the first global arc index, then walk forward.
        lo, hi = 0, len(prefix) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if prefix[mid] <= g0:
                lo = mid
            else:
                hi = mid - 1
        i = lo
        local_best = np.inf
        bound = np.inf
        for g in range(g0, g1):
            while g >= prefix[i + 1]:
                i += 1
            s = tok_states[i]
            a = arc_off[s] + (g - prefix[i])
            local_best, bound, ok = _emit_arc(
                a, i, tok_costs[i], arc_dst, arc_il, arc_w, acrow, beam,
                state_pack, buf_cost, buf_pred, buf_frame, frame_id,
                best_cell, st_counts, st_arc, st_pred, st_cost, st_ac,
                shard_cap, shard_id, err_flag, local_best, bound)
            if not ok:
                return

    @njit(cache=True, nogil=True)
    def emit_dynamic_kernel(claim_cell, n_tokens, group_n, tok_states,
                            tok_costs, arc_off, arc_dst, arc_il, arc_w, acrow,
                            beam, state_pack, buf_cost, buf_pred, buf_frame,
                            frame_id, best_cell, st_counts, st_arc, st_pred,
                            st_cost, st_ac, shard_cap, shard_id, err_flag):
        local_best = np.inf
        bound = np.inf
        while True:
            i = _atomic_add_i64(claim_cell, 0, 1)
            if i >= n_tokens:
                return
            s = tok_states[i]
            lo = arc_off[s]
            hi = arc_off[s + 1]
            # One claim covers the whole token; its arcs go in chunks of
            # the group size.
            j0 = lo
            while j0 < hi:
                j1 = min(j0 + group_n, hi)
                for a in range(j0, j1):
                    local_best, bound, ok = _emit_arc(
                        a, i, tok_costs[i], arc_dst, arc_il, arc_w, acrow,
                        beam, state_pack, buf_cost, buf_pred, buf_frame,
                        frame_id, best_cell, st_counts, st_arc, st_pred,
                        st_cost, st_ac, shard_cap, shard_id, err_flag,
                        local_best, bound)
                    if not ok:
                        return
                j0 = j1

    @njit(cache=True, nogil=True)
    def eps_round_kernel(front_states, front_costs, n_front, cutoff, arc_off,
                         arc_dst, arc_il, arc_w, state_pack, buf_cost,
                         buf_pred, buf_frame, frame_id, st_counts, st_arc,
                         st_pred, st_cost, st_ac, shard_cap, seen, seen_tag,
                         improved_out, err_flag):
        c = 0
        for fi in range(n_front):
            u = front_states[fi]
            cu = front_costs[fi]
            for a in range(arc_off[u], arc_off[u + 1]):
                if arc_il[a] != 0:
                    continue
                cand = cu + arc_w[a]
                if cand > cutoff:
                    continue
                slot = st_counts[0]
                if slot >= shard_cap:
                    err_flag[0] = 1
                    return c
                st_counts[0] = slot + 1
                st_arc[slot] = a
                st_pred[slot] = u
                st_cost[slot] = cand
                st_ac[slot] = 0.0
                v = arc_dst[a]
                word = _pack(cand, a)
                if word < state_pack[v]:
                    state_pack[v] = word
                    buf_cost[a] = cand
                    buf_pred[a] = u
                    buf_frame[a] = frame_id
                    if seen[v] != seen_tag:
                        seen[v] = seen_tag
                        improved_out[c] = v
                        c += 1
        return c

    @njit(cache=True, nogil=True)
    def recombine_kernel(state_pack, dst, cost, arc_id, buf_cost, buf_pred,
                         buf_frame, frame_id, cur_tok):
        word = _pack(cost, arc_id)
        old = _atomic_umin_u64(state_pack, dst, word)
        if old > word:
            buf_cost[arc_id] = cost
            buf_pred[arc_id] = cur_tok
            buf_frame[arc_id] = frame_id

    _warmed = False

    def warm_kernels() -> None:
        """Compile every kernel once, before worker threads need them."""
        global _warmed
        if _warmed:
            return
        prefix = np.array([0, 1], dtype=np.int64)
        tok_states = np.zeros(1, dtype=np.int32)
        tok_costs = np.zeros(1, dtype=np.float64)
        arc_off = np.array([0, 1, 1], dtype=np.int64)
        arc_dst = np.array([1], dtype=np.int32)
        arc_il = np.array([1], dtype=np.int32)
        arc_w = np.zeros(1, dtype=np.float64)
        acrow = np.zeros(1, dtype=np.float64)
        # Graph arrays arrive frozen from the loader; match that here so
        # the cached compilations cover the production signatures.
        for garr in (arc_off, arc_dst, arc_il, arc_w):
            garr.setflags(write=False)
        state_pack = np.full(2, packing.SENTINEL, dtype=np.uint64)
        buf_cost = np.zeros(1, dtype=np.float64)
        buf_pred = np.zeros(1, dtype=np.int64)
        buf_frame = np.full(1, -1, dtype=np.int64)
        cell = np.zeros(1, dtype=np.uint64)
        counts = np.zeros(1, dtype=np.int64)
        st_arc = np.zeros(4, dtype=np.int64)
        st_pred = np.zeros(4, dtype=np.int64)
        st_cost = np.zeros(4, dtype=np.float64)
        st_ac = np.zeros(4, dtype=np.float64)
        err = np.zeros(1, dtype=np.int64)
        seen = np.zeros(2, dtype=np.int64)
        improved = np.zeros(2, dtype=np.int32)
        _seed_cell(cell)
        emit_static_kernel(0, 1, prefix, tok_states, tok_costs, arc_off,
                           arc_dst, arc_il, arc_w, acrow, 10.0, state_pack,
                           buf_cost, buf_pred, buf_frame, 0, cell, counts,
                           st_arc, st_pred, st_cost, st_ac, 4, 0, err)
        claim = np.zeros(1, dtype=np.int64)
        emit_dynamic_kernel(claim, 1, 32, tok_states, tok_costs, arc_off,
                            arc_dst, arc_il, arc_w, acrow, 10.0, state_pack,
                            buf_cost, buf_pred, buf_frame, 0, cell, counts,
                            st_arc, st_pred, st_cost, st_ac, 4, 0, err)
        eps_round_kernel(tok_states, tok_costs, 1, 10.0, arc_off, arc_dst,
                         arc_il, arc_w, state_pack, buf_cost, buf_pred,
                         buf_frame, 0, counts, st_arc, st_pred, st_cost,
                         st_ac, 4, seen, 1, improved, err)
        recombine_kernel(state_pack, 1, 0.5, 0, buf_cost, buf_pred,
                         buf_frame, 0, 0)
        _cell_value(cell)
        _warmed = True

else:

    def warm_kernels() -> None:
        pass


# ---------------------------------------------------------------------------
# Fallback engine: whole-frame vectorised passes
# ---------------------------------------------------------------------------

def _gather_out_arcs(states, arc_off):
    """Global arc indices of every out-arc of `states`, plus the owning
    position in `states` for each."""
    starts = arc_off[states]
    degs = arc_off[states + 1] - starts
    total = int(degs.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    prefix = np.zeros(len(states) + 1, dtype=np.int64)
    np.cumsum(degs, out=prefix[1:])
    owner = np.repeat(np.arange(len(states), dtype=np.int64), degs)
    arcs = np.repeat(starts, degs) + np.arange(total, dtype=np.int64) \
        - np.repeat(prefix[:-1], degs)
    return arcs, owner


def emit_pass_numpy(tok_states, tok_costs, arc_off, arc_dst, arc_il, arc_w,
                    acrow, beam, state_pack, buf_cost, buf_pred, buf_frame,
                    frame_id, store) -> float:
    """One whole emitting pass; returns the frame's best candidate cost."""
    arcs, owner = _gather_out_arcs(tok_states.astype(np.int64), arc_off)
    il = arc_il[arcs]
    em = il > 0
    arcs, owner, il = arcs[em], owner[em], il[em]
    if len(arcs) == 0:
        return np.inf
    ac = acrow[il - 1]
    cand = (tok_costs[owner] + arc_w[arcs]) + ac
    best = float(cand.min())
    # Recombine the full candidate multiset (matching the accelerated
    # engine); the beam only limits what gets staged for the lattice.
    np.minimum.at(state_pack, arc_dst[arcs], packing.pack_array(cand, arcs))
    buf_cost[arcs] = cand
    buf_pred[arcs] = owner
    buf_frame[arcs] = frame_id
    keep = cand <= best + beam
    store.bulk_stage(0, arcs[keep], owner[keep], cand[keep], ac[keep])
    return best


def eps_round_numpy(front_states, front_costs, cutoff, arc_off, arc_dst,
                    arc_il, arc_w, state_pack, buf_cost, buf_pred, buf_frame,
                    frame_id, store) -> np.ndarray:
    """One epsilon relaxation round; returns the states whose winning pack
    improved (sorted)."""
    arcs, owner = _gather_out_arcs(front_states.astype(np.int64), arc_off)
    sel = arc_il[arcs] == 0
    arcs, owner = arcs[sel], owner[sel]
    if len(arcs) == 0:
        return np.empty(0, dtype=np.int64)
    cand = front_costs[owner] + arc_w[arcs]
    keep = cand <= cutoff
    arcs, owner, cand = arcs[keep], owner[keep], cand[keep]
    if len(arcs) == 0:
        return np.empty(0, dtype=np.int64)
    src_states = front_states[owner].astype(np.int64)
    store.bulk_stage(0, arcs, src_states, cand, np.zeros(len(arcs)))
    dst = arc_dst[arcs].astype(np.int64)
    uniq = np.unique(dst)
    before = state_pack[uniq].copy()
    np.minimum.at(state_pack, dst, packing.pack_array(cand, arcs))
    improved = uniq[state_pack[uniq] != before]
    buf_cost[arcs] = cand
    buf_pred[arcs] = src_states
    buf_frame[arcs] = frame_id
    return improved
