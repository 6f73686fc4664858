"""Frame-synchronous beam decoding with exact lattice generation.

One decode is a loop over acoustic frames.  Each frame expands every
surviving token along its emitting arcs (in parallel under the
accelerated engine), recombines candidates per destination state with an
atomic packed min, relaxes epsilon arcs to a fixpoint under the frame's
fixed cutoff, and aggregates the winners into the frame's token list,
which doubles as a lattice node layer.  Every in-beam pass is staged in
the sharded arc store; a background thread prunes completed lattice
frames by extra cost while later frames are still being decoded.

Determinism: the winning (cost, arc) pack per state is the minimum over
the frame's full candidate multiset, which no thread interleaving,
scheduler, or worker count can change, so decodes are bitwise
reproducible across all of them.
"""

from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass, replace

import numpy as np

from . import kernels, packing
from ._atomics import atomic_umin_u64, numba_active
from .acoustics import CostMatrix
from .errors import (
    CapacityError,
    DecodeFailure,
    InternalInvariantError,
    UsageError,
)
from .lattice import (
    FinalLattice,
    FrameTokens,
    Lattice,
    ShardedArcStore,
    finalize_lattice,
    prune_lattice,
)
from .scheduler import static_partition
from .wfst import Wfst

_MASK32 = np.uint64(0xFFFFFFFF)

_SCHEDULERS = ("static", "dynamic")


@dataclass
class DecodeConfig:
    """Knobs for one decode.

    The fallback (pure numpy) engine processes each frame as single
    vectorised passes; it honors every knob except num_workers, group_size
    and scheduler, which only shape how the accelerated engine splits work
    (never what it computes).
    """

    beam: float = 14.0
    lattice_beam: float = 8.0
    acoustic_scale: float = 1.0
    num_workers: int = 1
    group_size: int = 32
    num_shards: int = 32
    prune_interval: int = 25
    max_tokens_per_frame: int = 1_000_000
    max_lattice_arcs: int = 1_000_000
    scheduler: str = "dynamic"

    def validate(self) -> None:
        if not (math.isfinite(self.beam) and self.beam > 0):
            raise UsageError("beam must be a positive finite number")
        if not (math.isfinite(self.lattice_beam) and self.lattice_beam >= 0):
            raise UsageError("lattice_beam must be >= 0")
        if not (math.isfinite(self.acoustic_scale) and self.acoustic_scale > 0):
            raise UsageError("acoustic_scale must be > 0")
        for name in ("num_workers", "group_size", "num_shards",
                     "prune_interval", "max_tokens_per_frame",
                     "max_lattice_arcs"):
            if int(getattr(self, name)) < 1:
                raise UsageError(f"{name} must be >= 1")
        if self.scheduler not in _SCHEDULERS:
            raise UsageError(
                f"unknown scheduler {self.scheduler!r}; "
                f"choose one of {', '.join(_SCHEDULERS)}"
            )


@dataclass
class DecodeResult:
    """What one utterance decodes to."""

    words: list[int]
    alignment: list[tuple[int, int]]
    total_cost: float
    partial: bool
    lattice: FinalLattice | None
    work_lattice: Lattice | None = None
    frame_packs: list[tuple[np.ndarray, np.ndarray]] | None = None
    timings: dict[str, float] | None = None


class _Workspace:
    """Per-decode shared arrays the kernels synchronize through."""

    def __init__(self, wfst: Wfst):
        s, a = wfst.num_states, wfst.num_arcs
        self.state_pack = np.full(s, packing.SENTINEL, dtype=np.uint64)
        self.buf_cost = np.full(a, np.inf, dtype=np.float64)
        self.buf_pred = np.full(a, -1, dtype=np.int64)
        self.buf_frame = np.full(a, -1, dtype=np.int64)
        self.best_cell = np.full(
            1, packing.encode_cost64(math.inf), dtype=np.uint64)
        self.claim_cell = np.zeros(1, dtype=np.int64)
        self.err_flag = np.zeros(1, dtype=np.int64)
        self.seen = np.full(s, -1, dtype=np.int64)
        self.round_tag = 0
        self.improved = np.empty(s, dtype=np.int32)

    def reset_frame(self) -> None:
        self.state_pack[:] = packing.SENTINEL
        self.best_cell[0] = np.uint64(packing.encode_cost64(math.inf))
        self.err_flag[0] = 0


class _Pool:
    """Persistent worker threads, reused across frames of one decode."""

    def __init__(self, workers: int):
        self.workers = workers
        self._task = None
        self._go = [threading.Event() for _ in range(workers)]
        self._done = [threading.Event() for _ in range(workers)]
        self._errors: list[BaseException | None] = [None] * workers
        self._stop = False
        self._threads = [
            threading.Thread(target=self._loop, args=(w,), daemon=True)
            for w in range(workers)
        ]
        for t in self._threads:
            t.start()

    def _loop(self, w: int) -> None:
        while True:
            self._go[w].wait()
            self._go[w].clear()
            if self._stop:
                return
            try:
                self._task(w)
            except BaseException as exc:
                self._errors[w] = exc
            self._done[w].set()

    def run(self, task) -> None:
        self._task = task
        for w in range(self.workers):
            self._errors[w] = None
            self._go[w].set()
        for ev in self._done:
            ev.wait()
            ev.clear()
        for exc in self._errors:
            if exc is not None:
                raise exc

    def close(self) -> None:
        self._stop = True
        for ev in self._go:
            ev.set()
        for t in self._threads:
            t.join()


# ---------------------------------------------------------------------------
# Single-op surfaces
# ---------------------------------------------------------------------------

def compute_cutoff(best_cost: float, beam: float) -> float:
    """The frame's admission bound: best candidate cost plus the beam."""
    if not (math.isfinite(beam) and beam > 0):
        raise UsageError("beam must be a positive finite number")
    return float(best_cost) + float(beam)


def recombine(state_pack: np.ndarray, buf_cost: np.ndarray,
              buf_pred: np.ndarray, buf_frame: np.ndarray, dst: int,
              cost: float, arc_id: int, pred: int, frame: int = 0) -> bool:
    """Offer one candidate to a state; keep it iff its pack wins.

    Atomic: concurrent offers to the same state leave the minimum pack and
    exactly that winner's per-arc buffer entry.  Returns True when the
    offer improved the state.
    """
    word = packing.pack(cost, arc_id)
    old = atomic_umin_u64(state_pack, int(dst), word)
    if old > word:
        buf_cost[arc_id] = cost
        buf_pred[arc_id] = pred
        buf_frame[arc_id] = frame
        return True
    return False


# ---------------------------------------------------------------------------
# Engine passes (host side)
# ---------------------------------------------------------------------------

def _emit(ws: _Workspace, wfst: Wfst, toks: FrameTokens, acrow: np.ndarray,
          beam: float, store: ShardedArcStore, cfg: DecodeConfig,
          pool: _Pool | None, frame_id: int, engine_numba: bool,
          tm: dict | None = None) -> float:
    """Run the emitting pass for one frame; returns the best candidate."""
    if not engine_numba:
        return kernels.emit_pass_numpy(
            toks.states, toks.costs, wfst.arc_offsets, wfst.arc_dst,
            wfst.arc_ilabel, wfst.arc_weight, acrow, beam, ws.state_pack,
            ws.buf_cost, ws.buf_pred, ws.buf_frame, frame_id, store)

    if cfg.scheduler == "static":
        t0 = time.perf_counter()
        degs = (wfst.arc_offsets[toks.states + 1]
                - wfst.arc_offsets[toks.states])
        part = static_partition(degs, cfg.num_workers)
        if tm is not None:
            tm["partition"] = tm.get("partition", 0.0) + (
                time.perf_counter() - t0)

        def task(w: int) -> None:
            g0, g1 = part.ranges[w]
            kernels.emit_static_kernel(
                g0, g1, part.prefix, toks.states, toks.costs,
                wfst.arc_offsets, wfst.arc_dst, wfst.arc_ilabel,
                wfst.arc_weight, acrow, beam, ws.state_pack, ws.buf_cost,
                ws.buf_pred, ws.buf_frame, frame_id, ws.best_cell,
                store.counts, store.arc, store.pred, store.cost, store.ac,
                store.shard_capacity, w % store.num_shards, ws.err_flag)
    else:
        ws.claim_cell[0] = 0

        def task(w: int) -> None:
            kernels.emit_dynamic_kernel(
                ws.claim_cell, toks.n, cfg.group_size, toks.states,
                toks.costs, wfst.arc_offsets, wfst.arc_dst, wfst.arc_ilabel,
                wfst.arc_weight, acrow, beam, ws.state_pack, ws.buf_cost,
                ws.buf_pred, ws.buf_frame, frame_id, ws.best_cell,
                store.counts, store.arc, store.pred, store.cost, store.ac,
                store.shard_capacity, w % store.num_shards, ws.err_flag)

    if pool is not None:
        pool.run(task)
    else:
        for w in range(cfg.num_workers):
            task(w)
    if ws.err_flag[0]:
        raise CapacityError(
            "--max-lattice-arcs",
            f"lattice shard overflowed its {store.shard_capacity}-slot "
            "capacity; raise --max-lattice-arcs",
        )
    return packing.decode_cost64(int(ws.best_cell[0]))


def _eps_fixpoint(ws: _Workspace, wfst: Wfst, store: ShardedArcStore,
                  cutoff: float, frame_id: int, seed_states: np.ndarray,
                  seed_costs: np.ndarray, engine_numba: bool) -> None:
    """Relax epsilon arcs to a fixpoint under the frame's fixed cutoff.

    Rounds are Jacobi-style: every round relaxes from a snapshot of its
    frontier's costs, and the states whose packs improved form the next
    frontier.  Non-negative weights bound improving chains by the state
    count.
    """
    front_s = np.ascontiguousarray(seed_states, dtype=np.int32)
    front_c = np.ascontiguousarray(seed_costs, dtype=np.float64)
    rounds = 0
    while len(front_s):
        rounds += 1
        if rounds > wfst.num_states + 1:
            raise InternalInvariantError(
                "epsilon relaxation failed to settle within the state count"
            )
        if engine_numba:
            ws.round_tag += 1
            k = kernels.eps_round_kernel(
                front_s, front_c, len(front_s), cutoff, wfst.arc_offsets,
                wfst.arc_dst, wfst.arc_ilabel, wfst.arc_weight,
                ws.state_pack, ws.buf_cost, ws.buf_pred, ws.buf_frame,
                frame_id, store.counts, store.arc, store.pred, store.cost,
                store.ac, store.shard_capacity, ws.seen, ws.round_tag,
                ws.improved, ws.err_flag)
            if ws.err_flag[0]:
                raise CapacityError(
                    "--max-lattice-arcs",
                    f"lattice shard overflowed its {store.shard_capacity}-"
                    "slot capacity; raise --max-lattice-arcs",
                )
            imp = np.sort(ws.improved[:k].astype(np.int64))
        else:
            imp = kernels.eps_round_numpy(
                front_s, front_c, cutoff, wfst.arc_offsets, wfst.arc_dst,
                wfst.arc_ilabel, wfst.arc_weight, ws.state_pack, ws.buf_cost,
                ws.buf_pred, ws.buf_frame, frame_id, store)
        if len(imp) == 0:
            return
        arcs = (ws.state_pack[imp] & _MASK32).astype(np.int64)
        front_s = imp.astype(np.int32)
        front_c = ws.buf_cost[arcs]


def _winners(ws: _Workspace, cutoff: float, frame_id: int,
             skip_state: int | None = None):
    """States whose winning candidate beat the cutoff, with costs/arcs."""
    active = np.flatnonzero(ws.state_pack != packing.SENTINEL)
    if skip_state is not None:
        active = active[active != skip_state]
    arcs = (ws.state_pack[active] & _MASK32).astype(np.int64)
    if np.any(ws.buf_frame[arcs] != frame_id):
        raise InternalInvariantError(
            "winning arc lacks a current per-arc buffer entry"
        )
    costs = ws.buf_cost[arcs]
    keep = costs <= cutoff
    return active[keep], costs[keep], arcs[keep]


def _aggregate(ws: _Workspace, wfst: Wfst, cutoff: float, frame_id: int,
               initial_state: int | None, max_tokens: int) -> FrameTokens:
    """Collapse the frame's winners into its sorted token list."""
    states, costs, arcs = _winners(ws, cutoff, frame_id,
                                   skip_state=initial_state)
    preds = ws.buf_pred[arcs]
    if initial_state is not None:
        pos = int(np.searchsorted(states, initial_state))
        states = np.insert(states, pos, initial_state)
        costs = np.insert(costs, pos, 0.0)
        arcs = np.insert(arcs, pos, -1)
        preds = np.insert(preds, pos, -1)
    if len(states) == 0:
        raise DecodeFailure(
            f"no tokens survived the beam at frame {frame_id}"
        )
    if len(states) > max_tokens:
        raise CapacityError(
            "--max-tokens-per-frame",
            f"frame {frame_id} kept {len(states)} tokens, over the "
            f"{max_tokens} limit; raise --max-tokens-per-frame",
        )
    pred_idx = preds.copy()
    real = arcs >= 0
    eps = np.zeros(len(states), dtype=bool)
    eps[real] = wfst.arc_ilabel[arcs[real]] == 0
    if np.any(eps):
        pos = np.minimum(np.searchsorted(states, preds[eps]),
                         len(states) - 1)
        if np.any(states[pos] != preds[eps]):
            raise InternalInvariantError(
                "epsilon winner's source state kept no token"
            )
        pred_idx[eps] = pos
    return FrameTokens(
        frame=frame_id,
        states=states.astype(np.int32),
        costs=costs,
        pred_arc=arcs,
        pred_idx=pred_idx,
    )


def expand_emitting(wfst: Wfst, states: np.ndarray, costs: np.ndarray,
                    matrix: CostMatrix, frame: int, beam: float,
                    acoustic_scale: float = 1.0):
    """Expand one frontier along emitting arcs and keep the in-beam winners.

    Returns (states, costs, cutoff): the sorted destination states whose
    best candidate beat cutoff = best + beam, with those costs.
    """
    if not (0 <= frame < matrix.num_frames):
        raise UsageError(f"frame {frame} outside the matrix's "
                         f"{matrix.num_frames} frames")
    toks = _frontier_tokens(wfst, states, costs)
    ws = _Workspace(wfst)
    store = ShardedArcStore(max(wfst.num_arcs, 1), 1)
    acrow = matrix.costs[frame] * float(acoustic_scale)
    cfg = DecodeConfig(beam=beam, num_workers=1, scheduler="static")
    cfg.validate()
    engine = numba_active()
    if engine:
        kernels.warm_kernels()
    best = _emit(ws, wfst, toks, acrow, float(beam), store, cfg, None, 0,
                 engine)
    if not math.isfinite(best):
        return (np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64),
                math.inf)
    cutoff = compute_cutoff(best, beam)
    out_states, out_costs, _ = _winners(ws, cutoff, 0)
    return out_states, out_costs, cutoff


def expand_nonemitting(wfst: Wfst, states: np.ndarray, costs: np.ndarray,
                       cutoff: float):
    """Close one frontier over epsilon arcs under a fixed cutoff.

    Input tokens behave like already-won entries (an epsilon candidate
    must strictly improve on them); returns the merged sorted frontier.
    Input costs over the cutoff are dropped from the result.
    """
    toks = _frontier_tokens(wfst, states, costs)
    ws = _Workspace(wfst)
    # Relaxation rounds can restage an epsilon arc once per round; size for
    # a few improving waves and let CapacityError catch pathologies.
    store = ShardedArcStore(max(wfst.num_arcs, 1) * 8 + 1024, 1)
    engine = numba_active()
    if engine:
        kernels.warm_kernels()
    seed_words = packing.pack_array(toks.costs,
                                    np.zeros(toks.n, dtype=np.int64))
    ws.state_pack[toks.states] = seed_words
    _eps_fixpoint(ws, wfst, store, float(cutoff), 0, toks.states, toks.costs,
                  engine)
    active = np.flatnonzero(ws.state_pack != packing.SENTINEL)
    out_costs = np.empty(len(active), dtype=np.float64)
    seed_pos = np.minimum(np.searchsorted(toks.states, active), toks.n - 1)
    is_seed = (toks.states[seed_pos] == active) & (
        ws.state_pack[active] == seed_words[seed_pos]
    )
    out_costs[is_seed] = toks.costs[seed_pos[is_seed]]
    won = ~is_seed
    arcs = (ws.state_pack[active[won]] & _MASK32).astype(np.int64)
    out_costs[won] = ws.buf_cost[arcs]
    keep = out_costs <= cutoff
    return active[keep], out_costs[keep]


def _frontier_tokens(wfst: Wfst, states, costs) -> FrameTokens:
    states = np.asarray(states, dtype=np.int64)
    costs = np.asarray(costs, dtype=np.float64)
    if states.ndim != 1 or states.shape != costs.shape:
        raise UsageError("states and costs must be matching 1-d sequences")
    if len(states) == 0:
        raise UsageError("frontier is empty")
    if len(np.unique(states)) != len(states):
        raise UsageError("frontier states must be unique")
    if states.min() < 0 or states.max() >= wfst.num_states:
        raise UsageError("frontier state outside the graph")
    order = np.argsort(states, kind="stable")
    return FrameTokens(
        frame=0,
        states=states[order].astype(np.int32),
        costs=costs[order],
        pred_arc=np.full(len(states), -1, dtype=np.int64),
        pred_idx=np.full(len(states), -1, dtype=np.int64),
    )


# ---------------------------------------------------------------------------
# Full decode
# ---------------------------------------------------------------------------

def decode_utterance(wfst: Wfst, matrix: CostMatrix,
                     config: DecodeConfig | None = None,
                     want_lattice: bool = True,
                     collect_frame_packs: bool = False,
                     collect_timings: bool = False) -> DecodeResult:
    """Decode one utterance; returns words, alignment, cost and lattice.

    Raises DecodeFailure when no token survives a frame's beam (or no
    complete path exists and the frontier is empty), CapacityError when a
    frame or the arc store outgrows its configured bound.
    """
    cfg = config if config is not None else DecodeConfig()
    cfg.validate()
    if wfst.max_ilabel > matrix.num_labels:
        raise UsageError(
            f"graph uses input label {wfst.max_ilabel} but the cost matrix "
            f"has only {matrix.num_labels} columns"
        )
    t_total0 = time.perf_counter()
    engine = numba_active()
    if engine:
        kernels.warm_kernels()
    ws = _Workspace(wfst)
    # Each shard is private to one pushing worker, so idle shards would
    # strand their share of the arc budget; cap the shard count at the
    # number of writers the engine will actually run.
    writers = cfg.num_workers if engine else 1
    store = ShardedArcStore(cfg.max_lattice_arcs,
                            min(cfg.num_shards, writers))
    lat = Lattice(wfst, store)
    pool = (_Pool(cfg.num_workers)
            if engine and cfg.num_workers > 1 else None)
    frame_packs: list | None = [] if collect_frame_packs else None
    tm = {"token_passing": 0.0, "lattice_pruning": 0.0,
          "total": 0.0} if collect_timings else None
    prune_box: list[BaseException] = []
    prune_thread: threading.Thread | None = None

    def join_prune() -> None:
        nonlocal prune_thread
        if prune_thread is not None:
            prune_thread.join()
            prune_thread = None
            if prune_box:
                raise prune_box.pop()

    try:
        t0 = time.perf_counter()
        ws.reset_frame()
        ws.state_pack[wfst.start_state] = packing.pack(0.0, 0)
        cutoff = compute_cutoff(0.0, cfg.beam)
        _eps_fixpoint(
            ws, wfst, store, cutoff, 0,
            np.array([wfst.start_state], dtype=np.int32),
            np.array([0.0]), engine)
        toks = _aggregate(ws, wfst, cutoff, 0, wfst.start_state,
                          cfg.max_tokens_per_frame)
        lat.append_frame(toks)
        lat.resolve_block(0, cutoff, toks)
        if frame_packs is not None:
            frame_packs.append(
                (toks.states.copy(), ws.state_pack[toks.states].copy()))
        if tm is not None:
            tm["token_passing"] += time.perf_counter() - t0

        for t in range(1, matrix.num_frames + 1):
            t0 = time.perf_counter()
            prev = toks
            acrow = matrix.costs[t - 1] * cfg.acoustic_scale
            ws.reset_frame()
            best = _emit(ws, wfst, prev, acrow, cfg.beam, store, cfg, pool,
                         t, engine, tm)
            if not math.isfinite(best):
                raise DecodeFailure(
                    f"beam search died at frame {t}: no emitting candidates"
                )
            cutoff = compute_cutoff(best, cfg.beam)
            seed_states, seed_costs, _ = _winners(ws, cutoff, t)
            if len(seed_states) == 0:
                raise DecodeFailure(
                    f"no tokens survived the beam at frame {t}"
                )
            _eps_fixpoint(ws, wfst, store, cutoff, t, seed_states,
                          seed_costs, engine)
            toks = _aggregate(ws, wfst, cutoff, t, None,
                              cfg.max_tokens_per_frame)
            lat.append_frame(toks)
            lat.resolve_block(t, cutoff, toks)
            if frame_packs is not None:
                frame_packs.append(
                    (toks.states.copy(), ws.state_pack[toks.states].copy()))
            if tm is not None:
                tm["token_passing"] += time.perf_counter() - t0

            if (want_lattice and t % cfg.prune_interval == 0
                    and t < matrix.num_frames):
                join_prune()
                frontier = toks

                def prune_task(frontier=frontier):
                    p0 = time.perf_counter()
                    try:
                        prune_lattice(lat, frontier, cfg.lattice_beam)
                    except BaseException as exc:
                        prune_box.append(exc)
                    finally:
                        if tm is not None:
                            tm["lattice_pruning"] += time.perf_counter() - p0

                prune_thread = threading.Thread(target=prune_task,
                                                daemon=True)
                prune_thread.start()

        join_prune()

        finals = wfst.final_cost_array[toks.states]
        totals = toks.costs + finals
        partial = not bool(np.any(np.isfinite(totals)))
        if partial:
            best_idx = int(np.argmin(toks.costs))
            total_cost = float(toks.costs[best_idx])
        else:
            best_idx = int(np.argmin(totals))
            total_cost = float(totals[best_idx])

        lattice = None
        if want_lattice:
            p0 = time.perf_counter()
            prune_lattice(lat, toks, cfg.lattice_beam,
                          final_costs=None if partial else finals)
            lat.mark_final(None if partial else finals, total_cost)
            lattice = finalize_lattice(lat)
            if tm is not None:
                tm["lattice_pruning"] += time.perf_counter() - p0

        words, alignment = _backtrace(lat, wfst, best_idx)
        if tm is not None:
            tm["total"] = time.perf_counter() - t_total0
            tm["other"] = max(
                tm["total"] - tm["token_passing"] - tm["lattice_pruning"],
                0.0,
            )
        return DecodeResult(words, alignment, total_cost, partial, lattice,
                            lat if want_lattice else None, frame_packs, tm)
    finally:
        if prune_thread is not None:
            prune_thread.join()
        if pool is not None:
            pool.close()


def _backtrace(lat: Lattice, wfst: Wfst, last_idx: int):
    """Best path from the last frame's chosen token back to the start."""
    words: list[int] = []
    alignment: list[tuple[int, int]] = []
    f = len(lat.frames) - 1
    i = last_idx
    while True:
        toks = lat.frames[f]
        arc = int(toks.pred_arc[i])
        if arc < 0:
            if f != 0:
                raise InternalInvariantError(
                    f"initial token found at frame {f}"
                )
            break
        il = int(wfst.arc_ilabel[arc])
        ol = int(wfst.arc_olabel[arc])
        if ol > 0:
            words.append(ol)
        if il > 0:
            alignment.append((il, f - 1))
            i = int(toks.pred_idx[i])
            f -= 1
        else:
            i = int(toks.pred_idx[i])
    words.reverse()
    alignment.reverse()
    return words, alignment


def decode_batch(wfst: Wfst, matrices: list[CostMatrix],
                 config: DecodeConfig | None = None,
                 want_lattice: bool = True) -> list[DecodeResult]:
    """Decode several utterances concurrently, one worker thread each.

    num_workers bounds how many utterances are in flight; every utterance
    itself runs single-worker, so results are identical to decoding the
    batch sequentially.  Results come back in input order.
    """
    from concurrent.futures import ThreadPoolExecutor

    cfg = config if config is not None else DecodeConfig()
    cfg.validate()
    inner = replace(cfg, num_workers=1)
    if not matrices:
        return []
    if numba_active():
        kernels.warm_kernels()
    width = min(cfg.num_workers, len(matrices))
    if width == 1:
        return [decode_utterance(wfst, m, inner, want_lattice=want_lattice)
                for m in matrices]
    with ThreadPoolExecutor(max_workers=width) as pool:
        futs = [
            pool.submit(decode_utterance, wfst, m, inner,
                        want_lattice=want_lattice)
            for m in matrices
        ]
        return [f.result() for f in futs]
