"""Seeded generators for decoding tasks, used by tests and benchmarks.

Every graph generated here is always decodable: each state has at least
one emitting out-arc, so no frame can run out of candidates, and at least
one state is final.  Epsilon arcs go from lower to higher state ids by
default, which keeps within-frame relaxation acyclic; pass
allow_eps_cycles=True to also generate backward and looping epsilon arcs
(they are legal, just slower to relax).
"""

from __future__ import annotations

import numpy as np

from .acoustics import CostMatrix
from .wfst import Wfst, load_wfst_text


def random_wfst(rng: np.random.Generator, max_states: int = 50,
                max_arcs: int = 200, num_labels: int = 8,
                num_words: int = 20, eps_prob: float = 0.2,
                allow_eps_cycles: bool = False,
                final_prob: float = 0.6) -> Wfst:
    """A random decodable graph within the given size bounds."""
    n = int(rng.integers(2, max_states + 1))
    lines = []
    # One guaranteed emitting arc per state, state 0 first so it is the
    # start state.
    for s in range(n):
        lines.append(_emit_line(rng, s, n, num_labels, num_words))
    extra = int(rng.integers(0, max(max_arcs - n, 0) + 1))
    for _ in range(extra):
        s = int(rng.integers(0, n))
        if rng.random() < eps_prob and (allow_eps_cycles or s < n - 1):
            if allow_eps_cycles:
                d = int(rng.integers(0, n))
            else:
                d = int(rng.integers(s + 1, n))
            ol = int(rng.integers(0, num_words + 1))
            w = float(rng.uniform(0.0, 3.0))
            lines.append(f"{s} {d} 0 {ol} {w!r}")
        else:
            lines.append(_emit_line(rng, s, n, num_labels, num_words))
    finals = [s for s in range(n) if rng.random() < final_prob]
    if not finals:
        finals = [n - 1]
    for s in finals:
        lines.append(f"{s} {float(rng.uniform(0.0, 2.0))!r}")
    return load_wfst_text("\n".join(lines) + "\n")


def _emit_line(rng, s: int, n: int, num_labels: int, num_words: int) -> str:
    d = int(rng.integers(0, n))
    il = int(rng.integers(1, num_labels + 1))
    ol = int(rng.integers(0, num_words + 1))
    w = float(rng.uniform(0.0, 3.0))
    return f"{s} {d} {il} {ol} {w!r}"


def random_matrix(rng: np.random.Generator, num_labels: int,
                  max_frames: int = 20,
                  allow_negative: bool = False) -> CostMatrix:
    """A random cost matrix with 1..max_frames frames."""
    t = int(rng.integers(1, max_frames + 1))
    lo = -1.0 if allow_negative else 0.0
    return CostMatrix(rng.uniform(lo, 5.0, size=(t, num_labels)))


def random_task(seed: int, max_states: int = 50, max_arcs: int = 200,
                num_labels: int = 8, max_frames: int = 20,
                allow_eps_cycles: bool = False,
                allow_negative: bool = False) -> tuple[Wfst, CostMatrix]:
    """A seeded (graph, matrix) pair with matching label alphabets."""
    rng = np.random.default_rng(seed)
    w = random_wfst(rng, max_states=max_states, max_arcs=max_arcs,
                    num_labels=num_labels,
                    allow_eps_cycles=allow_eps_cycles)
    m = random_matrix(rng, num_labels, max_frames=max_frames,
                      allow_negative=allow_negative)
    return w, m


def _assemble(num_states: int, src: np.ndarray, dst: np.ndarray,
              il: np.ndarray, ol: np.ndarray, wt: np.ndarray,
              final_costs: dict[int, float]) -> Wfst:
    """Direct CSR assembly, bypassing the text loader (benchmark sizes)."""
    order = np.argsort(src, kind="stable")
    src, dst = src[order], dst[order]
    il, ol, wt = il[order], ol[order], wt[order]
    offsets = np.zeros(num_states + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=num_states), out=offsets[1:])
    return Wfst(num_states, 0, offsets, src.astype(np.int32),
                dst.astype(np.int32), il.astype(np.int32),
                ol.astype(np.int32), wt.astype(np.float64), final_costs)


def uniform_bench_graph(seed: int, num_states: int = 5000,
                        arcs_per_state: int = 24,
                        num_labels: int = 32) -> Wfst:
    """Benchmark graph with the same out-degree everywhere."""
    rng = np.random.default_rng(seed)
    total = num_states * arcs_per_state
    src = np.repeat(np.arange(num_states, dtype=np.int64), arcs_per_state)
    dst = rng.integers(0, num_states, size=total, dtype=np.int64)
    il = rng.integers(1, num_labels + 1, size=total, dtype=np.int64)
    ol = rng.integers(0, num_labels + 1, size=total, dtype=np.int64)
    wt = rng.uniform(0.0, 3.0, size=total)
    finals = {int(s): 0.0 for s in range(num_states)}
    return _assemble(num_states, src, dst, il, ol, wt, finals)


def skewed_bench_graph(seed: int, num_states: int = 5000,
                       arcs_per_state: int = 24, num_labels: int = 32,
                       hub_share: float = 0.3) -> Wfst:
    """Benchmark graph where one hub state owns hub_share of all arcs."""
    rng = np.random.default_rng(seed)
    total = num_states * arcs_per_state
    hub_arcs = int(total * hub_share)
    rest = total - hub_arcs
    per_other = max(rest // (num_states - 1), 1)
    src_parts = [np.zeros(hub_arcs, dtype=np.int64)]
    for s in range(1, num_states):
        src_parts.append(np.full(per_other, s, dtype=np.int64))
    src = np.concatenate(src_parts)
    n_arcs = len(src)
    dst = rng.integers(0, num_states, size=n_arcs, dtype=np.int64)
    il = rng.integers(1, num_labels + 1, size=n_arcs, dtype=np.int64)
    ol = rng.integers(0, num_labels + 1, size=n_arcs, dtype=np.int64)
    wt = rng.uniform(0.0, 3.0, size=n_arcs)
    finals = {int(s): 0.0 for s in range(num_states)}
    return _assemble(num_states, src, dst, il, ol, wt, finals)


def bench_matrix(seed: int, num_frames: int = 500,
                 num_labels: int = 32) -> CostMatrix:
    rng = np.random.default_rng(seed)
    return CostMatrix(rng.uniform(0.0, 5.0, size=(num_frames, num_labels)))
