"""Monotone packing of (cost, arc id) into a single 64-bit word.

Token recombination keeps, per state, the minimum-cost incoming hypothesis.
To let many workers race on that minimum with one atomic instruction, the
cost and the winning arc's id are packed into one unsigned 64-bit word whose
integer order agrees with lexicographic (cost, arc_id) order:

    word = (monotone_encode(float32(cost)) << 32) | arc_id

monotone_encode reinterprets the float32 as unsigned bits and then flips all
bits when the sign bit is set, otherwise sets only the sign bit.  This is a
total-order-preserving bijection on finite float32 values, so an unsigned
integer min over words equals a float min over costs, with ties broken
toward the smaller arc id.  Costs therefore lose nothing beyond float32
precision, and the arc id is recovered exactly.

The all-ones word is reserved as the sentinel meaning "no token here"; it
compares greater than every real pack, so initializing state slots to the
sentinel makes the first atomic min always win.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import UsageError

SENTINEL = np.uint64(0xFFFFFFFFFFFFFFFF)

_SIGN32 = np.uint64(0x80000000)
_MASK32 = np.uint64(0xFFFFFFFF)
_SIGN64 = np.uint64(0x8000000000000000)


def monotone_encode(cost: float) -> int:
    """Order-preserving float32 → uint32 bijection (finite inputs)."""
    u = np.uint64(np.float32(cost).view(np.uint32))
    if u & _SIGN32:
        return int(~u & _MASK32)
    return int(u | _SIGN32)


def monotone_decode(bits: int) -> float:
    """Inverse of monotone_encode."""
    u = np.uint64(bits)
    if u & _SIGN32:
        u = u ^ _SIGN32
    else:
        u = ~u & _MASK32
    return float(np.uint32(u).view(np.float32))


def pack(cost: float, arc_id: int) -> int:
    """Pack a non-negative finite cost and a 32-bit arc id into one word."""
    if not math.isfinite(cost) or cost < 0.0:
        raise UsageError(f"pack requires a finite non-negative cost, got {cost!r}")
    if not 0 <= arc_id < 2**32:
        raise UsageError(f"arc id {arc_id} does not fit in 32 bits")
    return (monotone_encode(cost) << 32) | int(arc_id)


def pack_word(cost: float, arc_id: int) -> np.uint64:
    """Scalar pack without the public-contract checks.

    Engine-internal: accepts any finite cost (the monotone encoding orders
    negatives correctly) and trusts the arc id to fit.
    """
    return np.uint64((monotone_encode(cost) << 32) | int(arc_id))


def is_sentinel(word: int) -> bool:
    return np.uint64(word) == SENTINEL


def unpack(word: int) -> tuple[float, int]:
    """Recover (cost, arc_id); the arc id exactly, the cost at float32 precision."""
    w = np.uint64(word)
    if w == SENTINEL:
        raise UsageError("sentinel word carries no token")
    return monotone_decode(int(w >> np.uint64(32))), int(w & _MASK32)


def encode_costs32(costs: np.ndarray) -> np.ndarray:
    """Vectorised monotone_encode after a cast to float32; returns uint64."""
    u = np.ascontiguousarray(costs, dtype=np.float32).view(np.uint32).astype(np.uint64)
    return np.where(u & _SIGN32 != 0, ~u & _MASK32, u | _SIGN32)


def pack_array(costs: np.ndarray, arc_ids: np.ndarray) -> np.ndarray:
    """Vectorised pack of float64 costs (rounded to float32) and arc ids."""
    return (encode_costs32(costs) << np.uint64(32)) | arc_ids.astype(np.uint64)


def unpack_array(words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised unpack: (float64 costs at float32 precision, int64 arc ids)."""
    enc = (words >> np.uint64(32)).astype(np.uint64)
    u = np.where(enc & _SIGN32 != 0, enc ^ _SIGN32, ~enc & _MASK32)
    costs = u.astype(np.uint32).view(np.float32).astype(np.float64)
    arcs = (words & _MASK32).astype(np.int64)
    return costs, arcs


def encode_cost64(cost: float) -> int:
    """monotone_encode at float64 width, for the shared best-cost cell."""
    u = np.uint64(np.float64(cost).view(np.uint64))
    if u & _SIGN64:
        return int(~u)
    return int(u | _SIGN64)


def decode_cost64(bits: int) -> float:
    u = np.uint64(bits)
    if u & _SIGN64:
        u = u ^ _SIGN64
    else:
        u = ~u
    return float(u.view(np.float64))
