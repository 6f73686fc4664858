import numpy as np
import pytest

from latbeam import packing
from latbeam.errors import UsageError


def test_pack_zero_cost_example():
    assert packing.pack(0.0, 5) == 0x8000000000000005
    assert packing.monotone_encode(0.0) == 0x80000000


def test_tie_break_by_arc_id():
    for c in (0.0, 0.25, 17.5, 1e6):
        assert packing.pack(c, 3) < packing.pack(c, 7)


def test_order_matches_float_order(rng):
    costs = rng.uniform(0.0, 100.0, size=2000).astype(np.float32)
    pairs = costs.reshape(1000, 2)
    for c1, c2 in pairs:
        if c1 == c2:
            continue
        lo, hi = (c1, c2) if c1 < c2 else (c2, c1)
        a = int(rng.integers(0, 2**32))
        b = int(rng.integers(0, 2**32))
        assert packing.pack(float(lo), a) < packing.pack(float(hi), b)


def test_monotone_encode_orders_all_finite_floats(rng):
    # the sign-flip encoding must order negatives too: scaled acoustic
    # costs below zero may reach pack_array even though pack() rejects them
    vals = np.float32(rng.uniform(-50.0, 50.0, size=4000))
    enc = packing.encode_costs32(vals)
    order = np.argsort(vals, kind="stable")
    assert np.all(np.diff(enc[order].astype(np.uint64)) >= 0)


def test_roundtrip_exact(rng):
    costs = rng.uniform(0.0, 1000.0, size=10**6).astype(np.float32)
    arcs = rng.integers(0, 2**32, size=10**6, dtype=np.uint64)
    words = packing.pack_array(costs.astype(np.float64), arcs.astype(np.int64))
    c2, a2 = packing.unpack_array(words)
    assert np.array_equal(c2, costs)
    assert np.array_equal(a2.astype(np.uint64), arcs)


def test_scalar_roundtrip():
    c, a = packing.unpack(packing.pack(0.75, 42))
    assert (c, a) == (0.75, 42)


def test_sentinel_signals_no_token():
    assert packing.is_sentinel(packing.SENTINEL)
    assert not packing.is_sentinel(packing.pack(0.0, 0))
    with pytest.raises(UsageError):
        packing.unpack(packing.SENTINEL)


def test_pack_rejects_bad_costs():
    with pytest.raises(UsageError):
        packing.pack(-1.0, 0)
    with pytest.raises(UsageError):
        packing.pack(float("inf"), 0)
    with pytest.raises(UsageError):
        packing.pack(float("nan"), 0)


def test_pack_rejects_bad_arc_ids():
    with pytest.raises(UsageError):
        packing.pack(0.0, -1)
    with pytest.raises(UsageError):
        packing.pack(0.0, 2**32)


def test_cost64_roundtrip_and_order(rng):
    vals = rng.uniform(0.0, 100.0, size=500)
    for v in vals:
        assert packing.decode_cost64(packing.encode_cost64(float(v))) == v
    enc = np.array([packing.encode_cost64(float(v)) for v in vals],
                   dtype=np.uint64)
    assert np.array_equal(np.argsort(enc), np.argsort(vals, kind="stable"))
    assert packing.decode_cost64(packing.encode_cost64(np.inf)) == np.inf
