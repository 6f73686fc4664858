import threading

import numpy as np

from latbeam.scheduler import Dispatcher, StaticPartition, claim_next, static_partition


def test_sequential_claims():
    d = Dispatcher(3)
    assert [claim_next(d) for _ in range(4)] == [0, 1, 2, None]


def test_empty_dispatcher():
    assert claim_next(Dispatcher(0)) is None


def test_concurrent_claims_cover_exactly_once():
    d = Dispatcher(100)
    got: list[list[int]] = [[] for _ in range(8)]

    def worker(k: int) -> None:
        while True:
            i = claim_next(d)
            if i is None:
                return
            got[k].append(i)

    threads = [threading.Thread(target=worker, args=(k,)) for k in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    flat = sorted(x for part in got for x in part)
    assert flat == list(range(100))


def test_static_partition_example():
    p = static_partition(np.array([3, 1, 4, 2]), 2)
    assert p.prefix.tolist() == [0, 3, 4, 8, 10]
    assert p.ranges == [(0, 5), (5, 10)]
    assert p.locate(5) == (2, 1)
    assert p.locate(0) == (0, 0)
    assert p.locate(9) == (3, 1)


def test_static_partition_single_worker():
    p = static_partition(np.array([2, 2, 1]), 1)
    assert p.ranges == [(0, 5)]


def test_static_partition_even_split():
    p = static_partition(np.full(8, 3), 4)
    sizes = [hi - lo for lo, hi in p.ranges]
    assert sizes == [6, 6, 6, 6]


def test_static_partition_empty():
    p = static_partition(np.array([], dtype=np.int64), 3)
    assert p.num_arcs == 0
    assert all(lo == hi for lo, hi in p.ranges)


def test_static_partition_tiles_exactly(rng):
    for _ in range(50):
        n = int(rng.integers(1, 40))
        degs = rng.integers(0, 7, size=n)
        workers = int(rng.integers(1, 9))
        p = static_partition(degs, workers)
        total = int(degs.sum())
        assert p.num_arcs == total
        # ranges tile [0, total) in order without gaps or overlaps
        cur = 0
        for lo, hi in p.ranges:
            assert lo == min(cur, total)
            assert lo <= hi <= total
            cur = hi if hi > cur else cur
        assert cur == total or total == 0
        for g in range(total):
            i, off = p.locate(g)
            assert p.prefix[i] + off == g
            assert degs[i] > off >= 0
