import numpy as np
import pytest

from latbeam import _atomics
from latbeam.acoustics import load_cost_matrix
from latbeam.wfst import load_wfst_text

W1_TEXT = "0 1 1 1 0.5\n0 2 2 2 1.0\n1 0.0\n2 0.0\n"
W1_COSTS = "1 2\n0.3 0.1\n"

# Two 3-frame routes 0->1->3->5 and 0->2->4->5 sharing label columns, with
# total graph+acoustic costs 1.0 vs 1.4 under DIAMOND_COSTS: a hand-sized
# lattice whose off-best arcs all carry extra cost 0.4.
DIAMOND_TEXT = (
    "0 1 1 1 0.1\n"
    "0 2 2 2 0.3\n"
    "1 3 1 0 0.2\n"
    "2 4 2 0 0.2\n"
    "3 5 1 0 0.3\n"
    "4 5 2 0 0.3\n"
    "5 0.0\n"
)
DIAMOND_COSTS = (
    "3 2\n"
    "0.1 0.2\n"
    "0.1 0.2\n"
    "0.2 0.2\n"
)


@pytest.fixture
def w1():
    return load_wfst_text(W1_TEXT)


@pytest.fixture
def w1_costs():
    return load_cost_matrix(W1_COSTS)


@pytest.fixture
def diamond():
    return load_wfst_text(DIAMOND_TEXT)


@pytest.fixture
def diamond_costs():
    return load_cost_matrix(DIAMOND_COSTS)


def _engines():
    names = ["numpy"]
    if _atomics.HAVE_NUMBA:
        names.append("numba")
    return names


@pytest.fixture(params=_engines())
def engine(request):
    """Run the test under each available engine, restoring the default."""
    before = _atomics.numba_active()
    _atomics.use_numba(request.param == "numba")
    yield request.param
    _atomics.use_numba(before)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
