import pytest

from genfourier import Params
from genfourier.suites import GridConfig, _plan

# parameter pairs exercised throughout; one per n in {1, 2, 3}
PAIRS = [(1.0, 1), (0.8, 2), (1.0, 3)]


@pytest.fixture(scope="session")
def plan_for():
    """Memoized default transform plan per (k, n)."""
    cache = {}

    def get(k, n):
        if (k, n) not in cache:
            cache[(k, n)] = _plan(Params(k, n), GridConfig())
        return cache[(k, n)]

    return get


@pytest.fixture(params=PAIRS, ids=lambda kn: f"k={kn[0]:g},n={kn[1]}")
def params(request):
    return Params(*request.param)
