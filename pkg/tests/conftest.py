import mpmath as mp
import pytest


@pytest.fixture(autouse=True)
def _working_precision():
    """All tests run at 40 working digits unless they say otherwise."""
    old = mp.mp.dps
    mp.mp.dps = 40
    yield
    mp.mp.dps = old
