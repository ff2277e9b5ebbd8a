import pytest

from bchubbard.measurement_search import SearchConfig


@pytest.fixture
def fast_cfg():
    """Cheaper search settings for tests that only need a few digits."""
    return SearchConfig(n_samples=2000, n_refine=2, seed=7)
