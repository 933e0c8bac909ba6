import numpy as np
import pytest

from trapbound.funcs import default_catalog


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)


@pytest.fixture
def test_catalog():
    """One instance per catalog family with finite endpoint derivatives."""
    return default_catalog()
