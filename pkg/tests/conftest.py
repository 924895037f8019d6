import numpy as np
import pytest

from koranyi_acf.quad import QuadSpec


@pytest.fixture
def fast_spec():
    # two panels per axis already integrates every catalog integrand to round-off
    return QuadSpec(2, 2, 2, 16, refine=False)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
