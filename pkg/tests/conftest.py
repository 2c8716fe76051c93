import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_psd(rng, d, rank=None):
    rank = d if rank is None else rank
    G = rng.standard_normal((d, rank))
    return G @ G.T
