import numpy as np
import pytest

from dini.basis import BasisSpec
from dini.specfun import SpectralParams
from dini.zeros import build_zero_table

_TABLE_CACHE = {}


def shared_basis(nu: float, h: float = 0.5, n_max: int = 300) -> BasisSpec:
    """Session-wide basis cache; zero tables dominate test startup cost."""
    key = (nu, h)
    have = _TABLE_CACHE.get(key)
    if have is None or have.n_max < n_max:
        have = build_zero_table(SpectralParams(nu, h), n_max)
        _TABLE_CACHE[key] = have
    return BasisSpec(SpectralParams(nu, h), have, n_max)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
