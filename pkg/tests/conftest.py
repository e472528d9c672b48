import pytest
from mpmath import mp

from zlab.numerics import PrecisionContext


@pytest.fixture(autouse=True)
def _restore_mp_precision():
    # tests that raise the global mpmath precision must not leak it
    prec = mp.prec
    yield
    mp.prec = prec


@pytest.fixture(scope="session")
def ctx():
    return PrecisionContext(256)


@pytest.fixture(scope="session")
def ctx128():
    return PrecisionContext(128)


@pytest.fixture(scope="session")
def ctx64():
    return PrecisionContext(64)
