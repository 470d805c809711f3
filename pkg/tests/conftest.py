import pytest

from charspec import _kernels


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # first call to any numba kernel pays the JIT cost; do it once up
    # front so timing-sensitive tests measure the algorithms themselves
    _kernels.warmup()
