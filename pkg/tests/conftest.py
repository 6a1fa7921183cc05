import pytest

from rktlab import _kernels


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # trigger JIT compilation outside of any timed test section
    _kernels.warm_up()
