import numpy as np
import pytest

from fracstab import backends


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)


def _available_backends():
    names = ["numpy"]
    try:
        backends.get_backend("numba")
        names.insert(0, "numba")
    except ImportError:
        pass
    return names


@pytest.fixture(params=_available_backends())
def each_backend(request):
    """Run a test under every available kernel backend, then restore."""
    previous = backends.active_backend()
    backends.set_backend(request.param)
    yield request.param
    backends.set_backend(previous)
