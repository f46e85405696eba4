import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from sunn_reduction import ModelParams

settings.register_profile(
    "default",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=[2, 3, 4], ids=lambda n: f"n{n}")
def params(request):
    return ModelParams(request.param, 1.0, 0.3, 0.5)


def random_sb(rng, n, spread=0.5):
    """Random upper triangular matrix with positive diagonal of size 2n."""
    size = 2 * n
    b = np.triu(rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))) * spread
    b[np.diag_indices(size)] = np.exp(rng.uniform(-0.5, 0.5, size))
    return b


def random_unitary(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
