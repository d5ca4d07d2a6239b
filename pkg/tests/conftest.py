import numpy as np
import pytest

from hyperboot.hypergraph import sample_explicit


def random_instance(rng, n_max=300, k_choices=(2, 3), r_choices=(2, 3)):
    """A small random (h, r, A0) triple with p spread across sparse and dense."""
    n = int(rng.integers(6, n_max + 1))
    k = int(rng.choice(k_choices))
    r = int(rng.choice(r_choices))
    mean_deg = float(rng.uniform(0.5, 6.0))  # expected edges per vertex
    p = min(0.9, mean_deg * k / n / max(1.0, float(n - 1)) ** (k - 2) * (k - 1))
    h = sample_explicit(n, k, p, int(rng.integers(1 << 62)))
    a = int(rng.integers(0, max(2, n // 3)))
    A0 = np.sort(rng.choice(n, size=a, replace=False))
    return h, r, A0


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
