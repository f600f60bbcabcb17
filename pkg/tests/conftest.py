from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from batchbandit.core import validate_instance

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def random_instance(rng: np.random.Generator, k: int, log_lo: float = 0.0, log_hi: float = 3.0):
    """Means uniform in [0, 1], counts log-uniform in [10**log_lo, 10**log_hi]."""
    return validate_instance(rng.uniform(0, 1, k), 10.0 ** rng.uniform(log_lo, log_hi, k))


@pytest.fixture
def two_arm():
    return validate_instance([0.6, 0.4], [10, 10])


ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
