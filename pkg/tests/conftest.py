import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("bccr", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("bccr")

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


@pytest.fixture
def samples():
    return SAMPLES


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


VERDICTS: dict = {}


@pytest.fixture
def verdict():
    """Record one acceptance line: ``verdict(number, ok, detail)``."""

    def record(number: int, ok: bool, detail: str) -> None:
        VERDICTS[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance")
        for number in sorted(VERDICTS):
            terminalreporter.write_line(VERDICTS[number])
