from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from heckeflow.hecke import make_context

settings.register_profile(
    "heckeflow", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("heckeflow")


@pytest.fixture(params=[3, 4, 5, 6, 7, 8])
def ctx(request):
    return make_context(request.param)


@pytest.fixture
def c3():
    return make_context(3)


@pytest.fixture
def c5():
    return make_context(5)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


ACCEPTANCE: list[str] = []


@pytest.fixture
def accept():
    """Record one PASS/FAIL line per acceptance criterion and assert it."""

    def record(label: str, ok: bool, detail: str = "") -> None:
        line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else "")
        ACCEPTANCE.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
