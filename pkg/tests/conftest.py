import random

import pytest
from hypothesis import HealthCheck, settings

from ambitoric.builder import AmbitoricSpec, quartic

settings.register_profile(
    "exact",
    deadline=None,
    max_examples=25,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("exact")


@pytest.fixture
def rng():
    return random.Random(20240611)


def spec(form_type, A, B, **kw):
    return AmbitoricSpec(form_type, quartic(A), quartic(B), **kw)


@pytest.fixture
def make_spec():
    return spec


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
