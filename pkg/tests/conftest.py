import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


class StubRng:
    """Replays scripted draws in order.

    ``scalars`` feed ``random()``, ``vectors`` feed ``random(n)`` (a scalar
    entry is broadcast to length n) and ``ints`` feed ``integers()``.
    Running out of scripted draws is a test bug and raises.
    """

    def __init__(self, scalars=(), vectors=(), ints=()):
        self.scalars = list(scalars)
        self.vectors = list(vectors)
        self.ints = list(ints)

    def random(self, size=None):
        if size is None:
            return float(self.scalars.pop(0))
        v = self.vectors.pop(0)
        return np.broadcast_to(np.asarray(v, dtype=float), (size,)).copy()

    def integers(self, low, high=None):
        return int(self.ints.pop(0))

    def exhausted(self):
        return not (self.scalars or self.vectors or self.ints)


@pytest.fixture
def stub_rng():
    return StubRng


# criterion id -> (passed, detail); filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: [int(p) if p.isdigit() else p for p in k.replace(".", " ").split()]):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
