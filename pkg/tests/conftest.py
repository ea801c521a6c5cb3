import sys
import logging

import numpy as np
import pytest

from kinetikos.trajectory import MovingPointSet


def random_points(seed, n, d, s=1, horizon=1.0, box=1.0):
    rng = np.random.default_rng(seed)
    return MovingPointSet(rng.uniform(-box, box, (n, d, s + 1)), horizon=horizon, max_degree=s)


@pytest.fixture(autouse=True)
def _quiet_horizon_warnings(caplog):
    caplog.set_level(logging.ERROR, logger="kinetikos")
    yield


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
