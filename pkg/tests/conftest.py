import numpy as np
import pytest
from hypothesis import HealthCheck, settings

import support
from dynapsp import engine, preprocess

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(autouse=True)
def ledger_guard(monkeypatch):
    """Check the congestion ledger on every build a test triggers.

    The phi bound is only a theorem for the deterministic build; randomized
    builds get the congestion ceiling and the |C| <= 2 phi / tau check.
    """
    det, rand = preprocess.det_preprocessing_steps, preprocess.rand_preprocessing_steps

    def det_checked(*args, **kwargs):
        out = yield from det(*args, **kwargs)
        out.check_ledger()
        rows = support.check_space_storage(out)
        support.LEDGER["space" if rows else "det"] += 1
        support.LEDGER["storage_rows"] += rows
        return out

    def rand_checked(*args, **kwargs):
        out = yield from rand(*args, **kwargs)
        out.check_ledger(phi=False)
        support.LEDGER["rand"] += 1
        return out

    monkeypatch.setattr(preprocess, "det_preprocessing_steps", det_checked)
    monkeypatch.setattr(engine, "det_preprocessing_steps", det_checked)
    monkeypatch.setattr(preprocess, "rand_preprocessing_steps", rand_checked)


def pytest_terminal_summary(terminalreporter):
    if support.RESULTS:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in support.RESULTS:
            terminalreporter.write_line(line)
