import numpy as np
import pytest

from trafficarma.ingest import PacketRecord


def make_records(times, protocol="TCP"):
    return [PacketRecord(i + 1, float(t), "10.0.0.1", "10.0.0.2", protocol) for i, t in enumerate(times)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# (criterion, passed, detail) rows filled in by test_acceptance.py
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
