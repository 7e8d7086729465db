import warnings

import pytest

from hirzebruch_bps.invariants.genfun import ProvenanceWarning

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(autouse=True)
def _quiet_provenance():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ProvenanceWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
