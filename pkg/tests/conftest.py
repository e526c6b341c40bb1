from __future__ import annotations

import pytest

from dsrgkron import catalog

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def fixture_specs():
    """Bundled seed triples keyed by catalog row."""
    return {i: catalog.load_fixture(i) for i in catalog.fixture_indices()}


@pytest.fixture(scope="session")
def spec_t2(fixture_specs):
    return fixture_specs[1]


@pytest.fixture(scope="session")
def spec_t3(fixture_specs):
    return fixture_specs[2]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
