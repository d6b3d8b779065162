from datetime import datetime, timezone

import pytest

from popaudit.clock import FixedClock
from popaudit.corpus import CorpusConfig, DiscrepancyPlan, build_corpus

_acceptance_results: list[tuple[str, bool]] = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _acceptance_results.append((report.nodeid.split("::")[-1], report.passed))


def pytest_terminal_summary(terminalreporter):
    if _acceptance_results:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, passed in _acceptance_results:
            terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}")


@pytest.fixture
def clock():
    return FixedClock(datetime(2026, 8, 10, 12, 0, 0, tzinfo=timezone.utc))


@pytest.fixture(scope="session")
def small_bundle():
    """30 statements, one injected discrepancy per field; fast shared fixture."""
    return build_corpus(
        CorpusConfig(size=30, seed=7),
        DiscrepancyPlan(minimum_payment=1, due_date=1, statement_balance=1, seed=11),
        train_count=8,
    )


@pytest.fixture(scope="session")
def clean_bundle():
    """20 statements with no injections."""
    return build_corpus(CorpusConfig(size=20, seed=3), DiscrepancyPlan(), train_count=6)
