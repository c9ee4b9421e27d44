"""Shared fixtures and the acceptance-criteria reporting hook."""

from __future__ import annotations

from pathlib import Path

import pytest

from vtkb import KnowledgeBase, parse_kb

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"

_acceptance_results: list[tuple[str, bool]] = []


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance: criterion-level gate, one PASS/FAIL line each")


def pytest_runtest_logreport(report):
    if "acceptance" not in report.keywords:
        return
    if report.when == "call":
        _acceptance_results.append((report.nodeid, report.passed))
    elif report.failed:  # setup/teardown error counts as a failed criterion
        _acceptance_results.append((report.nodeid, False))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, passed in _acceptance_results:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[ACCEPTANCE] {status} {nodeid}")


@pytest.fixture(scope="session")
def fixture_text() -> str:
    return (FIXTURES / "paper_kb.vtkb").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def fixture_kb(fixture_text) -> KnowledgeBase:
    return parse_kb(fixture_text)


@pytest.fixture(scope="session")
def demo_kb() -> KnowledgeBase:
    return parse_kb((FIXTURES / "composer_demo.vtkb").read_text(encoding="utf-8"))
