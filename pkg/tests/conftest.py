"""Shared pytest wiring: echo acceptance verdicts after the run.

The acceptance tests record one verdict line apiece; printing them from the
terminal-summary hook keeps them visible under default output capture.
"""

from __future__ import annotations


def pytest_terminal_summary(terminalreporter, exitstatus, config) -> None:
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if VERDICTS:
        terminalreporter.section("acceptance")
        for line in VERDICTS:
            terminalreporter.write_line(line)
