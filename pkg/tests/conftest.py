from __future__ import annotations


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one PASS/FAIL line per acceptance criterion after the run."""
    from . import test_acceptance

    if not test_acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed in test_acceptance.RESULTS:
        terminalreporter.write_line("ACCEPTANCE %-20s %s" % (name, "PASS" if passed else "FAIL"))
