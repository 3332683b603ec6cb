"""Shared test hooks.

The acceptance tests push one verdict line each into
ACCEPTANCE_VERDICTS; printing them from a terminal-summary hook keeps
them visible in the default captured run, where writes to stdout from
inside passing tests are swallowed.
"""

ACCEPTANCE_VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_VERDICTS:
            terminalreporter.write_line(line)
