"""Suite-wide pytest plumbing.

The acceptance tests record one line per criterion; the terminal summary
prints them as a block so a full run always ends with the criterion map.
"""

CRITERION_LINES = []


def record_criterion(line):
    CRITERION_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)
