"""Shared pytest wiring for the acceptance battery.

The acceptance tests record one summary line per criterion; the hook below
replays them after the run so they survive output capture.
"""

acceptance_lines: list = []


def record_line(line: str) -> None:
    acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter):
    if not acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance_lines:
        terminalreporter.write_line(line)
