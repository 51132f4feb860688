from __future__ import annotations

ACCEPTANCE_LINES: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE_LINES, key=lambda c: int(c[1:])):
        terminalreporter.write_line(ACCEPTANCE_LINES[cid])
