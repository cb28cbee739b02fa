"""Shared fixtures: the acceptance-criteria result board.

Acceptance tests record one verdict per criterion; the board is printed
as a dedicated section at the end of the pytest run so every criterion
gets a visible pass/fail line regardless of capture settings.
"""

import pytest

_board: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record_criterion():
    """Record (criterion number, title, ok, detail) for the final report."""

    def _record(number: int, title: str, ok: bool, detail: str) -> None:
        _board[number] = (ok, f"{title}: {detail}")

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _board:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_board):
        ok, text = _board[number]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {number} [{status}] {text}")
