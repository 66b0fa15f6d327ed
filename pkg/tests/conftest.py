import pytest

_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Record a PASS/FAIL line for the terminal summary and assert on it."""
    def report(n: int, ok: bool, detail: str) -> None:
        line = f"[criterion {n}] {'PASS' if ok else 'FAIL'}: {detail}"
        _LINES.append(line)
        print(line)
        assert ok, detail
    return report


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split()[1].rstrip("]"))):
            terminalreporter.write_line(line)
