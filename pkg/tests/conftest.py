import pytest

_LINES: list[str] = []


class AcceptanceReport:
    """Collects one pass/fail line per acceptance criterion."""

    def __call__(self, number: int, title: str, ok: bool, detail: str) -> bool:
        _LINES.append(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}")
        return ok


@pytest.fixture(scope="session")
def acceptance():
    return AcceptanceReport()


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_LINES, key=lambda s: int(s.split(".")[0].split()[-1])):
        terminalreporter.write_line(line)
