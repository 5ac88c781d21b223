import pytest

_verdicts: dict[str, str] = {}


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion.

    Call with ``(label, ok, detail)``; the line is printed immediately and
    repeated in the terminal summary.
    """

    def record(label: str, ok: bool, detail: str) -> bool:
        line = f"{label}: {'PASS' if ok else 'FAIL'}  {detail}"
        _verdicts[label] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _verdicts:
        terminalreporter.section("acceptance criteria")
        for label in sorted(_verdicts):
            terminalreporter.write_line(_verdicts[label])
