import pytest

from mdsforge.newforms import builtin_form


@pytest.fixture(scope="session")
def f11():
    return builtin_form("level11w2")


@pytest.fixture(scope="session")
def f9():
    return builtin_form("level9w4")


@pytest.fixture(scope="session", params=["level11w2", "level9w4"])
def form(request):
    return builtin_form(request.param)


CRITERIA: list[str] = []


@pytest.fixture
def criterion(capsys):
    """Record and print one PASS/FAIL line per acceptance criterion."""

    def report(number: int, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        CRITERIA.append(line)
        with capsys.disabled():
            print("\n" + line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
