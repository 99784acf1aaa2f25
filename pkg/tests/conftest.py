import pytest

_lines_key = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_lines_key] = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line; returns the verdict so tests can assert on it."""
    lines = request.config.stash[_lines_key]

    def report(tag: str, ok: bool, detail: str) -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] {tag}: {detail}"
        lines.append(line)
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_lines_key, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
