import pytest

_RESULTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: end-to-end criteria (slow; deselect with -m 'not acceptance')")
    config.stash[_RESULTS] = {}


@pytest.fixture
def report(request, capsys):
    """Record and print one PASS/FAIL line for an acceptance criterion, then assert it."""
    def _report(n, ok, detail):
        line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        request.config.stash[_RESULTS][n] = line
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
    return _report


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash[_RESULTS]
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
