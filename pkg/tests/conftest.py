import pytest

from afsmc import scenario, sim

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def shipped_runs():
    """Lazily simulate each shipped scenario once per session."""
    cache = {}

    def get(name):
        if name not in cache:
            cfg = scenario.load_scenario(name)
            cache[name] = (cfg, sim.run(cfg))
        return cache[name]

    return get


@pytest.fixture
def report_criterion():
    def report(number, title, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} -- {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
