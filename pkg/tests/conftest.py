import sys

import pytest

from agodd import CORPUS_DIR, parse_events, parse_odd, parse_scenarios


def load_odd(name: str):
    return parse_odd((CORPUS_DIR / name).read_bytes(), source=name)


def load_scenarios(name: str):
    return parse_scenarios((CORPUS_DIR / name).read_bytes(), source=name)


def load_events(name: str):
    return parse_events((CORPUS_DIR / name).read_bytes(), source=name)


@pytest.fixture(scope="session")
def cultivation():
    return [load_odd(f"cultivation_iter{i}.agodd") for i in (1, 2, 3)]


@pytest.fixture(scope="session")
def wheat():
    return load_odd("wheat.agodd")


@pytest.fixture(scope="session")
def fig5():
    return [(load_odd(f"fig5_iter{i}.agodd"), load_scenarios(f"fig5_iter{i}.agsc")) for i in (1, 2, 3, 4)]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if not mod or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for i in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.format_result(i, mod.RESULTS[i]))
