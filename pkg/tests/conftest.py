import functools

import pytest

from becqsl import reduce, to_internal
from becqsl.figures import preset_grid
from becqsl.units import default_params


@functools.lru_cache(maxsize=None)
def preset_models():
    return {k: reduce(to_internal(p)) for k, p in preset_grid().items()}


@pytest.fixture(scope="session")
def presets():
    return preset_models()


@pytest.fixture(scope="session")
def default_model():
    return reduce(to_internal(default_params()))


ACCEPTANCE_LINES = {}


@pytest.fixture
def report():
    """Record the outcome line of one acceptance criterion."""
    def record(n, ok, detail):
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[n] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
