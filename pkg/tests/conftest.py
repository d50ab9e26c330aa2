import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("cartanlab", max_examples=40, deadline=None)
settings.load_profile("cartanlab")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_LINES = pytest.StashKey[list]()


@pytest.fixture
def criterion_line(request):
    """Record one summary line per acceptance criterion; shown at the end of the run."""
    lines = request.config.stash.setdefault(_LINES, [])

    def emit(text):
        lines.append(text)
        print(text)

    return emit


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
