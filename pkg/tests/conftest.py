import math

import pytest

from plcrelay.channel import AttenuationParams, FadingParams, NoiseParams
from plcrelay.energy import ModemPowerProfile


@pytest.fixture
def att():
    return AttenuationParams()


@pytest.fixture
def noise():
    return NoiseParams(p=0.01, sbnr_db=25.0, sinr_db=-15.0)


@pytest.fixture
def fading():
    return FadingParams(3.0, math.sqrt(2.0))


@pytest.fixture
def profile():
    return ModemPowerProfile(0.5, 0.5, 30e6, 1.0)


XI = 1.0


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per acceptance criterion, printed at session end."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(criterion: str, ok: bool, detail: str) -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
