import numpy as np
import pytest
from hypothesis import settings

from cogci.scenario import ScenarioConfig

settings.register_profile("cogci", deadline=None, max_examples=60, print_blob=True)
settings.load_profile("cogci")

ACCEPTANCE_LINES = []


@pytest.fixture
def operating_point():
    return ScenarioConfig(num_tx_antennas=3, num_users=2, modulation_order=4, snr_targets=(3.0,))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def record_criterion():
    def record(result):
        ACCEPTANCE_LINES.append(result.line())
        print(result.line())
        return result

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
