import pytest

from osnbehavior.gmm import GmmFit
from osnbehavior.synth import SynthSpec


@pytest.fixture
def daily_truth():
    return GmmFit(0.5, 10.0, 2.0, 0.5, 19.0, 1.5)


@pytest.fixture
def truth_spec(daily_truth):
    return SynthSpec(gmm_truth=daily_truth, n_events=10_000, growth_truth=(2.0, 1.0, 3.0),
                     noise_sd=0.0, seed=7)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
