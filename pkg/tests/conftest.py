import pytest

from hedgehog_dirac.profile import Hedgehog, exponential_profile, rational_profile


@pytest.fixture
def rational():
    return rational_profile(1.0)


@pytest.fixture
def example_hedgehog():
    """The worked example: F = pi/(r+1), N = 1, m = 21.23."""
    return Hedgehog(rational_profile(1.0), 1, 21.23)


@pytest.fixture
def exponential():
    return exponential_profile(1.0)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
