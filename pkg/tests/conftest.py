import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ci",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


@pytest.fixture
def announce(capsys):
    """Print a line that bypasses pytest capture (acceptance pass/fail lines)."""

    def _announce(text):
        with capsys.disabled():
            print(text)

    return _announce
