import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from gsemkit.examples import shell_game, switching_values  # noqa: E402
from helpers import binary_signature  # noqa: E402

settings.register_profile("repo", deadline=None, derandomize=True, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")



@pytest.fixture(scope="session")
def sig1():
    return binary_signature("X")


@pytest.fixture(scope="session")
def sig2():
    return binary_signature("X", "Y")


@pytest.fixture(scope="session")
def sig3():
    return binary_signature("X", "Y", "Z")


@pytest.fixture(scope="session")
def shell():
    return shell_game()


@pytest.fixture(scope="session")
def switching():
    return switching_values()
