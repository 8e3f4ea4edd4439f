import random

import pytest

from src.core.settings import Settings


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)


@pytest.fixture
def settings() -> Settings:
    """Sequential run with the debug assertions switched on."""
    return Settings(threads=1, debug=True)
