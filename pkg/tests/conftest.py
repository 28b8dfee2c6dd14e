import os

import pytest

# pinned before src.config builds its settings
os.environ.setdefault("LOG_LEVEL", "WARNING")
os.environ.setdefault("LOG_JSON", "false")

from src.numops import Grid1D  # noqa: E402


@pytest.fixture
def grid_x() -> Grid1D:
    return Grid1D(start=0.0, stop=1.0, count=21)


@pytest.fixture
def grid_t() -> Grid1D:
    return Grid1D(start=0.0, stop=1.0, count=21)
