import pytest

from dampedwave import Grid1D


@pytest.fixture(scope="session")
def reference_grid():
    """The standard experiment grid: (-20, 20) at dx = 0.1, 399 interior nodes."""
    return Grid1D.from_spacing(20.0, 0.1)
