import pytest

from threatsim import GameParams


@pytest.fixture
def fig1():
    """The canonical phase-portrait parameterization."""
    return GameParams(T=2, R=1, P=0, S=-1, p=1, q=3, theta=1)
