import pytest
from hypothesis import HealthCheck, settings

from mqv import Matrix, Representation, a_n
from mqv.scalars import parse_scalar

settings.register_profile(
    "mqv",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("mqv")


def mat(rows):
    """Exact matrix from nested lists of ints or strings."""
    return Matrix([[parse_scalar(v) for v in row] for row in rows])


def S(v):
    return parse_scalar(v)


@pytest.fixture
def a2_worked():
    """A2 with one-dimensional spaces and x_h = x_hbar = 1; solves Phi = (1/2, 2)."""
    return Representation(a_n(2), {"1": 1, "2": 1}, {"h1": mat([[1]]), "h1*": mat([[1]])})


@pytest.fixture
def a2_q():
    return {"1": S("1/2"), "2": S(2)}
