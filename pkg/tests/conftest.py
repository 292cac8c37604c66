from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

import oracle
from urysohn.dyadic import Dyadic
from urysohn.space import Store

settings.register_profile(
    "repo",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

FIXTURES = Path(__file__).parent / "fixtures"
VALID_SPACES = sorted((FIXTURES / "spaces").glob("*.metric"))


@pytest.fixture
def store():
    return Store()


# --- strategies -----------------------------------------------------------------------

dyadics = st.builds(Dyadic, st.integers(0, 40), st.integers(0, 5))
small_dyadics = st.builds(Dyadic, st.integers(0, 8), st.integers(0, 2))
fractions = st.builds(Fraction, st.integers(0, 40), st.integers(1, 12))


@st.composite
def raw_nodes(draw, max_age=3, max_len=2, age=None):
    """Oracle tuples with dyadic distances; usually not permissible."""
    if age is None:
        age = draw(st.integers(0, max_age))
    if age == 0:
        return oracle.EMPTY
    count = draw(st.integers(0, max_len))
    entries = []
    for _ in range(count):
        child_age = draw(st.integers(0, age - 1))
        child = draw(raw_nodes(max_len=max_len, age=child_age))
        alpha = draw(small_dyadics).to_fraction()
        entries.append((child, alpha))
    return (age, tuple(entries))


def points(max_age=3, max_len=2):
    """Permissible oracle tuples, obtained by retracting raw ones in the oracle."""
    return raw_nodes(max_age=max_age, max_len=max_len).map(oracle.retract)
