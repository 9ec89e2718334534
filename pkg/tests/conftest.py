import pytest
from hypothesis import HealthCheck, assume, settings, strategies as st

from filtermin import Cover, Filter, GenParams, GenerationError, generate
from filtermin.rng import derive

settings.register_profile(
    "suite", deadline=None, max_examples=50,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])
settings.load_profile("suite")


def make_chain3():
    """0 -a-> 1 -a-> 2 with a self loop on 2; everything outputs g."""
    return Filter.build(3, [0], [(0, "a", 1), (1, "a", 2), (2, "a", 2)],
                        [["g"], ["g"], ["g"]], name="chain3")


def make_chain3_wide():
    """chain3 with "b" declared but never used: traces on b crash, not reject."""
    return Filter.build(3, [0], [(0, "a", 1), (1, "a", 2), (2, "a", 2)],
                        [["g"], ["g"], ["g"]], observations=("a", "b"),
                        name="chain3_wide")


def make_twocolor():
    """Diamond with colors g,r,r,g; minimal zipped cover has 3 subsets."""
    return Filter.build(
        4, [0],
        [(0, "a", 1), (0, "b", 2), (1, "a", 3), (2, "a", 3), (3, "a", 3)],
        [["g"], ["r"], ["r"], ["g"]], name="twocolor")


@pytest.fixture
def chain3():
    return make_chain3()


@pytest.fixture
def chain3_wide():
    return make_chain3_wide()


@pytest.fixture
def twocolor():
    return make_twocolor()


# shapes with 1 + layers*width <= 6 states
SMALL_SHAPES = [
    (1, 1, 0, 0), (2, 1, 1, 0), (3, 1, 1, 1), (4, 1, 2, 1), (5, 1, 0, 2),
    (1, 2, 1, 0), (2, 2, 1, 1), (1, 3, 0, 1), (1, 5, 2, 0),
]
SMALL_COLORINGS = [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2)]  # (n_outputs, per state)


def try_small_filter(idx: int):
    """Deterministic small instance for an index, or None when the combo
    cannot generate (cramped alphabets are a legitimate generator outcome)."""
    d, w, m, b = SMALL_SHAPES[idx % len(SMALL_SHAPES)]
    n_o, p = SMALL_COLORINGS[(idx // len(SMALL_SHAPES)) % len(SMALL_COLORINGS)]
    n_y = idx % 3 + 1
    try:
        return generate(GenParams(
            layers=d, width=w, self_loops=m, back_edges=b, n_outputs=n_o,
            outputs_per_state=p, n_observations=n_y,
            seed=derive(0xACCE91, idx)))
    except GenerationError:
        return None


@st.composite
def small_filters(draw):
    flt = try_small_filter(draw(st.integers(0, 2**20)))
    assume(flt is not None)
    return flt


@st.composite
def covers_for(draw, flt, allow_empty_subsets=True):
    k = draw(st.integers(1, flt.n_states))
    min_size = 0 if allow_empty_subsets else 1
    subsets = draw(st.lists(
        st.frozensets(st.integers(0, flt.n_states - 1), min_size=min_size),
        min_size=1, max_size=k))
    return Cover(tuple(subsets), flt)
