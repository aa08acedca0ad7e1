import random

import pytest
from hypothesis import strategies as st

from polydist.randgen import random_binary, random_partial
from polydist.trees import Kind


def seeded_partial(kind: Kind, n: int, seed: int, contract_prob: float = 0.4):
    rng = random.Random(seed)
    return random_partial(n, kind, rng, contract_prob=contract_prob)


def seeded_pair(kind: Kind, n: int, seed: int, contract_prob: float = 0.4):
    rng = random.Random(seed)
    a = random_partial(n, kind, rng, contract_prob=contract_prob)
    b = random_partial(n, kind, rng, contract_prob=contract_prob, taxa=a.taxa)
    return a, b


@st.composite
def rooted_pairs(draw, min_n=3, max_n=12):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    return seeded_pair(Kind.ROOTED, n, seed)


@st.composite
def unrooted_pairs(draw, min_n=4, max_n=11):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    return seeded_pair(Kind.UNROOTED, n, seed)


@st.composite
def rooted_trees(draw, min_n=3, max_n=12):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    return seeded_partial(Kind.ROOTED, n, seed)


@st.composite
def unrooted_trees(draw, min_n=4, max_n=11):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    return seeded_partial(Kind.UNROOTED, n, seed)


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
