"""Hypothesis strategies shared by the property tests."""
import numpy as np
from hypothesis import strategies as st

from gnets import games


@st.composite
def nets(draw, max_nodes=4, max_values=3):
    seed = draw(st.integers(0, 2**32 - 1))
    return games.random_net(np.random.default_rng(seed), max_nodes, max_values)


@st.composite
def nets_with_profiles(draw, max_nodes=4, max_values=3):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    net = games.random_net(rng, max_nodes, max_values)
    return net, games.random_interior_profile(net, rng)


@st.composite
def bimatrices(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    return games.random_bimatrix(np.random.default_rng(seed))
