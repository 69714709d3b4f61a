import numpy as np
from hypothesis import given, strategies as st

from gnets import NATURE, GNet, GNode, check, games
from gnets.decomposition import decompose, embed, project
from gnets.expectations import residual_F
from gnets.io import print_game
from gnets.profile import Profile


def test_two_copies_split_in_two():
    net = games.disjoint_union(games.matching_pennies(), games.matching_pennies())
    comps = decompose(net)
    assert [len(c.nodes) for c in comps] == [2, 2]
    sub = project(net, comps[0])
    orig = games.matching_pennies()
    assert np.array_equal(sub.layout.utilities["1"], orig.layout.utilities["1"])
    assert np.array_equal(sub.layout.utilities["2"], orig.layout.utilities["2"])


def test_beer_quiche_is_one_component():
    assert len(decompose(games.beer_quiche())) == 1


def test_single_component_projection_is_identity():
    net = games.beer_quiche()
    assert print_game(project(net, decompose(net)[0])) == print_game(net)


def test_isolated_coin_is_its_own_component():
    coin = check(GNet((GNode("Coin", NATURE, ("h", "t")),), ("1", "2"), cpts={0: np.array([0.5, 0.5])}))
    net = games.disjoint_union(games.coordination(), coin)
    comps = decompose(net)
    assert len(comps) == 2
    lone = [c for c in comps if len(c.nodes) == 1][0]
    assert lone.free_coordinates == ()


@given(st.integers(0, 10**6))
def test_residual_of_a_component_ignores_other_components(seed):
    rng = np.random.default_rng(seed)
    net = games.disjoint_union(games.random_bimatrix(rng), games.random_bimatrix(rng))
    comps = decompose(net)
    p = games.random_interior_profile(net, rng)
    q = p.values.copy()
    other = list(comps[1].free_coordinates)
    fresh = games.random_interior_profile(net, rng).values
    q[other] = fresh[other]
    fc = list(net.layout.free_coords)
    mine = [fc.index(j) for j in comps[0].free_coordinates]
    diff = residual_F(net, p)[mine] - residual_F(net, Profile(net, q))[mine]
    assert np.max(np.abs(diff)) < 1e-12


def test_embed_round_trip():
    net = games.disjoint_union(games.matching_pennies(), games.coordination())
    comps = decompose(net)
    sub = project(net, comps[1])
    vals = net.layout.base.copy()
    embed(net, sub, np.array([1.0, 0.0, 0.0, 1.0]), vals)
    assert vals[4:].tolist() == [1.0, 0.0, 0.0, 1.0]
