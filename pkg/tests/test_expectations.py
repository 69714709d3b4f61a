import itertools

import numpy as np
import pytest
from hypothesis import given

from gnets import games
from gnets.expectations import (BoundaryError, UnreachableEvent, conditional_eu, deviation_values,
                                expected_utility, numerators_denominators, residual_F,
                                symbolic_decomposition, value_decomposition, value_map)
from gnets.model import joint_probability, utility
from gnets.profile import Profile

from strategies import nets_with_profiles


def brute_eu(net, p, player, event):
    sizes = [len(n.domain) for n in net.nodes]
    num = den = 0.0
    ev = net.event(event)
    for x in itertools.product(*(range(s) for s in sizes)):
        if any(x[k] != v for k, v in ev.items()):
            continue
        q = joint_probability(net, p, x)
        num += q * utility(net, player, x)
        den += q
    return num / den


@given(nets_with_profiles())
def test_value_map_blocks_sum_to_one(pair):
    net, prof = pair
    v = value_map(net, prof)
    for b in net.layout.blocks:
        assert v.values[b.start:b.stop].sum() == pytest.approx(1.0, abs=1e-10)
    assert np.all(v.values >= 0)


@given(nets_with_profiles())
def test_expected_utility_matches_enumeration(pair):
    net, prof = pair
    for pl in net.players:
        assert expected_utility(net, prof, pl) == pytest.approx(brute_eu(net, prof, pl, None))


@given(nets_with_profiles())
def test_value_entries_are_scaled_conditional_utilities(pair):
    """v_j = p_j * u(x_k | H) / u(H) at every reachable decision block."""
    net, prof = pair
    v = value_map(net, prof).values
    lay = net.layout
    for b in lay.blocks:
        if b.nature:
            continue
        node = net.nodes[b.node]
        h = {m: hv for m, hv in zip(node.parents, b.parent_values)}
        for i, a in enumerate(b.actions):
            expect = prof.values[b.start + i] * conditional_eu(net, prof, node.player,
                                                                {b.node: a}, h) if h else None
            if expect is None:
                expect = prof.values[b.start + i] * brute_eu(net, prof, node.player, {b.node: a}) \
                    / brute_eu(net, prof, node.player, None)
            assert v[b.start + i] == pytest.approx(expect, rel=1e-9)


@given(nets_with_profiles())
def test_symbolic_decomposition_agrees_with_numeric(pair):
    net, prof = pair
    lay = net.layout
    num, den = numerators_denominators(net, prof.values)
    polys = symbolic_decomposition(net)
    x = prof.values[lay.free_coords]
    for j in lay.decision_coords:
        assert polys[int(j)](x) == pytest.approx(num[j], rel=1e-9, abs=1e-12)
        d = value_decomposition(net, int(j))
        assert d.denominator(x) == pytest.approx(den[j], rel=1e-9, abs=1e-12)


def test_deviation_values_are_pure_deviation_payoffs():
    net = games.coordination()
    p = Profile.from_blocks(net, {"R": {"A": 0.3, "B": 0.7}, "C": {"A": 0.6, "B": 0.4}})
    nt = deviation_values(net, p.values)
    # row playing A against C = (0.6, 0.4): 0.6 * 1 + 0.4 * (1/3)
    assert nt[0] == pytest.approx(0.6 + 0.4 / 3)


def test_boundary_profile_is_refused():
    net = games.matching_pennies()
    p = Profile.from_blocks(net, {"R": {"H": 1.0, "T": 0.0}})
    with pytest.raises(BoundaryError):
        value_map(net, p)
    with pytest.raises(BoundaryError):
        residual_F(net, p)


def test_zero_probability_event_is_reported():
    net = games.beer_quiche()
    p = Profile.from_blocks(net, {"Drink|Type=S": {"B": 1.0, "Q": 0.0},
                                  "Drink|Type=W": {"B": 1.0, "Q": 0.0}})
    with pytest.raises(UnreachableEvent):
        expected_utility(net, p, "2", {"Drink": "Q"})


def test_matching_pennies_uniform_is_a_fixed_point():
    net = games.matching_pennies()
    assert np.allclose(residual_F(net, Profile.uniform(net)), 0.0, atol=1e-15)
