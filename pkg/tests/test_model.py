import itertools

import numpy as np
import pytest
from hypothesis import given

from gnets import NATURE, GNet, GNode, InvalidNet, PotentialTable, games, validate
from gnets.model import (information_sets, joint_probability, parameter_count, potential_table,
                         topological_order, utility)
from gnets.profile import Profile

from strategies import nets_with_profiles


def rules(net):
    return {v.rule for v in validate(net)}


def test_fixtures_are_valid():
    for net in (games.matching_pennies(), games.coordination(), games.dominance(),
                games.weakly_dominated(), games.beer_quiche()):
        assert validate(net) == []


def test_reference_state_has_unit_utility():
    net = games.beer_quiche()
    for pl in net.players:
        assert utility(net, pl, net.reference) == 1.0


def test_beer_quiche_utilities_multiply_potentials():
    net = games.beer_quiche()
    x = {"Type": "W", "Drink": "Q", "Fight": "F"}
    assert utility(net, "1", x) == pytest.approx(0.8 * 2.0 * 0.2)
    assert utility(net, "2", x) == pytest.approx(1.2 * 2.0)


def test_bimatrix_utilities_recover_payoff_ratios():
    a = np.array([[2.0, 3.0], [5.0, 7.0]])
    b = np.array([[1.5, 1.0], [4.0, 2.5]])
    net = games.bimatrix(a, b)
    for r, c in itertools.product(range(2), repeat=2):
        assert utility(net, "1", (r, c)) == pytest.approx(a[r, c] / a[0, 0])
        assert utility(net, "2", (r, c)) == pytest.approx(b[r, c] / b[0, 0])


def test_parameter_counts():
    assert parameter_count(games.beer_quiche()) == (8, 16)
    assert parameter_count(games.matching_pennies()) == (6, 8)


def test_nature_utility_is_an_error():
    with pytest.raises(ValueError):
        utility(games.beer_quiche(), NATURE, (0, 0, 0))


def _two_nodes(**kw):
    nodes = kw.pop("nodes", (GNode("A", "1", ("a0", "a1")), GNode("B", "1", ("b0", "b1"))))
    return GNet(nodes, ("1",), **kw)


def test_cycle_is_rejected():
    nodes = (GNode("A", "1", ("a0", "a1"), parents=(1,)), GNode("B", "1", ("b0", "b1"), parents=(0,)))
    assert "acyclic" in rules(_two_nodes(nodes=nodes))
    assert topological_order(_two_nodes(nodes=nodes)) is None


def test_table_without_uarc_is_rejected():
    net = _two_nodes(potentials=(PotentialTable("1", 0, (1,), np.ones((2, 2))),))
    assert "uarc" in rules(net)


def test_reference_entry_must_be_one():
    w = np.array([[2.0, 1.0], [1.0, 1.0]])
    net = _two_nodes(uarcs=(("1", 0, 1),), potentials=(PotentialTable("1", 0, (1,), w),))
    assert "reference" in rules(net)


def test_nonpositive_weight_is_rejected():
    w = np.array([[1.0, 1.0], [0.0, 1.0]])
    net = _two_nodes(uarcs=(("1", 0, 1),), potentials=(PotentialTable("1", 0, (1,), w),))
    assert "positivity" in rules(net)


def test_missing_entries_are_reported():
    net = _two_nodes(uarcs=(("1", 0, 1),))
    table = potential_table(net, "1", "A", ["B"], {("a1", "b0"): 2.0})
    assert "complete" in rules(net.with_potentials([table]))


def test_duplicate_table_is_rejected():
    t = PotentialTable("1", 0, (), np.array([1.0, 2.0]))
    assert "unique" in rules(_two_nodes(potentials=(t, t)))


def test_bad_cpt_is_rejected():
    nodes = (GNode("N", NATURE, ("x", "y")),)
    net = GNet(nodes, ("1",), cpts={0: np.array([0.5, 0.6])})
    assert "cpt" in rules(net)
    assert "cpt" in rules(GNet(nodes, ("1",)))


def test_check_raises_with_all_violations():
    from gnets.model import check

    w = np.array([[2.0, 1.0], [0.0, 1.0]])
    net = _two_nodes(uarcs=(("1", 0, 1),), potentials=(PotentialTable("1", 0, (1,), w),))
    with pytest.raises(InvalidNet) as err:
        check(net)
    assert {v.rule for v in err.value.violations} == {"reference", "positivity"}


def test_information_sets_of_beer_quiche():
    infos = information_sets(games.beer_quiche())
    assert len(infos) == 5          # Type, Drink|S, Drink|W, Fight|B, Fight|Q


@given(nets_with_profiles())
def test_joint_probability_sums_to_one(pair):
    net, prof = pair
    sizes = [len(n.domain) for n in net.nodes]
    total = sum(joint_probability(net, prof, x) for x in itertools.product(*(range(s) for s in sizes)))
    assert total == pytest.approx(1.0, abs=1e-12)


@given(nets_with_profiles())
def test_layout_states_carry_all_probability(pair):
    net, prof = pair
    probs = np.prod(prof.values[net.layout.idx], axis=1)
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)


def test_profile_from_blocks_and_problems():
    net = games.beer_quiche()
    p = Profile.from_blocks(net, {"Drink|Type=S": {"B": 1.0, "Q": 0.0}})
    assert p.problems() == []
    bad = Profile(net, p.values * 1.1)
    assert bad.problems()
