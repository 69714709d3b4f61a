import numpy as np
import pytest
from hypothesis import given, settings

from gnets import games
from gnets.all_equilibria import (SolveConfig, all_equilibria, all_equilibria_decomposed,
                                  build_poly_system, build_start_system)
from gnets.expectations import numerators_denominators
from gnets.extensive_form import nash_matches, oracle_support_enumeration, to_agent_form
from gnets.profile import Profile

from strategies import bimatrices, nets_with_profiles


def free_sets(report):
    return sorted(tuple(np.round(p.free, 6)) for p in report.nash)


@given(nets_with_profiles(max_nodes=3, max_values=2))
def test_system_vanishes_exactly_where_D_p_equals_N(pair):
    net, prof = pair
    esys = build_poly_system(net)
    if not len(esys.system):
        return
    x = prof.values[esys.var_coords]
    g = esys.system(x)
    num, den = numerators_denominators(net, prof.values)
    expect = den[esys.var_coords] * prof.values[esys.var_coords] - num[esys.var_coords]
    assert np.allclose(g, expect, atol=1e-10)


def test_start_roots_solve_start_system():
    esys = build_poly_system(games.coordination())
    start, roots = build_start_system(esys, seed=4)
    assert len(roots) == esys.total_degree
    for r in roots:
        assert np.allclose(start.alpha**start.degrees * r**start.degrees, start.beta**start.degrees)


def test_coordination_equilibria():
    rep = all_equilibria(games.coordination())
    assert free_sets(rep) == sorted([(1.0, 0.0, 1.0, 0.0), (0.0, 1.0, 0.0, 1.0),
                                     tuple(np.round([1 / 3, 2 / 3, 1 / 3, 2 / 3], 6))])


def test_path_accounting_adds_up():
    rep = all_equilibria(games.beer_quiche())
    assert sum(rep.path_statistics.values()) == rep.paths_tracked == rep.total_degree


def test_matching_pennies_unique():
    rep = all_equilibria(games.matching_pennies())
    assert len(rep.nash) == 1 and np.allclose(rep.nash[0].free, 0.5, atol=1e-9)


def test_beer_quiche_finds_both_pooling_equilibria():
    rep = all_equilibria(games.beer_quiche())
    drinks = sorted((round(p.values[2], 6), round(p.values[4], 6)) for p in rep.nash)
    assert drinks == [(0.0, 0.0), (1.0, 1.0)]     # P(B | S), P(B | W): pool on quiche / on beer


def test_seed_determinism():
    a = all_equilibria(games.coordination(), SolveConfig(seed=5))
    b = all_equilibria(games.coordination(), SolveConfig(seed=5))
    assert [p.values.tolist() for p in a.nash] == [p.values.tolist() for p in b.nash]


def test_degenerate_game_yields_real_points_on_continua():
    net = games.weakly_dominated()
    rep = all_equilibria(net)
    agent = to_agent_form(net)
    stray, _ = nash_matches(net, agent, oracle_support_enumeration(agent), rep.nash)
    assert rep.nash and not stray


@settings(max_examples=15)
@given(bimatrices())
def test_matches_oracle_on_random_bimatrix(net):
    rep = all_equilibria(net)
    agent = to_agent_form(net)
    stray, missed = nash_matches(net, agent, oracle_support_enumeration(agent), rep.nash)
    assert not stray and not missed


def test_decomposed_is_product_and_sums_paths():
    net = games.disjoint_union(games.matching_pennies(), games.coordination())
    rep = all_equilibria_decomposed(net)
    assert len(rep.nash) == 3
    assert rep.paths_tracked == 9 + 9
    for p in rep.nash:
        assert np.allclose(p.values[:4], 0.5)


def test_single_component_decomposed_is_identical():
    net = games.coordination()
    assert free_sets(all_equilibria(net)) == free_sets(all_equilibria_decomposed(net))
