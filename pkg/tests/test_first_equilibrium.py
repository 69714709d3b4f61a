import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gnets import games
from gnets.equilibrium import is_nash_prop3
from gnets.first_equilibrium import (f_epsilon, first_equilibrium_decomposed, jacobian_F_eps,
                                     perturb_payoffs, residual_F_eps, track_first_equilibrium)
from gnets.profile import Profile
from gnets.tracking import TrackerConfig

from strategies import bimatrices, nets_with_profiles


def test_matching_pennies_endpoint():
    res = track_first_equilibrium(games.matching_pennies())
    assert np.allclose(res.profile.free, 0.5, atol=1e-6)
    assert res.classification.verdict.is_nash


def test_dominance_endpoint_is_dominant_profile():
    res = track_first_equilibrium(games.dominance())
    assert np.allclose(res.profile.free, [0, 1, 0, 1], atol=1e-6)


def test_coordination_selects_payoff_dominant():
    res = track_first_equilibrium(games.coordination())
    assert np.allclose(res.profile.free, [1, 0, 1, 0], atol=1e-6)


def test_weakly_dominated_action_vanishes():
    res = track_first_equilibrium(games.weakly_dominated())
    assert res.profile.values[1] < 1e-4         # row's B
    assert res.classification.verdict.is_nash


def test_beer_quiche_endpoint_is_nash():
    res = track_first_equilibrium(games.beer_quiche())
    assert res.classification.verdict.is_nash


def test_uniform_start_is_the_eps_one_solution():
    net = games.coordination()
    assert np.allclose(residual_F_eps(net, Profile.uniform(net), 1.0), 0.0)


def test_f_epsilon_requires_positive_eps():
    net = games.coordination()
    with pytest.raises(ValueError):
        f_epsilon(net, Profile.uniform(net), 0.0)


@given(nets_with_profiles(), st.sampled_from([0.9, 0.5, 0.1]))
def test_jacobian_matches_central_differences(pair, eps):
    net, prof = pair
    lay = net.layout
    fc = lay.free_coords
    if len(fc) == 0:
        return
    jac = jacobian_F_eps(net, prof, eps)
    h = 1e-6
    for c, j in enumerate(fc):
        up, dn = prof.values.copy(), prof.values.copy()
        up[j] += h
        dn[j] -= h
        fd = (residual_F_eps(net, Profile(net, up), eps) - residual_F_eps(net, Profile(net, dn), eps)) / (2 * h)
        scale = max(1.0, float(np.max(np.abs(fd))))
        assert np.max(np.abs(jac[:, c] - fd)) <= 1e-4 * scale


@settings(max_examples=30)
@given(bimatrices())
def test_random_bimatrix_endpoints_are_nash(net):
    res = track_first_equilibrium(net)
    assert is_nash_prop3(net, res.profile, 1e-6).is_nash


def test_trace_lines_have_t_step_residual_and_coordinates():
    buf = io.StringIO()
    track_first_equilibrium(games.matching_pennies(), trace=buf)
    lines = buf.getvalue().splitlines()
    assert lines
    ts = [float(line.split()[0]) for line in lines]
    assert all(b > a for a, b in zip(ts, ts[1:]))
    assert all(len(line.split()) == 3 + 4 for line in lines)


def test_same_seed_same_path():
    a = track_first_equilibrium(games.beer_quiche(), TrackerConfig(rng_seed=3))
    b = track_first_equilibrium(games.beer_quiche(), TrackerConfig(rng_seed=3))
    assert np.array_equal(a.profile.values, b.profile.values)
    assert [p.t for p in a.path.points] == [p.t for p in b.path.points]


def test_perturbation_keeps_reference_entries():
    net = games.beer_quiche()
    pert = perturb_payoffs(net, 1e-3, np.random.default_rng(0))
    for t, s in zip(net.potentials, pert.potentials):
        ref = net.nodes[t.node].reference
        assert np.all(s.weights[ref] == 1.0)
        assert np.allclose(s.weights, t.weights, rtol=1.01e-3)


def test_decomposed_matches_joint():
    net = games.disjoint_union(games.matching_pennies(), games.coordination())
    joint = track_first_equilibrium(net)
    split = first_equilibrium_decomposed(net)
    assert np.max(np.abs(joint.profile.values - split.profile.values)) <= 1e-8
    assert len(split.components) == 2


def test_three_games_report_per_component_runs():
    net = games.disjoint_union(games.matching_pennies(), games.coordination(), games.dominance())
    res = first_equilibrium_decomposed(net)
    assert len(res.components) == 3
    assert all(r.accepted_steps > 0 and r.seconds >= 0 for r in res.components)
    assert is_nash_prop3(net, res.profile).is_nash


def test_single_component_decomposition_is_identical():
    net = games.coordination()
    assert np.array_equal(track_first_equilibrium(net).profile.values,
                          first_equilibrium_decomposed(net).profile.values)
