"""Expected utilities, the value map v and the residual map F.

For a decision coordinate j = (k, x_k, H) with owner i = i(k):

    N_j = sum over states with x_PP(k) = H and node k at x_k of u^i(x) p(x)
    D_j = sum over states with x_PP(k) = H of u^i(x) p(x)

and v(p)_j = N_j / D_j. Nature blocks are frozen at their CPT rows.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import GNet
from .poly import Poly
from .profile import Profile


class BoundaryError(ValueError):
    """The operation needs a strictly interior profile."""


class UnreachableEvent(ValueError):
    """Conditioning event has probability zero under the profile."""


@dataclass(frozen=True)
class ValueDecomposition:
    numerator: float | Poly
    denominator: float | Poly


def _values(p) -> np.ndarray:
    return p.values if isinstance(p, Profile) else np.asarray(p)


def leave_one_out(net: GNet, values: np.ndarray) -> np.ndarray:
    """Per state and node: product of the state's profile entries except that node's."""
    lay = net.layout
    f = values[lay.idx]                                  # (S, nodes)
    ns, nn = f.shape
    out = np.ones_like(f)
    prefix = np.ones(ns, dtype=f.dtype)
    for k in range(nn):
        out[:, k] = prefix
        prefix = prefix * f[:, k]
    suffix = np.ones(ns, dtype=f.dtype)
    for k in range(nn - 1, -1, -1):
        out[:, k] *= suffix
        suffix = suffix * f[:, k]
    return out


def deviation_values(net: GNet, values: np.ndarray) -> np.ndarray:
    """N_j with the factor p_j removed, for every decision coordinate (0 elsewhere).

    This is the expected utility mass of playing x_k at H against the rest of
    the profile, defined even where p_j = 0.
    """
    lay = net.layout
    loo = leave_one_out(net, values)
    out = np.zeros(lay.n, dtype=loo.dtype)
    for k, owner in enumerate(lay.owners):
        if owner is None or len(lay.idx) == 0:
            continue
        w = lay.utilities[owner] * loo[:, k]
        out += _bincount(lay.idx[:, k], w, lay.n)
    return out


def _bincount(index, weights, n):
    if np.iscomplexobj(weights):
        return (np.bincount(index, weights.real, minlength=n)
                + 1j * np.bincount(index, weights.imag, minlength=n))
    return np.bincount(index, weights, minlength=n)


def block_sums(net: GNet, vec: np.ndarray) -> np.ndarray:
    """Sum vec within each block and broadcast back to coordinates."""
    lay = net.layout
    sums = _bincount(lay.coord_block, vec, len(lay.blocks))
    return sums[lay.coord_block]


def numerators_denominators(net: GNet, values: np.ndarray):
    """(N, D) per coordinate; D is broadcast over the coordinate's block."""
    nt = deviation_values(net, values)
    lay = net.layout
    mask = np.zeros(lay.n, dtype=bool)
    mask[lay.decision_coords] = True
    n_ = np.where(mask, values * nt, 0.0)
    return n_, block_sums(net, n_)


def _require_interior(net: GNet, values: np.ndarray):
    lay = net.layout
    if np.any(values[lay.decision_coords] <= 0):
        raise BoundaryError("profile is on the simplex boundary; use value_decomposition")


def _event_mask(net: GNet, event) -> np.ndarray:
    ev = net.event(event)
    states = net.layout.states
    mask = np.ones(len(states), dtype=bool)
    for k, v in ev.items():
        mask &= states[:, k] == v
    return mask


def state_probabilities(net: GNet, p) -> np.ndarray:
    values = _values(p)
    return np.prod(values[net.layout.idx], axis=1)


def expected_utility(net: GNet, p, player: str, event=None) -> float:
    """u(p)(E) = sum_x u(x) p(x | E)."""
    probs = state_probabilities(net, p)
    mask = _event_mask(net, event)
    pe = probs[mask].sum()
    if pe <= 0:
        raise UnreachableEvent(f"event {event} has probability zero")
    return float((net.layout.utilities[player][mask] * probs[mask]).sum() / pe)


def conditional_eu(net: GNet, p, player: str, f_event, e_event) -> float:
    """u(p)(F | E) = u(p)(E and F) / u(p)(E)."""
    e = net.event(e_event)
    f = net.event(f_event)
    for k, v in f.items():
        if k in e and e[k] != v:
            raise UnreachableEvent("E and F are disjoint")
    both = {**e, **f}
    return expected_utility(net, p, player, both) / expected_utility(net, p, player, e)


def value_map(net: GNet, p: Profile) -> Profile:
    """v(p): each decision entry becomes N_j / D_j.

    Blocks with D_j = 0 (unreachable through zero Nature probabilities) keep p.
    """
    values = _values(p)
    _require_interior(net, values)
    out = values.copy()
    num, den = numerators_denominators(net, values)
    dc = net.layout.decision_coords
    ok = den[dc] > 0
    out[dc[ok]] = num[dc[ok]] / den[dc[ok]]
    return Profile(net, out)


def residual_F(net: GNet, p) -> np.ndarray:
    """F(p) = p - v(p) over the free decision coordinates."""
    values = _values(p)
    v = value_map(net, Profile(net, values)).values
    fc = net.layout.free_coords
    return values[fc] - v[fc]


def value_decomposition(net: GNet, j: int, p=None) -> ValueDecomposition:
    """N_j and D_j, numerically at p or as polynomials in the free coordinates."""
    lay = net.layout
    if lay.owners[lay.blocks[lay.coord_block[j]].node] is None:
        raise ValueError(f"coordinate {j} belongs to a Nature block")
    if p is not None:
        num, den = numerators_denominators(net, _values(p))
        return ValueDecomposition(float(num[j]), float(den[j]))
    polys = symbolic_decomposition(net)
    b = lay.blocks[lay.coord_block[j]]
    den = Poly(len(lay.free_coords))
    for c in range(b.start, b.stop):
        den = den + polys[c]
    return ValueDecomposition(polys[j], den)


def symbolic_decomposition(net: GNet) -> dict[int, Poly]:
    """N_j as a polynomial in the free coordinates, for every decision coordinate j."""
    cache = net.__dict__.get("_symbolic_n")
    if cache is not None:
        return cache
    lay = net.layout
    nv = len(lay.free_coords)
    var_of = {int(c): i for i, c in enumerate(lay.free_coords)}
    acc: dict[int, dict] = {int(j): {} for j in lay.decision_coords}
    for s in range(len(lay.states)):
        row = lay.idx[s]
        const = 1.0
        mono = [0] * nv
        for c in row:
            c = int(c)
            if c in var_of:
                mono[var_of[c]] += 1
            else:
                const *= lay.base[c]
        if const == 0.0:
            continue
        mono = tuple(mono)
        for k, owner in enumerate(lay.owners):
            if owner is None:
                continue
            terms = acc[int(row[k])]
            terms[mono] = terms.get(mono, 0.0) + const * lay.utilities[owner][s]
    out = {j: Poly(nv, t) for j, t in acc.items()}
    net.__dict__["_symbolic_n"] = out
    return out
