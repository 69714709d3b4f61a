"""Small games used as fixtures, examples and random test inputs."""
from __future__ import annotations

import numpy as np

from .model import NATURE, GNet, GNode, PotentialTable, check, potential_table


def bimatrix(a, b, rows=("A", "B"), cols=("A", "B"), names=("R", "C"), players=("1", "2")) -> GNet:
    """Simultaneous two-player game from strictly positive payoff matrices.

    Payoffs are rescaled so the first row/column cell is the reference state.
    Each player gets w(C) and w(R | C) tables.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a <= 0) or np.any(b <= 0):
        raise ValueError("payoffs must be strictly positive")
    r_name, c_name = names
    nodes = (GNode(r_name, players[0], tuple(rows)), GNode(c_name, players[1], tuple(cols)))
    uarcs = tuple((pl, 0, 1) for pl in players)
    tables = []
    for pl, m in zip(players, (a, b)):
        m = m / m[0, 0]
        tables.append(PotentialTable(pl, 1, (), m[0, :].copy()))
        tables.append(PotentialTable(pl, 0, (1,), m / m[0, :][None, :]))
    return check(GNet(nodes, tuple(players), uarcs, tuple(tables)))


def matching_pennies() -> GNet:
    """Row wants to match, column wants to mismatch; payoffs 1 vs 0.5 (and 1 vs 2 normalized)."""
    a = [[1.0, 0.5], [0.5, 1.0]]
    b = [[0.5, 1.0], [1.0, 0.5]]
    return bimatrix(a, b, rows=("H", "T"), cols=("H", "T"))


def coordination() -> GNet:
    """u(A,A) = 3, u(B,B) = 2, miscoordination 1, for both players."""
    m = [[3.0, 1.0], [1.0, 2.0]]
    return bimatrix(m, m)


def dominance() -> GNet:
    """Prisoner's-dilemma payoffs shifted positive; D strictly dominant for both."""
    a = [[3.0, 1.0], [4.0, 2.0]]
    return bimatrix(a, np.transpose(a), rows=("C", "D"), cols=("C", "D"))


def weakly_dominated() -> GNet:
    """Row's B ties A when column plays L and loses otherwise; column prefers L only against B."""
    a = [[1.0, 2.0], [1.0, 1.0]]
    b = [[1.0, 1.0], [2.0, 1.0]]
    return bimatrix(a, b, cols=("L", "R"))


def random_bimatrix(rng: np.random.Generator, low=1.0, high=2.0, shape=(2, 2)) -> GNet:
    a = rng.uniform(low, high, size=shape)
    b = rng.uniform(low, high, size=shape)
    rows = tuple(f"r{i}" for i in range(shape[0]))
    cols = tuple(f"c{i}" for i in range(shape[1]))
    return bimatrix(a, b, rows=rows, cols=cols)


def beer_quiche(prior_strong: float = 0.9) -> GNet:
    """Signaling game: Nature picks a type, player 1 orders, player 2 decides to fight."""
    nodes = (
        GNode("Type", NATURE, ("S", "W")),
        GNode("Drink", "1", ("B", "Q"), parents=(0,)),
        GNode("Fight", "2", ("N", "F"), parents=(1,)),
    )
    uarcs = (("1", 0, 1), ("1", 0, 2), ("2", 0, 2))
    cpts = {0: np.array([prior_strong, 1 - prior_strong])}
    net = GNet(nodes, ("1", "2"), uarcs, (), cpts)
    tables = [
        potential_table(net, "1", "Type", [], {("W", ()): 0.8}),
        potential_table(net, "1", "Drink", ["Type"], {("Q", "S"): 0.5, ("Q", "W"): 2.0}),
        potential_table(net, "1", "Fight", ["Type"], {("F", "S"): 0.4, ("F", "W"): 0.2}),
        potential_table(net, "2", "Type", [], {("W", ()): 1.2}),
        potential_table(net, "2", "Fight", ["Type"], {("F", "S"): 0.5, ("F", "W"): 2.0}),
    ]
    return check(net.with_potentials(tables))


def disjoint_union(*nets: GNet, prefixes=None) -> GNet:
    """Side-by-side copy of several nets; shared player names multiply their utilities."""
    prefixes = prefixes or [f"g{i}." for i in range(len(nets))]
    nodes, uarcs, tables, cpts, players = [], [], [], {}, []
    for net, pre in zip(nets, prefixes):
        off = len(nodes)
        for nd in net.nodes:
            nodes.append(GNode(pre + nd.name, nd.player, nd.domain, tuple(m + off for m in nd.parents),
                               nd.reference, dict(nd.available)))
        uarcs += [(pl, a + off, b + off) for pl, a, b in net.uarcs]
        tables += [PotentialTable(t.player, t.node + off, tuple(m + off for m in t.neighbors), t.weights)
                   for t in net.potentials]
        cpts.update({k + off: c for k, c in net.cpts.items()})
        players += [p for p in net.players if p not in players]
    return check(GNet(tuple(nodes), tuple(players), tuple(uarcs), tuple(tables), cpts))


def random_net(rng: np.random.Generator, max_nodes: int = 4, max_values: int = 3,
               n_players: int | None = None) -> GNet:
    """A random valid net: random DAG, owners, utility arcs, tables and CPTs."""
    n = int(rng.integers(1, max_nodes + 1))
    n_players = n_players or int(rng.integers(1, 3))
    players = tuple(str(i + 1) for i in range(n_players))
    nodes = []
    for k in range(n):
        size = int(rng.integers(2, max_values + 1))
        parents = tuple(int(m) for m in range(k) if rng.random() < 0.4)
        owner = NATURE if rng.random() < 0.25 else players[int(rng.integers(n_players))]
        nodes.append(GNode(f"X{k}", owner, tuple(f"v{i}" for i in range(size)), parents))
    uarcs = []
    for pl in players:
        for a in range(n):
            for b in range(a + 1, n):
                if rng.random() < 0.5:
                    uarcs.append((pl, a, b))
    net = GNet(tuple(nodes), players, tuple(uarcs))
    tables = []
    for pl in players:
        for k in range(n):
            if rng.random() < 0.3 and k > 0:
                continue
            nbrs = net.utility_neighbors(pl, k)
            shape = (len(nodes[k].domain),) + tuple(len(nodes[m].domain) for m in nbrs)
            w = rng.uniform(0.2, 3.0, size=shape)
            w[nodes[k].reference] = 1.0
            tables.append(PotentialTable(pl, k, nbrs, w))
    cpts = {}
    for k, nd in enumerate(nodes):
        if nd.is_nature:
            shape = tuple(len(nodes[m].domain) for m in nd.parents) + (len(nd.domain),)
            c = rng.uniform(0.1, 1.0, size=shape)
            cpts[k] = c / c.sum(axis=-1, keepdims=True)
    return check(GNet(tuple(nodes), players, tuple(uarcs), tuple(tables), cpts))


def random_interior_profile(net: GNet, rng: np.random.Generator):
    from .profile import Profile

    lay = net.layout
    v = lay.base.copy()
    for b in lay.blocks:
        if b.free:
            row = rng.uniform(0.05, 1.0, size=len(b.actions))
            v[b.start:b.stop] = row / row.sum()
    return Profile(net, v)
