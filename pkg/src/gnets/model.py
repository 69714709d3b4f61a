"""Game networks: graph structure, potential tables, Nature CPTs.

A net is a DAG of probability arcs over finitely-valued nodes, each node
owned by a player or by Nature, plus per-player undirected utility arcs.
Utilities are stored as multiplicative potentials anchored at a reference
state, so the reference state always has utility exactly 1.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

NATURE = "nature"
CPT_TOL = 1e-12


class InvalidNet(ValueError):
    """Raised when a net fails structural validation."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


@dataclass(frozen=True)
class Violation:
    rule: str
    where: str
    message: str

    def __str__(self):
        return f"[{self.rule}] {self.where}: {self.message}"


@dataclass(frozen=True)
class GNode:
    name: str
    player: str
    domain: tuple[str, ...]
    parents: tuple[int, ...] = ()
    reference: int = 0
    # parent assignment -> allowed value indices; missing keys allow everything
    available: Mapping[tuple[int, ...], tuple[int, ...]] = field(default_factory=dict)

    @property
    def is_nature(self) -> bool:
        return self.player == NATURE

    def actions_at(self, parent_values: tuple[int, ...]) -> tuple[int, ...]:
        return self.available.get(parent_values, tuple(range(len(self.domain))))


@dataclass(frozen=True)
class PotentialTable:
    """w^player(x_node | x_neighbors); weights has shape (|X_node|, *neighbor sizes)."""

    player: str
    node: int
    neighbors: tuple[int, ...]
    weights: np.ndarray


@dataclass(frozen=True)
class InfoSet:
    node: int
    parent_values: tuple[int, ...]


@dataclass(frozen=True)
class Block:
    """One conditional distribution p(. | H) inside the flat profile vector."""

    node: int
    parent_values: tuple[int, ...]
    actions: tuple[int, ...]
    start: int
    nature: bool

    @property
    def stop(self) -> int:
        return self.start + len(self.actions)

    @property
    def free(self) -> bool:
        return not self.nature and len(self.actions) > 1

    @property
    def info_set(self) -> InfoSet:
        return InfoSet(self.node, self.parent_values)


@dataclass(frozen=True)
class GNet:
    nodes: tuple[GNode, ...]
    players: tuple[str, ...]
    uarcs: tuple[tuple[str, int, int], ...] = ()
    potentials: tuple[PotentialTable, ...] = ()
    # node index -> array of shape (*parent sizes, |X_node|)
    cpts: Mapping[int, np.ndarray] = field(default_factory=dict)

    # -- lookups ---------------------------------------------------------
    def index(self, name: str) -> int:
        try:
            return self._names[name]
        except KeyError:
            raise KeyError(f"unknown node {name!r}") from None

    @cached_property
    def _names(self) -> dict[str, int]:
        return {n.name: k for k, n in enumerate(self.nodes)}

    def utility_neighbors(self, player: str, k: int) -> tuple[int, ...]:
        out = set()
        for pl, a, b in self.uarcs:
            if pl != player:
                continue
            if a == k:
                out.add(b)
            elif b == k:
                out.add(a)
        return tuple(sorted(out))

    def tables_for(self, player: str) -> list[PotentialTable]:
        return [t for t in self.potentials if t.player == player]

    @property
    def reference(self) -> tuple[int, ...]:
        return tuple(n.reference for n in self.nodes)

    @property
    def decision_nodes(self) -> list[int]:
        return [k for k, n in enumerate(self.nodes) if not n.is_nature]

    def is_gframe(self) -> bool:
        return all(k not in self.cpts for k in self.decision_nodes)

    def parent_assignments(self, k: int) -> list[tuple[int, ...]]:
        sizes = [len(self.nodes[m].domain) for m in self.nodes[k].parents]
        return list(itertools.product(*(range(s) for s in sizes)))

    def assignment(self, x) -> tuple[int, ...]:
        """Normalize a full assignment given as indices or as {node: label}."""
        if isinstance(x, Mapping):
            missing = [n.name for n in self.nodes if n.name not in x]
            if missing:
                raise ValueError(f"assignment missing nodes {missing}")
            return tuple(self._value_index(k, x[n.name]) for k, n in enumerate(self.nodes))
        x = tuple(int(v) for v in x)
        if len(x) != len(self.nodes):
            raise ValueError(f"expected {len(self.nodes)} values, got {len(x)}")
        return x

    def event(self, e: Mapping | None) -> dict[int, int]:
        """Normalize a partial assignment {node name or index: label or index}."""
        if not e:
            return {}
        out = {}
        for key, val in e.items():
            k = key if isinstance(key, int) else self.index(key)
            out[k] = self._value_index(k, val)
        return out

    def _value_index(self, k: int, val) -> int:
        if isinstance(val, (int, np.integer)):
            return int(val)
        try:
            return self.nodes[k].domain.index(val)
        except ValueError:
            raise ValueError(f"{val!r} is not a value of node {self.nodes[k].name}") from None

    def with_potentials(self, potentials: Iterable[PotentialTable]) -> "GNet":
        return replace(self, potentials=tuple(potentials))

    # -- cached compiled structure ---------------------------------------
    @cached_property
    def layout(self) -> "Layout":
        return Layout(self)


def topological_order(net: GNet) -> list[int] | None:
    """Kahn's algorithm over probability arcs; None if there is a cycle."""
    n = len(net.nodes)
    indeg = [0] * n
    children = [[] for _ in range(n)]
    for k, node in enumerate(net.nodes):
        for m in node.parents:
            if 0 <= m < n:
                indeg[k] += 1
                children[m].append(k)
    queue = [k for k in range(n) if indeg[k] == 0]
    order = []
    while queue:
        k = queue.pop(0)
        order.append(k)
        for c in children[k]:
            indeg[c] -= 1
            if indeg[c] == 0:
                queue.append(c)
    return order if len(order) == n else None


def validate(net: GNet) -> list[Violation]:
    """Return every structural violation; an empty list means the net is well formed."""
    out: list[Violation] = []
    n = len(net.nodes)
    names = [nd.name for nd in net.nodes]
    for name in set(names):
        if names.count(name) > 1:
            out.append(Violation("unique", name, "duplicate node name"))
    known_players = set(net.players)
    for k, node in enumerate(net.nodes):
        where = f"node {node.name}"
        if not node.is_nature and node.player not in known_players:
            out.append(Violation("player", where, f"unknown player {node.player!r}"))
        if len(node.domain) < 1:
            out.append(Violation("domain", where, "empty domain"))
        if len(set(node.domain)) != len(node.domain):
            out.append(Violation("domain", where, "duplicate domain values"))
        if not 0 <= node.reference < len(node.domain):
            out.append(Violation("reference", where, "reference value out of range"))
        if k in node.parents:
            out.append(Violation("acyclic", where, "node is its own probability parent"))
        if any(not 0 <= m < n for m in node.parents):
            out.append(Violation("parents", where, "unknown probability parent"))
        for h, acts in node.available.items():
            if not acts or any(not 0 <= a < len(node.domain) for a in acts):
                out.append(Violation("available", where, f"bad action set at {h}"))
    if any(not 0 <= m < n for nd in net.nodes for m in nd.parents):
        return out
    if topological_order(net) is None:
        out.append(Violation("acyclic", "probability arcs", "probability arcs contain a cycle"))

    for pl, a, b in net.uarcs:
        where = f"uarc {pl} {a}-{b}"
        if pl not in known_players:
            out.append(Violation("player", where, f"unknown player {pl!r}"))
        if a == b:
            out.append(Violation("uarc", where, "node is its own utility neighbor"))
        if not (0 <= a < n and 0 <= b < n):
            out.append(Violation("uarc", where, "unknown node"))

    seen = set()
    for t in net.potentials:
        where = f"potential {t.player} {net.nodes[t.node].name if 0 <= t.node < n else t.node}"
        if t.player not in known_players:
            out.append(Violation("player", where, f"unknown or Nature player {t.player!r}"))
            continue
        if (t.player, t.node) in seen:
            out.append(Violation("unique", where, "duplicate potential table"))
        seen.add((t.player, t.node))
        un = set(net.utility_neighbors(t.player, t.node))
        stray = [m for m in t.neighbors if m not in un]
        if stray:
            out.append(Violation("uarc", where, f"neighbors {stray} lack a utility arc"))
            continue
        shape = (len(net.nodes[t.node].domain),) + tuple(len(net.nodes[m].domain) for m in t.neighbors)
        w = np.asarray(t.weights, dtype=float)
        if w.shape != shape:
            out.append(Violation("complete", where, f"table shape {w.shape} != {shape}"))
            continue
        if np.any(np.isnan(w)):
            out.append(Violation("complete", where, "missing potential entries"))
            continue
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            out.append(Violation("positivity", where, "potential entries must be > 0"))
        ref = net.nodes[t.node].reference
        if np.any(w[ref] != 1.0):
            out.append(Violation("reference", where, "entries at the reference value must equal 1"))

    for k, node in enumerate(net.nodes):
        if node.is_nature:
            if k not in net.cpts:
                out.append(Violation("cpt", f"node {node.name}", "Nature node without CPT"))
                continue
            c = np.asarray(net.cpts[k], dtype=float)
            shape = tuple(len(net.nodes[m].domain) for m in node.parents) + (len(node.domain),)
            if c.shape != shape:
                out.append(Violation("cpt", f"node {node.name}", f"CPT shape {c.shape} != {shape}"))
                continue
            if np.any(c < 0) or np.any(np.abs(c.sum(axis=-1) - 1.0) > CPT_TOL):
                out.append(Violation("cpt", f"node {node.name}", "CPT rows must be distributions"))
    for k in net.cpts:
        if not 0 <= k < n or not net.nodes[k].is_nature:
            out.append(Violation("cpt", f"node {k}", "CPT attached to a decision node"))
    return out


def check(net: GNet) -> GNet:
    violations = validate(net)
    if violations:
        raise InvalidNet(violations)
    return net


class Layout:
    """Flat profile indexing plus the enumerated state space of a net.

    Profile coordinates are grouped in blocks, one per (node, parent
    assignment). Decision blocks only hold available actions; Nature
    blocks hold the full CPT row.
    """

    def __init__(self, net: GNet):
        self.net = net
        blocks = []
        start = 0
        self.coord_block: list[int] = []
        self.coord_value: list[int] = []
        self._lookup: dict[tuple[int, tuple[int, ...]], int] = {}
        for k, node in enumerate(net.nodes):
            for h in net.parent_assignments(k):
                acts = tuple(range(len(node.domain))) if node.is_nature else node.actions_at(h)
                b = Block(k, h, acts, start, node.is_nature)
                self._lookup[(k, h)] = len(blocks)
                blocks.append(b)
                self.coord_block.extend([len(blocks) - 1] * len(acts))
                self.coord_value.extend(acts)
                start += len(acts)
        self.blocks: tuple[Block, ...] = tuple(blocks)
        self.n = start
        self.coord_block = np.array(self.coord_block, dtype=int)
        self.coord_value = np.array(self.coord_value, dtype=int)
        self.free_blocks = [i for i, b in enumerate(blocks) if b.free]
        self.free_coords = np.array(
            [j for i in self.free_blocks for j in range(blocks[i].start, blocks[i].stop)], dtype=int
        )
        self.decision_coords = np.array(
            [j for b in blocks if not b.nature for j in range(b.start, b.stop)], dtype=int
        )
        self.base = self._base_values()
        self._enumerate_states()

    def block_of(self, k: int, h: tuple[int, ...]) -> Block:
        return self.blocks[self._lookup[(k, tuple(h))]]

    def block_index(self, k: int, h: tuple[int, ...]) -> int:
        return self._lookup[(k, tuple(h))]

    def coord(self, k: int, h: tuple[int, ...], value: int) -> int | None:
        b = self.block_of(k, h)
        try:
            return b.start + b.actions.index(value)
        except ValueError:
            return None

    def _base_values(self) -> np.ndarray:
        """Nature entries from CPTs, fixed single-action blocks at 1, free blocks uniform."""
        v = np.zeros(self.n)
        for b in self.blocks:
            if b.nature:
                v[b.start:b.stop] = np.asarray(self.net.cpts[b.node], dtype=float)[b.parent_values]
            else:
                v[b.start:b.stop] = 1.0 / len(b.actions)
        return v

    def _enumerate_states(self):
        net = self.net
        nn = len(net.nodes)
        sizes = [len(nd.domain) for nd in net.nodes]
        total = math.prod(sizes)
        if total > 2_000_000:
            raise ValueError(f"state space too large to enumerate ({total})")
        states = []
        idx = []
        for x in itertools.product(*(range(s) for s in sizes)):
            row = []
            for k, node in enumerate(net.nodes):
                h = tuple(x[m] for m in node.parents)
                j = self.coord(k, h, x[k])
                if j is None or (node.is_nature and self.base[j] == 0.0):
                    break
                row.append(j)
            else:
                states.append(x)
                idx.append(row)
        self.states = np.array(states, dtype=int).reshape(len(states), nn)
        self.idx = np.array(idx, dtype=int).reshape(len(states), nn)
        self.utilities = {pl: utility_array(net, pl, self.states) for pl in net.players}
        owners = []
        for k, node in enumerate(net.nodes):
            owners.append(None if node.is_nature else node.player)
        self.owners = owners


def utility_array(net: GNet, player: str, states: np.ndarray) -> np.ndarray:
    u = np.ones(len(states))
    for t in net.tables_for(player):
        w = np.asarray(t.weights, dtype=float)
        cols = (states[:, t.node],) + tuple(states[:, m] for m in t.neighbors)
        u *= w[cols]
    return u


# -- operations --------------------------------------------------------------

def utility(net: GNet, player: str, x) -> float:
    """u^player(x) as the product of the player's potential entries at x."""
    if player == NATURE:
        raise ValueError("Nature has no utility")
    if player not in net.players:
        raise KeyError(f"unknown player {player!r}")
    x = np.array([net.assignment(x)])
    return float(utility_array(net, player, x)[0])


def joint_probability(net: GNet, p, x) -> float:
    """Product rule: prod_k p(x_k | x_parents(k))."""
    values = np.asarray(getattr(p, "values", p), dtype=float)
    lay = net.layout
    if values.shape != (lay.n,):
        raise ValueError(f"profile has {values.shape} entries, expected {lay.n}")
    x = net.assignment(x)
    prob = 1.0
    for k, node in enumerate(net.nodes):
        j = lay.coord(k, tuple(x[m] for m in node.parents), x[k])
        if j is None:
            return 0.0
        prob *= values[j]
    return prob


def information_sets(net: GNet) -> list[InfoSet]:
    return [b.info_set for b in net.layout.blocks]


def parameter_count(net: GNet) -> tuple[int, int]:
    """(free potential entries, leaf payoffs of the equivalent extensive form)."""
    pot = 0
    for t in net.potentials:
        size = len(net.nodes[t.node].domain)
        pot += (size - 1) * math.prod(len(net.nodes[m].domain) for m in t.neighbors)
    players = [p for p in net.players if net.tables_for(p) or any(
        not nd.is_nature and nd.player == p for nd in net.nodes)]
    if not players:
        return pot, 0
    leaves = math.prod(len(nd.domain) for nd in net.nodes)
    return pot, leaves * len(players)


def potential_table(net: GNet, player: str, node: str | int, neighbors: Sequence[str | int],
                    entries: Mapping) -> PotentialTable:
    """Build a table from {(value, (neighbor values...)): weight}; reference entries default to 1.

    Keys may use labels or indices. Non-reference entries that are missing
    are left as NaN so validation reports the table as incomplete.
    """
    k = node if isinstance(node, int) else net.index(node)
    nbrs = tuple(m if isinstance(m, int) else net.index(m) for m in neighbors)
    shape = (len(net.nodes[k].domain),) + tuple(len(net.nodes[m].domain) for m in nbrs)
    w = np.full(shape, np.nan)
    w[net.nodes[k].reference] = 1.0
    for (val, hv), weight in entries.items():
        hv = hv if isinstance(hv, tuple) else (hv,) if nbrs else ()
        key = (net._value_index(k, val),) + tuple(net._value_index(m, v) for m, v in zip(nbrs, hv))
        w[key] = float(weight)
    return PotentialTable(player, k, nbrs, w)
