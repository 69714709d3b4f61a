"""Split a net into strategically independent pieces.

Two nodes share a component when any probability arc or any player's
utility arc joins them. This never separates nodes that interact, but it
does not look for independence that only holds given a separator.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import GNet, InfoSet, PotentialTable, check


@dataclass(frozen=True)
class Component:
    nodes: tuple[int, ...]
    info_sets: tuple[InfoSet, ...]
    free_coordinates: tuple[int, ...]


def decompose(net: GNet) -> list[Component]:
    n = len(net.nodes)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for k, node in enumerate(net.nodes):
        for m in node.parents:
            union(k, m)
    for _, a, b in net.uarcs:
        union(a, b)
    for t in net.potentials:
        for m in t.neighbors:
            union(t.node, m)
    groups: dict[int, list[int]] = {}
    for k in range(n):
        groups.setdefault(find(k), []).append(k)
    lay = net.layout
    out = []
    for root in sorted(groups):
        members = tuple(groups[root])
        mset = set(members)
        blocks = [b for b in lay.blocks if b.node in mset]
        free = tuple(j for b in blocks if b.free for j in range(b.start, b.stop))
        out.append(Component(members, tuple(b.info_set for b in blocks), free))
    return out


def project(net: GNet, comp: Component) -> GNet:
    """The sub-net induced by the component's nodes, with tables restricted to them."""
    keep = list(comp.nodes)
    remap = {k: i for i, k in enumerate(keep)}
    nodes = []
    for k in keep:
        nd = net.nodes[k]
        nodes.append(type(nd)(nd.name, nd.player, nd.domain, tuple(remap[m] for m in nd.parents),
                              nd.reference, dict(nd.available)))
    uarcs = tuple((pl, remap[a], remap[b]) for pl, a, b in net.uarcs if a in remap and b in remap)
    tables = tuple(PotentialTable(t.player, remap[t.node], tuple(remap[m] for m in t.neighbors), t.weights)
                   for t in net.potentials if t.node in remap)
    cpts = {remap[k]: c for k, c in net.cpts.items() if k in remap}
    return check(GNet(tuple(nodes), net.players, uarcs, tables, cpts))


def embed(net: GNet, sub: GNet, sub_values: np.ndarray, into: np.ndarray) -> np.ndarray:
    """Copy a projected net's decision blocks back into the joint profile vector."""
    lay, slay = net.layout, sub.layout
    for b in slay.blocks:
        if b.nature:
            continue
        node = sub.nodes[b.node]
        k = net.index(node.name)
        jb = lay.block_of(k, b.parent_values)
        into[jb.start:jb.stop] = sub_values[b.start:b.stop]
    return into
