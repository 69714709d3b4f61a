from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import GNet

BLOCK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Profile:
    """Behavior profile: one conditional distribution per information set.

    ``values`` is the flat vector laid out by ``net.layout``; Nature blocks
    always carry the net's CPT rows.
    """

    net: GNet
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.net.layout.n,):
            raise ValueError(f"profile needs {self.net.layout.n} entries, got {v.shape}")
        object.__setattr__(self, "values", v)

    @classmethod
    def uniform(cls, net: GNet) -> "Profile":
        return cls(net, net.layout.base.copy())

    @classmethod
    def from_free(cls, net: GNet, free) -> "Profile":
        v = net.layout.base.copy()
        v[net.layout.free_coords] = np.asarray(free, dtype=float)
        return cls(net, v)

    @classmethod
    def from_blocks(cls, net: GNet, dists: dict) -> "Profile":
        """Build from {block: {value: prob}}; blocks not named stay uniform.

        A block is a node name, a label such as ``"Drink|Type=S"``, or a
        pair ``(node name, ((parent, value), ...))``.
        """
        lay = net.layout
        v = lay.base.copy()
        for key, dist in dists.items():
            if isinstance(key, tuple):
                name, parent_vals = key[0], dict(key[1])
            elif "|" in key:
                name, cond = key.split("|", 1)
                parent_vals = dict(item.strip().split("=", 1) for item in cond.split(",") if item.strip())
                name = name.strip()
            else:
                name, parent_vals = key, {}
            k = net.index(name)
            node = net.nodes[k]
            pv = net.event(parent_vals)
            h = tuple(pv[m] for m in node.parents)
            b = lay.block_of(k, h)
            if b.nature:
                raise ValueError(f"{name} is a Nature node; its CPT is fixed")
            row = np.zeros(len(b.actions))
            for val, prob in dist.items():
                a = net._value_index(k, val)
                if a not in b.actions:
                    raise ValueError(f"{val!r} is not available at {name}{h}")
                row[b.actions.index(a)] = float(prob)
            v[b.start:b.stop] = row
        return cls(net, v)

    @property
    def free(self) -> np.ndarray:
        return self.values[self.net.layout.free_coords]

    def block(self, i: int) -> np.ndarray:
        b = self.net.layout.blocks[i]
        return self.values[b.start:b.stop]

    def problems(self) -> list[str]:
        lay = self.net.layout
        out = []
        for i, b in enumerate(lay.blocks):
            row = self.values[b.start:b.stop]
            label = describe_block(self.net, i)
            if np.any(row < -BLOCK_TOL) or np.any(row > 1 + BLOCK_TOL):
                out.append(f"{label}: entries outside [0, 1]")
            if abs(row.sum() - 1.0) > BLOCK_TOL:
                out.append(f"{label}: block sums to {row.sum():.17g}")
            if b.nature and not np.array_equal(row, lay.base[b.start:b.stop]):
                out.append(f"{label}: Nature block differs from CPT")
        return out

    def is_interior(self) -> bool:
        return bool(np.all(self.values[self.net.layout.decision_coords] > 0))

    def distance(self, other: "Profile") -> float:
        return float(np.max(np.abs(self.values - other.values), initial=0.0))


def describe_block(net: GNet, i: int) -> str:
    b = net.layout.blocks[i]
    node = net.nodes[b.node]
    if not node.parents:
        return node.name
    cond = ", ".join(f"{net.nodes[m].name}={net.nodes[m].domain[v]}"
                     for m, v in zip(node.parents, b.parent_values))
    return f"{node.name} | {cond}"
