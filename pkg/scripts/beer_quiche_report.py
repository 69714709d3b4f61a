"""Convert the bundled beer/quiche tree, solve it, and compare with support enumeration."""
import argparse
from dataclasses import dataclass

from gnets import SolveConfig, all_equilibria, ef_conversion, oracle_support_enumeration, parameter_count
from gnets.io import bundled, parse_ef


@dataclass
class Config:
    tol: float = 1e-6
    seed: int = 0


def main():
    cfg = Config()
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tol", type=float, default=cfg.tol)
    ap.add_argument("--seed", type=int, default=cfg.seed)
    cfg = Config(**vars(ap.parse_args()))

    with open(bundled("beer_quiche.ef"), encoding="utf-8") as fh:
        tree = parse_ef(fh.read())
    conv = ef_conversion(tree)
    print("parameter count (potentials, tree payoffs):", parameter_count(conv.net))

    rep = all_equilibria(conv.net, SolveConfig(seed=cfg.seed, tol=cfg.tol))
    print(f"paths: {rep.paths_tracked}, Nash profiles: {len(rep.nash)}")
    for i, p in enumerate(rep.nash):
        print(f"equilibrium {i}:")
        for label, dist in conv.tree_strategies(p.values).items():
            print(f"  {label}: " + ", ".join(f"{a}={x:.4f}" for a, x in dist.items()))

    agent = tree.agent_form()
    pieces = oracle_support_enumeration(agent)
    print(f"oracle pieces: {len(pieces)}")
    for pc in pieces:
        print(f"  support {pc.support} params={len(pc.params)}")
    sols = []
    for p in rep.nash:
        ts = conv.tree_strategies(p.values)
        sols.append([[ts[a.label][x] for x in a.actions] for a in agent.agents])
    stray = [s for s in sols if not any(pc.contains(s, cfg.tol) for pc in pieces)]
    missed = [pc for pc in pieces if not any(pc.contains(s, cfg.tol) for s in sols)]
    print(f"stray solver profiles: {len(stray)}, oracle pieces missed: {len(missed)}")


if __name__ == "__main__":
    main()
