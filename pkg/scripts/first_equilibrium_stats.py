"""Run the first-equilibrium tracker on random bimatrix games and summarise the outcomes."""
import argparse
from collections import Counter
from dataclasses import dataclass

import numpy as np

from gnets import games, track_first_equilibrium


@dataclass
class Config:
    games: int = 200
    rows: int = 2
    cols: int = 2
    seed: int = 0
    low: float = 1.0
    high: float = 2.0


def main():
    cfg = Config()
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(cfg).items():
        ap.add_argument(f"--{name}", type=type(default), default=default)
    cfg = Config(**vars(ap.parse_args()))

    rng = np.random.default_rng(cfg.seed)
    labels, steps, secs, perturbed = Counter(), [], [], 0
    for _ in range(cfg.games):
        net = games.random_bimatrix(rng, cfg.low, cfg.high, shape=(cfg.rows, cfg.cols))
        res = track_first_equilibrium(net)
        labels[res.classification.label.value] += 1
        steps.append(res.path.accepted)
        secs.append(res.seconds)
        perturbed += res.perturbed
    print(f"games: {cfg.games} ({cfg.rows}x{cfg.cols})")
    for lab, n in sorted(labels.items()):
        print(f"label {lab}: {n}")
    print(f"perturbed retries: {perturbed}")
    print(f"accepted steps: median {np.median(steps):.0f}, max {max(steps)}")
    print(f"seconds: mean {np.mean(secs):.4f}, max {max(secs):.4f}")


if __name__ == "__main__":
    main()
