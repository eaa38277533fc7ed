"""Radial sweep of the characteristic function for nilpotent Jordan blocks
and random contractions.

Shows |det Theta(z)| = |z|^d for the compressed shift and the largest
singular value staying below one.

    python3 scripts/charfn_sweep.py --dims 1 2 3 --random 5
"""
import argparse
from dataclasses import dataclass, field

import numpy as np

from hilmod.model import char_function, nilpotent_jordan


@dataclass
class Config:
    dims: list = field(default_factory=lambda: [1, 2, 3])
    radii: tuple = (0.0, 0.5, 0.9, 0.99, 0.999)
    random: int = 5
    seed: int = 0


def main(cfg: Config):
    for d in cfg.dims:
        J = nilpotent_jordan(d)
        for r in cfg.radii:
            z = r * np.exp(0.3j)
            s = char_function(J, z)
            print(f"jordan d={d} |z|={r:<6} |det|={s.abs_det:.12f} |z|^d={r ** d:.12f}")
    rng = np.random.default_rng(cfg.seed)
    for i in range(cfg.random):
        d = int(rng.integers(2, 5))
        A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        T = A / np.linalg.norm(A, 2) * 0.95
        top = max(char_function(T, r * np.exp(1j * t)).singular_values[0]
                  for r in cfg.radii for t in np.linspace(0, 2 * np.pi, 8))
        print(f"random #{i} d={d} max singular value over sweep = {top:.12f}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dims", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--random", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args()
    main(Config(dims=a.dims, random=a.random, seed=a.seed))
