"""Pairwise equivalence/similarity verdicts between restricted Bergman shifts.

    python3 scripts/similarity_table.py --m 3 --depth 512
"""
import argparse
from dataclasses import dataclass

from hilmod import KernelSpec
from hilmod.shifts import restriction_shift, unitarily_equivalent


@dataclass
class Config:
    m: int = 3
    depth: int = 512
    alpha: float = 0.0


def main(cfg: Config):
    spec = KernelSpec.bergman(cfg.alpha)
    shifts = {"M_z": restriction_shift(spec, 1, 0)}
    shifts["hardy"] = restriction_shift(KernelSpec.hardy(), 1, 0)
    for k in range(cfg.m):
        shifts[f"T{k}"] = restriction_shift(spec, cfg.m, k)
    names = list(shifts)
    width = max(len(n) for n in names) + 2
    for a in names:
        for b in names:
            if a >= b:
                continue
            v = unitarily_equivalent(shifts[a], shifts[b], cfg.depth)
            lo, hi = v.bounds
            print(f"{a:<{width}}{b:<{width}}{v.verdict.value:<22} inf={lo:.6f} sup={hi:.6g}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--m", type=int, default=Config.m)
    p.add_argument("--depth", type=int, default=Config.depth)
    p.add_argument("--alpha", type=float, default=Config.alpha)
    main(Config(**vars(p.parse_args())))
