"""Curvature of M_{z^m} on the Bergman space, split along the L_{m,k} lines.

Prints, for each m, the curvatures at the origin computed three ways
(series, finite differences, closed form) and the eigenvalues of the
power-frame curvature matrix at a few points off the origin.

    python3 scripts/bergman_power_table.py --max-m 6 --radius 0.6
"""
import argparse
from dataclasses import dataclass

import numpy as np

from hilmod import KernelSpec
from hilmod.geometry import (
    bundle_curvature,
    derived_reducing_curvature,
    fd_line_curvature,
    power_frame,
    reducing_curvatures,
)
from hilmod.shifts import restriction_shift, shift_kernel_metric


@dataclass
class Config:
    max_m: int = 6
    alpha: float = 0.0
    radius: float = 0.6
    points: int = 4
    terms: int = 200


def main(cfg: Config):
    spec = KernelSpec.bergman(cfg.alpha)
    print("m  k  series          fd              -(m+k+1)/(k+1)")
    for m in range(1, cfg.max_m + 1):
        rc = reducing_curvatures(spec, m, terms=cfg.terms)
        for k, v in enumerate(rc.values):
            g = shift_kernel_metric(restriction_shift(spec, m, k, cfg.terms), cfg.terms)
            print(f"{m:<2} {k:<2} {v:<15.10f} {fd_line_curvature(g, 0.0):<15.10f} {derived_reducing_curvature(m, k):.10f}")
        print(f"   verdict: {rc.verdict.value}")
    print()
    print("eigenvalues of the power-frame curvature along the real axis")
    for m in range(2, cfg.max_m + 1):
        frame = power_frame(spec, m, cfg.terms)
        for r in np.linspace(0, cfg.radius, cfg.points):
            eig = bundle_curvature(frame, r).eigenvalues
            print(f"m={m} |w|={r:.3f} " + " ".join(f"{e:10.5f}" for e in eig))


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--max-m", type=int, default=Config.max_m)
    p.add_argument("--alpha", type=float, default=Config.alpha)
    p.add_argument("--radius", type=float, default=Config.radius)
    p.add_argument("--points", type=int, default=Config.points)
    main(Config(**{k: v for k, v in vars(p.parse_args()).items()}))
