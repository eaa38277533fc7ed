"""Quotient dimensions at the origin and their Hilbert-Samuel polynomials.

    python3 scripts/hilbert_samuel_table.py --k-max 7
"""
import argparse
from dataclasses import dataclass

from hilmod import KernelSpec
from hilmod.localization import hilbert_samuel, polynomial_module, vanishing_submodule


@dataclass
class Config:
    k_max: int = 7


def main(cfg: Config):
    D = cfg.k_max + 1
    cases = {
        "H2(disk)": polynomial_module(KernelSpec.hardy(), D),
        "Bergman(disk)": polynomial_module(KernelSpec.bergman(), D),
        "H2(bidisk)": polynomial_module(KernelSpec.hardy_polydisk(2), D),
        "H2(bidisk) x 2": polynomial_module(KernelSpec.hardy_polydisk(2), D).with_multiplicity(2),
        "H2_0(bidisk)": vanishing_submodule(KernelSpec.hardy_polydisk(2), 2, D),
        "H2(tridisk)": polynomial_module(KernelSpec.hardy_polydisk(3), D),
        "DA(3)": polynomial_module(KernelSpec.drury_arveson(3), D),
    }
    for name, mod in cases.items():
        fit = hilbert_samuel(mod, 0, cfg.k_max)
        print(f"{name:<16} dims={list(fit.dims)}  h(k) = {fit.poly}  (from k={fit.stable_from})")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--k-max", type=int, default=Config.k_max)
    main(Config(**vars(p.parse_args())))
