"""Quotient dimensions dim M / [I_omega^k M] on truncated polynomial modules.

A :class:`TruncatedModule` keeps the monomials of total degree <= D that
belong to the module, their (diagonal) Gram weights and the matrices of
multiplication by the coordinates.  The ideal power is spanned by
``(z - omega)^beta * b`` for ``|beta| = k`` and basis monomials ``b`` of degree
``<= D - k``; its rank is decided by SVD in orthonormal coordinates.

At ``omega = 0`` everything is monomial and the counts are exact.  At other
points the truncation under-approximates the closure, so results there are
flagged with :class:`TruncationDependentWarning`.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    ArityError,
    InconclusiveFitError,
    PrecisionError,
    TruncationError,
    UnsupportedPredicateError,
)
from .kernels import KernelSpec, moment, multi_indices

RANK_RTOL = 1e-9
RANK_GAP = 1e3


class TruncationDependentWarning(UserWarning):
    """Quotient dimension away from the origin depends on the truncation degree."""


@dataclass(frozen=True, eq=False)
class TruncatedModule:
    variables: int
    degree: int
    basis: tuple            # ((copy, alpha), ...) ascending in total degree
    gram: np.ndarray        # diagonal Gram weights
    mult: tuple             # matrices of M_{z_i}
    generator_degree: int = 0
    multiplicity: int = 1

    def __post_init__(self):
        if np.any(self.gram <= 0):
            raise ValueError("Gram weights must be positive")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def degrees(self) -> np.ndarray:
        return np.array([sum(a) for _, a in self.basis])

    def with_multiplicity(self, copies: int) -> "TruncatedModule":
        """Direct sum of ``copies`` identical modules (block-diagonal Gram)."""
        base = [(c, a) for c, a in self.basis if c == 0]
        return _build(
            self.variables,
            self.degree,
            [a for _, a in base],
            [g for (c, _), g in zip(self.basis, self.gram) if c == 0],
            self.generator_degree,
            copies * self.multiplicity,
        )


def _build(n, D, alphas, weights, generator_degree, copies) -> TruncatedModule:
    basis = [(c, a) for c in range(copies) for a in alphas]
    basis.sort(key=lambda ca: (sum(ca[1]), ca[0], tuple(-x for x in ca[1])))
    w = dict(zip(alphas, weights))
    gram = np.array([w[a] for _, a in basis], dtype=float)
    index = {b: i for i, b in enumerate(basis)}
    mats = []
    for i in range(n):
        M = np.zeros((len(basis), len(basis)))
        for col, (c, a) in enumerate(basis):
            up = list(a)
            up[i] += 1
            row = index.get((c, tuple(up)))
            if row is not None:
                M[row, col] = 1.0
        mats.append(M)
    return TruncatedModule(n, D, tuple(basis), gram, tuple(mats), generator_degree, copies)


def polynomial_module(spec: KernelSpec, degree: int, multiplicity: int = 1) -> TruncatedModule:
    """All monomials of total degree ``<= degree`` with Gram weights from ``spec``."""
    n = spec.variables
    alphas = [a for d in range(degree + 1) for a in multi_indices(n, d)]
    return _build(n, degree, alphas, [moment(spec, a) for a in alphas], 0, multiplicity)


def vanishing_submodule(spec: KernelSpec, n: int, degree: int, q=0) -> TruncatedModule:
    """Submodule of functions vanishing at ``q``; only ``q = 0`` is built in."""
    if n != spec.variables:
        raise ArityError(f"{spec.label()} has {spec.variables} variables, not {n}")
    qs = np.atleast_1d(np.asarray(q, dtype=complex))
    if np.any(qs != 0):
        raise UnsupportedPredicateError("only vanishing at the origin is supported")
    alphas = [a for d in range(1, degree + 1) for a in multi_indices(n, d)]
    return _build(n, degree, alphas, [moment(spec, a) for a in alphas], 1, 1)


def _point(mod: TruncatedModule, omega) -> np.ndarray:
    om = np.atleast_1d(np.asarray(omega, dtype=complex))
    if om.size == 1 and mod.variables > 1 and om[0] == 0:
        om = np.zeros(mod.variables, dtype=complex)
    if om.size != mod.variables:
        raise ArityError(f"point has {om.size} coordinates, module has {mod.variables} variables")
    return om


def numerical_rank(A: np.ndarray, rtol: float = RANK_RTOL, gap: float = RANK_GAP) -> int:
    """Rank with a relative cutoff and a mandatory gap between kept and dropped values."""
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0:
        return 0
    r = int(np.sum(s > rtol * s[0]))
    if r < s.size and s[r] > 0 and s[r - 1] / s[r] < gap:
        raise PrecisionError(
            f"ambiguous rank: singular values {s[r - 1]:.3e} and {s[r]:.3e} straddle the cutoff"
        )
    return r


def quotient_dim(mod: TruncatedModule, omega=0, k: int = 1) -> int:
    """``dim M / [I_omega^k M]`` from the truncated module."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if mod.degree < k + mod.generator_degree:
        raise TruncationError(
            f"degree cap {mod.degree} too small for k={k} (need >= {k + mod.generator_degree})"
        )
    om = _point(mod, omega)
    if np.any(om != 0):
        warnings.warn(
            "quotient dimension away from the origin is approximate (truncation-dependent)",
            TruncationDependentWarning,
            stacklevel=2,
        )
    degs = mod.degrees()
    sources = np.flatnonzero(degs <= mod.degree - k)
    eye = np.eye(mod.dim)
    shifted = [M - o * eye for M, o in zip(mod.mult, om)]
    cols = []
    for beta in multi_indices(mod.variables, k):
        op = eye.astype(complex)
        for Mi, bi in zip(shifted, beta):
            for _ in range(bi):
                op = Mi @ op
        cols.append(op[:, sources])
    A = np.hstack(cols) * np.sqrt(mod.gram)[:, None]
    return mod.dim - numerical_rank(A)


# Hilbert-Samuel ---------------------------------------------------------

@dataclass(frozen=True)
class HilbertSamuelFit:
    dims: tuple
    coefficients: tuple     # ascending powers of k, exact fractions
    degree: int
    stable_from: int

    def __call__(self, k: int) -> Fraction:
        return sum((c * k**i for i, c in enumerate(self.coefficients)), Fraction(0))

    @property
    def poly(self) -> str:
        return format_polynomial(self.coefficients)

    def to_json(self) -> dict:
        return {
            "dims": list(self.dims),
            "poly": self.poly,
            "coefficients": [str(c) for c in self.coefficients],
            "degree": self.degree,
            "stable_from": self.stable_from,
        }


def format_polynomial(coeffs, var: str = "k") -> str:
    """Readable form such as ``k**2/2 + k/2``."""
    parts = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = Fraction(coeffs[i])
        if c == 0:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}**{i}")
        num, den = abs(c.numerator), c.denominator
        if mono:
            body = mono if num == 1 else f"{num}*{mono}"
        else:
            body = str(num)
        if den != 1:
            body += f"/{den}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _newton_to_monomial(xs, ys):
    """Exact interpolating polynomial through (xs, ys), ascending coefficients."""
    n = len(xs)
    table = [Fraction(y) for y in ys]
    coef = [table[0]]
    for j in range(1, n):
        table = [(table[i + 1] - table[i]) / (xs[i + j] - xs[i]) for i in range(n - j)]
        coef.append(table[0])
    poly = [Fraction(0)] * n
    basis = [Fraction(1)]
    for j, c in enumerate(coef):
        for i, b in enumerate(basis):
            poly[i] += c * b
        # basis *= (x - xs[j])
        nxt = [Fraction(0)] * (len(basis) + 1)
        for i, b in enumerate(basis):
            nxt[i + 1] += b
            nxt[i] -= xs[j] * b
        basis = nxt
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


def fit_hilbert_samuel(dims, start: int = 1) -> HilbertSamuelFit:
    """Lowest-degree polynomial matching a tail of ``dims`` (indexed from ``start``).

    A degree-``p`` fit must cover at least ``p + 3`` consecutive values so that
    two points confirm the stabilised differences.
    """
    ks = list(range(start, start + len(dims)))
    n = len(dims)
    for p in range(0, n - 2):
        for s in range(0, n - (p + 3) + 1):
            xs, ys = ks[s:], list(dims[s:])
            coeffs = _newton_to_monomial(xs[: p + 1], ys[: p + 1])
            fit = HilbertSamuelFit(tuple(dims), coeffs, len(coeffs) - 1, xs[0])
            if all(fit(x) == y for x, y in zip(xs, ys)):
                # extend backwards as far as the fit stays exact
                first = s
                while first > 0 and fit(ks[first - 1]) == dims[first - 1]:
                    first -= 1
                return HilbertSamuelFit(tuple(dims), coeffs, len(coeffs) - 1, ks[first])
    raise InconclusiveFitError(f"differences of {list(dims)} did not stabilise")


def hilbert_samuel(mod: TruncatedModule, omega=0, k_max: int = 8) -> HilbertSamuelFit:
    """Dimensions ``d_k`` for ``k = 1..k_max`` and their Hilbert-Samuel polynomial."""
    if mod.degree < k_max + 1:
        raise TruncationError(f"degree cap {mod.degree} must be at least k_max + 1 = {k_max + 1}")
    dims = [quotient_dim(mod, omega, k) for k in range(1, k_max + 1)]
    return fit_hilbert_samuel(dims)


def lattice_point_count(n: int, k: int) -> int:
    """``#{alpha in Z_{>=0}^n : |alpha| < k}`` = C(k + n - 1, n)."""
    return math.comb(k + n - 1, n)
