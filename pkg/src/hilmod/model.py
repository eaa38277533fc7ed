"""Finite contractions: defect operators and the characteristic function.

For a contraction ``T`` on C^d,

    Theta_T(z) = [-T + z D_{T*} (I - z T*)^{-1} D_T] restricted to D_T,

read as a map from the defect space of ``T`` into that of ``T*``.  Defect
bases are non-canonical, so samples are meaningful only up to constant
unitaries on either side; compare singular values and ``|det|``.

Also here: localisation of multipliers and the norm-ratio obstruction
between weighted Bergman spaces.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, NotAContractionError

NORM_TOL = 1e-12
CLAMP_TOL = 1e-12
RANK_CUTOFF = 1e-10


def _psd_sqrt(A: np.ndarray, what: str):
    """Hermitian square root plus eigen-data; clamps tiny negative eigenvalues."""
    A = 0.5 * (A + A.conj().T)
    vals, vecs = np.linalg.eigh(A)
    if vals.size and vals.min() < -CLAMP_TOL:
        raise NotAContractionError(f"{what} has eigenvalue {vals.min():.3e} < 0")
    vals = np.clip(vals, 0.0, None)
    root = (vecs * np.sqrt(vals)) @ vecs.conj().T
    return root, vals, vecs


def _defect_basis(vals: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """Eigenvectors above the cutoff, by descending eigenvalue, phase-normalised."""
    keep = [i for i in range(vals.size) if vals[i] > RANK_CUTOFF]
    cols = []
    for i in keep:
        v = vecs[:, i].copy()
        j = int(np.argmax(np.abs(v) > 1e-12 * np.abs(v).max()))  # first non-negligible entry
        v *= np.exp(-1j * np.angle(v[j]))
        cols.append((-vals[i], tuple(np.round(np.concatenate([v.real, v.imag]), 12)), v))
    cols.sort(key=lambda t: (t[0], t[1]))
    if not cols:
        return np.zeros((vals.size, 0), dtype=complex)
    return np.column_stack([c[2] for c in cols])


@dataclass(frozen=True, eq=False)
class FiniteContraction:
    """A contraction on C^d with cached defect operators and defect bases."""

    T: np.ndarray
    D_T: np.ndarray
    D_Tstar: np.ndarray
    basis: np.ndarray        # columns: orthonormal basis of the defect space of T
    basis_star: np.ndarray   # columns: orthonormal basis of the defect space of T*

    @classmethod
    def from_matrix(cls, T) -> "FiniteContraction":
        T = np.atleast_2d(np.asarray(T, dtype=complex))
        if T.shape[0] != T.shape[1]:
            raise ValueError("T must be square")
        norm = np.linalg.norm(T, 2) if T.size else 0.0
        if norm > 1 + NORM_TOL:
            raise NotAContractionError(f"operator norm {norm:.15g} exceeds 1")
        I = np.eye(T.shape[0])
        D, vals, vecs = _psd_sqrt(I - T.conj().T @ T, "I - T*T")
        Ds, vals_s, vecs_s = _psd_sqrt(I - T @ T.conj().T, "I - TT*")
        return cls(T, D, Ds, _defect_basis(vals, vecs), _defect_basis(vals_s, vecs_s))

    @property
    def ranks(self) -> tuple:
        return self.basis.shape[1], self.basis_star.shape[1]


def defect_operators(T):
    """``(D_T, D_{T*}, (rank D_T, rank D_{T*}))``."""
    fc = FiniteContraction.from_matrix(T)
    return fc.D_T, fc.D_Tstar, fc.ranks


@dataclass(frozen=True, eq=False)
class CharFnSample:
    z: complex
    theta: np.ndarray

    @property
    def singular_values(self) -> np.ndarray:
        if self.theta.size == 0:
            return np.zeros(0)
        return np.linalg.svd(self.theta, compute_uv=False)

    @property
    def abs_det(self) -> float:
        if self.theta.shape[0] != self.theta.shape[1]:
            raise ValueError("determinant needs equal defect ranks")
        if self.theta.size == 0:
            return 1.0
        return float(abs(np.linalg.det(self.theta)))


def char_function(T, z: complex, variant: str = "standard", check: bool = True) -> CharFnSample:
    """Sample of the characteristic function at ``z`` in defect coordinates.

    ``variant="standard"`` inserts ``D_T`` before the resolvent;
    ``variant="printed"`` omits it, for comparison.
    """
    fc = T if isinstance(T, FiniteContraction) else FiniteContraction.from_matrix(T)
    z = complex(z)
    if not abs(z) < 1:
        raise DomainError(f"|z| = {abs(z):.6g} must be < 1")
    d = fc.T.shape[0]
    I = np.eye(d)
    resolvent = np.linalg.solve(I - z * fc.T.conj().T, I)
    if variant == "standard":
        full = -fc.T + z * fc.D_Tstar @ resolvent @ fc.D_T
    elif variant == "printed":
        full = -fc.T + z * fc.D_Tstar @ resolvent
    else:
        raise ValueError(f"unknown variant {variant!r}")
    theta = fc.basis_star.conj().T @ full @ fc.basis
    sample = CharFnSample(z, theta)
    if check and theta.size and sample.singular_values[0] > 1 + 1e-8:
        raise NotAContractionError(f"characteristic function has norm {sample.singular_values[0]:.12g} > 1")
    return sample


def nilpotent_jordan(d: int) -> np.ndarray:
    """Jordan block ``e_i -> e_{i+1}``: the compressed shift on H^2 / z^d H^2."""
    J = np.zeros((d, d))
    for i in range(d - 1):
        J[i + 1, i] = 1.0
    return J


def load_matrix(doc) -> np.ndarray:
    """Read ``{"rows": [[{"re": .., "im": ..}, ...], ...]}`` (dict, JSON text or path)."""
    if isinstance(doc, str) and not doc.lstrip().startswith("{"):
        with open(doc) as fh:
            doc = json.load(fh)
    elif isinstance(doc, str):
        doc = json.loads(doc)
    rows = [[complex(e.get("re", 0.0), e.get("im", 0.0)) if isinstance(e, dict) else complex(e)
             for e in row] for row in doc["rows"]]
    return np.array(rows, dtype=complex)


def dump_matrix(T) -> dict:
    T = np.atleast_2d(np.asarray(T, dtype=complex))
    return {"rows": [[{"re": float(v.real), "im": float(v.imag)} for v in row] for row in T]}


# multipliers --------------------------------------------------------------

@dataclass(frozen=True)
class Multiplier:
    """Scalar holomorphic ``theta`` on the disk: a power series or a rational function.

    ``numerator``/``denominator`` hold ascending coefficients; a series is a
    numerator with denominator ``(1,)``.  ``func`` overrides both.
    """

    numerator: tuple = (1.0,)
    denominator: tuple = (1.0,)
    func: Callable | None = None

    @classmethod
    def series(cls, coeffs: Sequence[complex]) -> "Multiplier":
        return cls(tuple(complex(c) for c in coeffs), (1.0,))

    @classmethod
    def rational(cls, num, den) -> "Multiplier":
        return cls(tuple(complex(c) for c in num), tuple(complex(c) for c in den))

    @classmethod
    def blaschke(cls, a: complex) -> "Multiplier":
        """``(z - a) / (1 - conj(a) z)``."""
        a = complex(a)
        return cls.rational((-a, 1.0), (1.0, -a.conjugate()))

    def __call__(self, z: complex) -> complex:
        if self.func is not None:
            return complex(self.func(z))
        num = np.polyval(np.array(self.numerator[::-1], dtype=complex), z)
        den = np.polyval(np.array(self.denominator[::-1], dtype=complex), z)
        if den == 0:
            raise DomainError(f"multiplier has a pole at {z}")
        return complex(num / den)


def localize_multiplier(theta, omega: complex) -> complex:
    """Value at ``omega`` of the localisation of multiplication by ``theta``."""
    omega = complex(omega)
    if not abs(omega) < 1:
        raise DomainError(f"|omega| = {abs(omega):.6g} must be < 1")
    if not isinstance(theta, Multiplier):
        theta = Multiplier(func=theta) if callable(theta) else Multiplier.series(theta)
    return theta(omega)


# norm-ratio obstruction ---------------------------------------------------

class RatioVerdict(str, enum.Enum):
    NO_NONZERO_MAP = "no-nonzero-map"
    UNOBSTRUCTED = "unobstructed"


def bergman_eigenvector_norm(alpha: float, omega: complex) -> float:
    """``||gamma^alpha_omega|| = (1 - |omega|^2)^(-(2 + alpha)/2)``."""
    return (1.0 - abs(omega) ** 2) ** (-(2.0 + alpha) / 2)


def quasi_similarity_ratio(alpha: float, beta: float, omega: complex, margin: float = 1e-3):
    """``||gamma^beta_omega|| / ||gamma^alpha_omega|| = (1 - |omega|^2)^((alpha - beta)/2)``.

    A module map ``X: L^{2,beta} -> L^{2,alpha}`` satisfies
    ``X* gamma^alpha = phi gamma^beta`` with
    ``|phi(omega)| <= ||X|| / ratio``, which tends to 0 at the boundary when
    ``alpha < beta``; then ``phi = 0`` and ``X = 0``.  The verdict
    ``NO_NONZERO_MAP`` refers to maps in that direction, from the
    ``beta``-space into the ``alpha``-space.
    """
    if not (alpha > -1 and beta > -1):
        raise ValueError("need alpha, beta > -1")
    omega = complex(omega)
    if not abs(omega) <= 1 - margin:
        raise DomainError(f"|omega| = {abs(omega):.6g} exceeds 1 - margin")
    ratio = (1.0 - abs(omega) ** 2) ** ((alpha - beta) / 2)
    verdict = RatioVerdict.NO_NONZERO_MAP if alpha < beta else RatioVerdict.UNOBSTRUCTED
    return ratio, verdict
