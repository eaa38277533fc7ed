"""Reproducing-kernel Hilbert modules given by diagonal moment sequences.

A diagonal (rotation invariant) module is determined by the squared norms
``mu[alpha] = ||z**alpha||**2`` of its monomials; the kernel is

    K(z, w) = sum_alpha z**alpha * conj(w)**alpha / mu[alpha].

Built-in families: Hardy space of the disk, weighted Bergman spaces
(alpha > -1), the Drury-Arveson space H^2_n and the Hardy space of the
polydisk.  Custom families are given by a finite table plus a tail rule.
"""
from __future__ import annotations

import cmath
import enum
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import ArityError, DomainError, TruncationError

DEFAULT_MARGIN = 1e-3
DEFAULT_TERMS = 200
DEFAULT_TAIL_TOL = 1e-12


class Family(str, enum.Enum):
    HARDY = "hardy"
    BERGMAN = "bergman"
    DRURY_ARVESON = "drury-arveson"
    HARDY_POLYDISK = "hardy-polydisk"
    CUSTOM = "custom"


class Geometry(str, enum.Enum):
    DISK = "disk"
    BALL = "ball"
    POLYDISK = "polydisk"


@lru_cache(maxsize=4096)
def _bergman_moment(alpha: float, n: int) -> float:
    # n! Gamma(2+alpha) / Gamma(n+2+alpha) = prod_{j=1..n} j / (j+1+alpha)
    if float(alpha).is_integer():
        a = int(alpha)
        # (1+a)! / ((n+1)(n+2)...(n+1+a)), exact then correctly rounded
        den = math.prod(range(n + 1, n + 2 + a))
        return float(Fraction(math.factorial(1 + a), den))
    log_mu = -math.fsum(math.log1p((1.0 + alpha) / j) for j in range(1, n + 1))
    return math.exp(log_mu)


@dataclass(frozen=True)
class KernelSpec:
    """A named kernel family together with its moment rule.

    Use the constructors :meth:`hardy`, :meth:`bergman`, :meth:`drury_arveson`,
    :meth:`hardy_polydisk` and :meth:`custom` rather than the raw fields.
    """

    family: Family
    variables: int = 1
    alpha: float = 0.0
    table: tuple = ()  # ((index tuple, value), ...) for custom families
    tail: str = "geometric"

    def __post_init__(self):
        if self.variables < 1:
            raise ValueError("variables must be a positive integer")
        if self.family is Family.BERGMAN and not self.alpha > -1:
            raise ValueError(f"weighted Bergman space needs alpha > -1, got {self.alpha}")
        if self.family in (Family.HARDY, Family.BERGMAN) and self.variables != 1:
            raise ValueError(f"{self.family.value} is a one-variable family")
        if self.family is Family.CUSTOM:
            _validate_table(self.table, self.variables, self.tail)

    # constructors -------------------------------------------------------
    @classmethod
    def hardy(cls) -> "KernelSpec":
        return cls(Family.HARDY)

    @classmethod
    def bergman(cls, alpha: float = 0.0) -> "KernelSpec":
        return cls(Family.BERGMAN, alpha=float(alpha))

    @classmethod
    def drury_arveson(cls, n: int) -> "KernelSpec":
        return cls(Family.DRURY_ARVESON, variables=int(n))

    @classmethod
    def hardy_polydisk(cls, n: int) -> "KernelSpec":
        return cls(Family.HARDY_POLYDISK, variables=int(n))

    @classmethod
    def custom(cls, moments, variables: int = 1, tail: str = "geometric") -> "KernelSpec":
        """Build a custom family from ``{index: value}`` or ``[(index, value)]``."""
        items = moments.items() if hasattr(moments, "items") else moments
        table = []
        for idx, value in items:
            idx = (int(idx),) if np.ndim(idx) == 0 else tuple(int(i) for i in idx)
            table.append((idx, float(value)))
        table.sort(key=lambda kv: (sum(kv[0]), kv[0]))
        return cls(Family.CUSTOM, variables=int(variables), table=tuple(table), tail=tail)

    @classmethod
    def from_json(cls, doc) -> "KernelSpec":
        """Load ``{"variables": n, "moments": [{"index": [...], "value": v}], "tail": ...}``.

        ``doc`` may be a dict, a JSON string or a path.
        """
        if isinstance(doc, (str, bytes)) and not str(doc).lstrip().startswith("{"):
            with open(doc) as fh:
                doc = json.load(fh)
        elif isinstance(doc, (str, bytes)):
            doc = json.loads(doc)
        tail = doc.get("tail", "geometric")
        moments = [(entry["index"], entry["value"]) for entry in doc["moments"]]
        return cls.custom(moments, variables=doc.get("variables", 1), tail=tail)

    def to_json(self) -> dict:
        if self.family is Family.CUSTOM:
            return {
                "variables": self.variables,
                "moments": [{"index": list(i), "value": v} for i, v in self.table],
                "tail": self.tail,
            }
        out = {"family": self.family.value}
        if self.family is Family.BERGMAN:
            out["alpha"] = self.alpha
        if self.family in (Family.DRURY_ARVESON, Family.HARDY_POLYDISK):
            out["n"] = self.variables
        return out

    # derived data -------------------------------------------------------
    @property
    def geometry(self) -> Geometry:
        if self.variables == 1:
            return Geometry.DISK
        if self.family is Family.DRURY_ARVESON:
            return Geometry.BALL
        return Geometry.POLYDISK

    @property
    def has_closed_form(self) -> bool:
        return self.family is not Family.CUSTOM

    @cached_property
    def _lookup(self) -> dict:
        return dict(self.table)

    @cached_property
    def table_degree(self) -> int:
        return max(sum(i) for i, _ in self.table) if self.table else -1

    @cached_property
    def _tail_moment(self) -> float:
        top = [v for i, v in self.table if sum(i) == self.table_degree]
        return min(top)

    def label(self) -> str:
        if self.family is Family.BERGMAN:
            return f"bergman(alpha={self.alpha:g})"
        if self.family in (Family.DRURY_ARVESON, Family.HARDY_POLYDISK):
            return f"{self.family.value}(n={self.variables})"
        return self.family.value


def _validate_table(table, variables, tail):
    if tail not in ("geometric", "reject"):
        raise ValueError(f"unknown tail rule {tail!r}; expected 'geometric' or 'reject'")
    if not table:
        raise ValueError("custom moment table is empty")
    seen = set()
    for idx, value in table:
        if len(idx) != variables:
            raise ArityError(f"index {idx} does not have {variables} entries")
        if any(i < 0 for i in idx):
            raise ValueError(f"negative exponent in index {idx}")
        if not (math.isfinite(value) and value > 0):
            raise ValueError(f"moment for {idx} must be positive and finite, got {value}")
        if idx in seen:
            raise ValueError(f"duplicate index {idx}")
        seen.add(idx)
    top = max(sum(i) for i in seen)
    for d in range(top + 1):
        for idx in multi_indices(variables, d):
            if idx not in seen:
                raise ValueError(f"moment table is missing index {idx} (degree {d} <= {top})")


def multi_indices(n: int, degree: int) -> Iterable[tuple]:
    """All exponent tuples of length ``n`` and total ``degree``, lexicographically descending."""
    if n == 1:
        yield (degree,)
        return
    for first in range(degree, -1, -1):
        for rest in multi_indices(n - 1, degree - first):
            yield (first,) + rest


def _normalize_index(spec: KernelSpec, idx) -> tuple:
    if np.ndim(idx) == 0:
        idx = (int(idx),)
    else:
        idx = tuple(int(i) for i in idx)
    if len(idx) != spec.variables:
        raise ArityError(f"{spec.label()} expects {spec.variables}-tuples, got {idx}")
    if any(i < 0 for i in idx):
        raise ValueError(f"negative exponent in {idx}")
    return idx


def moment(spec: KernelSpec, idx) -> float:
    """Squared norm ``||z**idx||**2`` in the module described by ``spec``."""
    idx = _normalize_index(spec, idx)
    fam = spec.family
    if fam in (Family.HARDY, Family.HARDY_POLYDISK):
        return 1.0
    if fam is Family.BERGMAN:
        return _bergman_moment(spec.alpha, idx[0])
    if fam is Family.DRURY_ARVESON:
        # symmetric Fock normalisation alpha! / |alpha|!
        num = math.prod(math.factorial(i) for i in idx)
        return float(Fraction(num, math.factorial(sum(idx))))
    value = spec._lookup.get(idx)
    if value is not None:
        return value
    if spec.tail == "reject":
        raise TruncationError(f"index {idx} lies beyond the moment table (tail rule 'reject')")
    return spec._tail_moment


def moments(spec: KernelSpec, count: int) -> np.ndarray:
    """First ``count`` one-variable moments as an array."""
    if spec.variables != 1:
        raise ArityError("moments() is for one-variable families")
    return np.array([moment(spec, j) for j in range(count)])


# points ----------------------------------------------------------------

@dataclass(frozen=True)
class PointInDomain:
    coordinates: tuple
    margin: float = DEFAULT_MARGIN

    def __post_init__(self):
        if not 0 < self.margin < 1:
            raise ValueError("margin must lie in (0, 1)")


def domain_radius(spec: KernelSpec, z: Sequence[complex]) -> float:
    """Norm of ``z`` in the geometry of ``spec`` (sup-norm on the polydisk)."""
    if spec.geometry is Geometry.POLYDISK:
        return max(abs(c) for c in z)
    return math.sqrt(math.fsum(abs(c) ** 2 for c in z))


def as_point(spec: KernelSpec, z, margin: float = DEFAULT_MARGIN) -> PointInDomain:
    """Validate ``z`` (a scalar or a sequence) against the domain of ``spec``."""
    if isinstance(z, PointInDomain):
        margin, z = z.margin, z.coordinates
    coords = (complex(z),) if np.ndim(z) == 0 else tuple(complex(c) for c in z)
    if len(coords) != spec.variables:
        raise ArityError(f"{spec.label()} expects points in C^{spec.variables}, got {len(coords)} coordinates")
    radius = domain_radius(spec, coords)
    if not radius <= 1 - margin:
        raise DomainError(
            f"point {coords} has norm {radius:.6g} > 1 - margin = {1 - margin:.6g}"
        )
    return PointInDomain(coords, margin)


# kernel ----------------------------------------------------------------

@dataclass(frozen=True)
class SeriesValue:
    value: complex
    tail_bound: float
    terms: int


def _closed_form(spec: KernelSpec, z: tuple, w: tuple) -> complex:
    fam = spec.family
    if fam is Family.HARDY:
        return 1 / (1 - z[0] * w[0].conjugate())
    if fam is Family.BERGMAN:
        base = 1 - z[0] * w[0].conjugate()
        exponent = -2.0 - spec.alpha
        if exponent.is_integer():
            return base ** int(exponent)
        return cmath.exp(exponent * cmath.log(base))
    if fam is Family.DRURY_ARVESON:
        inner = sum(a * b.conjugate() for a, b in zip(z, w))
        return 1 / (1 - inner)
    if fam is Family.HARDY_POLYDISK:
        out = 1 + 0j
        for a, b in zip(z, w):
            out *= 1 / (1 - a * b.conjugate())
        return out
    raise ValueError("custom families have no closed form")


def _degree_majorant(spec: KernelSpec, z: tuple, w: tuple, d: int) -> float:
    """Upper bound for sum_{|alpha| = d} |z^alpha conj(w)^alpha| / mu_alpha beyond known terms."""
    x = [abs(a) * abs(b) for a, b in zip(z, w)]
    n = spec.variables
    if spec.family is Family.DRURY_ARVESON:
        return math.fsum(x) ** d
    t = max(x)
    scale = 1.0
    if spec.family is Family.CUSTOM:
        scale = 1.0 / spec._tail_moment
    return scale * math.comb(d + n - 1, n - 1) * t ** d


def tail_bound(spec: KernelSpec, z, w, terms: int) -> float:
    """Bound on the absolute tail of the kernel series after degrees ``< terms``.

    The bound is geometric: the degree-``terms`` majorant divided by
    ``1 - rho`` where ``rho`` bounds the ratio of consecutive majorants.
    Returns ``inf`` when no such bound exists.
    """
    z = tuple(complex(c) for c in (z.coordinates if isinstance(z, PointInDomain) else np.atleast_1d(z)))
    w = tuple(complex(c) for c in (w.coordinates if isinstance(w, PointInDomain) else np.atleast_1d(w)))
    x = [abs(a) * abs(b) for a, b in zip(z, w)]
    if max(x) == 0.0:
        return 0.0
    n, N = spec.variables, terms
    fam = spec.family
    if fam is Family.CUSTOM:
        explicit = 0.0
        if N <= spec.table_degree:
            explicit = math.fsum(
                _term_abs(x, idx) / v for idx, v in spec.table if sum(idx) >= N
            )
        if spec.tail == "reject":
            return math.inf
        N = max(N, spec.table_degree + 1)
        return explicit + _geometric_tail(spec, z, w, N)
    if fam is Family.HARDY:
        return x[0] ** N / (1 - x[0])
    if fam is Family.BERGMAN:
        rho = x[0] * (N + 2 + spec.alpha) / (N + 1)
        if rho >= 1:
            return math.inf
        return x[0] ** N / _bergman_moment(spec.alpha, N) / (1 - rho)
    return _geometric_tail(spec, z, w, N)


def _term_abs(x, idx):
    return math.prod(xi ** i for xi, i in zip(x, idx))


def _geometric_tail(spec, z, w, N):
    n = spec.variables
    x = [abs(a) * abs(b) for a, b in zip(z, w)]
    if spec.family is Family.DRURY_ARVESON:
        s = math.fsum(x)
        return s ** N / (1 - s) if s < 1 else math.inf
    t = max(x)
    rho = t * (N + n) / (N + 1)
    if rho >= 1:
        return math.inf
    return _degree_majorant(spec, z, w, N) / (1 - rho)


def _adaptive_terms(spec, z, w, tol, cap):
    for N in range(1, cap + 1):
        if tail_bound(spec, z, w, N) <= tol:
            return N
    return cap


def kernel_series(
    spec: KernelSpec,
    z,
    w,
    terms: int | None = None,
    margin: float = DEFAULT_MARGIN,
    tol: float = DEFAULT_TAIL_TOL,
) -> SeriesValue:
    """Truncated kernel series over degrees ``< terms`` with its tail bound.

    Terms are summed in ascending degree with ``math.fsum`` so the result does
    not depend on enumeration order.  ``terms=None`` picks the smallest
    truncation meeting ``tol`` (capped at ``DEFAULT_TERMS`` degrees).
    Raises TruncationError carrying the bound when it exceeds ``tol``.
    """
    zp = as_point(spec, z, margin).coordinates
    wp = as_point(spec, w, margin).coordinates
    if terms is None:
        terms = _adaptive_terms(spec, zp, wp, tol, DEFAULT_TERMS)
    if terms < 1:
        raise ValueError("terms must be >= 1")
    bound = tail_bound(spec, zp, wp, terms)
    if bound > tol:
        raise TruncationError(
            f"kernel series tail bound {bound:.3e} exceeds tolerance {tol:.1e} at {terms} terms",
            bound=bound,
        )
    value = _series_sum(spec, zp, wp, terms)
    return SeriesValue(value, bound, terms)


def _series_sum(spec, z, w, terms):
    if _order_key(z) > _order_key(w):
        return _series_sum(spec, w, z, terms).conjugate()
    re, im = [], []
    for d in range(terms):
        for idx in sorted(multi_indices(spec.variables, d)):
            zt = math.prod((a ** i for a, i in zip(z, idx)), start=1 + 0j)
            wt = math.prod((b ** i for b, i in zip(w, idx)), start=1 + 0j)
            term = zt * wt.conjugate() / moment(spec, idx)
            re.append(term.real)
            im.append(term.imag)
    return complex(math.fsum(re), math.fsum(im))


def _order_key(z: tuple):
    return tuple((c.real, c.imag) for c in z)


def kernel_eval(
    spec: KernelSpec,
    z,
    w,
    terms: int | None = None,
    margin: float = DEFAULT_MARGIN,
    method: str = "auto",
    tol: float = DEFAULT_TAIL_TOL,
) -> complex:
    """Evaluate ``K(z, w)``.

    ``method`` is ``"auto"`` (closed form when the family has one),
    ``"closed"`` or ``"series"``.  The result satisfies
    ``K(z, w) == conj(K(w, z))`` bit for bit: the pair is put in a canonical
    order before evaluating.
    """
    zp = as_point(spec, z, margin).coordinates
    wp = as_point(spec, w, margin).coordinates
    if method not in ("auto", "closed", "series"):
        raise ValueError(f"unknown method {method!r}")
    if method == "series" or (method == "auto" and not spec.has_closed_form):
        return kernel_series(spec, zp, wp, terms, margin, tol).value
    if not spec.has_closed_form:
        raise ValueError(f"{spec.label()} has no closed form")
    if _order_key(zp) > _order_key(wp):
        return _closed_form(spec, wp, zp).conjugate()
    value = _closed_form(spec, zp, wp)
    if zp == wp:
        value = complex(value.real, 0.0)
    return value


def gram_matrix(spec: KernelSpec, points: Sequence, margin: float = DEFAULT_MARGIN, **kw) -> np.ndarray:
    """Kernel Gram matrix ``G[i, j] = K(p_i, p_j)``."""
    pts = [as_point(spec, p, margin).coordinates for p in points]
    n = len(pts)
    G = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            G[i, j] = kernel_eval(spec, pts[i], pts[j], margin=margin, **kw)
    return G


# eigenvectors of adjoint multipliers -------------------------------------

def _poly_degree(p: Sequence[complex]) -> int:
    coeffs = list(p)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return len(coeffs) - 1


def shift_matrix(spec: KernelSpec, N: int) -> np.ndarray:
    """Compression of ``M_z`` to the first ``N`` orthonormalised monomials."""
    if spec.variables != 1:
        raise ArityError("shift_matrix needs a one-variable family")
    mu = moments(spec, N + 1)
    S = np.zeros((N, N))
    idx = np.arange(N - 1)
    S[idx + 1, idx] = np.sqrt(mu[1:N] / mu[: N - 1])
    return S


def multiplier_matrix(spec: KernelSpec, p: Sequence[complex], N: int) -> np.ndarray:
    """Truncated matrix of ``M_p`` for a polynomial with ascending coefficients ``p``.

    ``M_z`` raises degree, so compressing a product equals the product of
    compressions and the matrix is ``p(S)`` for the compressed shift ``S``.
    """
    S = shift_matrix(spec, N).astype(complex)
    out = np.zeros((N, N), dtype=complex)
    for c in reversed(list(p)):  # Horner
        out = out @ S + c * np.eye(N)
    return out


def kernel_vector(spec: KernelSpec, omega: complex, N: int) -> np.ndarray:
    """First ``N`` orthonormal coordinates of ``k_omega``: ``conj(omega)**j / sqrt(mu_j)``."""
    mu = moments(spec, N)
    return np.conj(complex(omega)) ** np.arange(N) / np.sqrt(mu)


def eigenvector_residual(
    spec: KernelSpec,
    omega,
    p: Sequence[complex],
    N: int,
    margin: float = DEFAULT_MARGIN,
) -> float:
    """Relative residual ``||M_p^* k - conj(p(omega)) k|| / ||k||`` at truncation ``N``."""
    if spec.variables != 1:
        raise ArityError("eigenvector_residual needs a one-variable family")
    (om,) = as_point(spec, omega, margin).coordinates
    p = [complex(c) for c in p]
    deg = _poly_degree(p)
    if N < deg + 2:
        raise TruncationError(f"truncation N={N} must be at least deg(p) + 2 = {deg + 2}")
    Mp = multiplier_matrix(spec, p, N)
    k = kernel_vector(spec, om, N)
    p_om = sum(c * om ** i for i, c in enumerate(p))
    r = Mp.conj().T @ k - np.conj(p_om) * k
    return float(np.linalg.norm(r) / np.linalg.norm(k))
