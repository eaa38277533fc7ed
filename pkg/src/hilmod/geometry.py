"""Curvature of Hermitian holomorphic bundles: line case, Grammians, matrix curvature.

Sign convention: curvature is negative for every kernel bundle here, e.g.
the Hardy line has ``K(omega) = -1/(1 - |omega|^2)^2`` and the metric
invariant is ``h = (-K)^(-1/2)``.

Frames consist of anti-holomorphic sections ``nu_i(omega)`` (eigenvectors
of adjoint multipliers), with Grammian ``H[i, j] = <nu_j, nu_i>``.  For such
frames the Chern curvature is ``K = -d(H^{-1} dbar H)``; it transforms by
similarity under anti-holomorphic changes of frame and reduces to
``-d dbar log H`` on diagonal Grammians.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DomainError,
    FrameDegeneracyError,
    InvariantUndefinedError,
    MethodError,
    TruncationError,
)
from .kernels import DEFAULT_MARGIN, Family, KernelSpec, moment, moments
from .metric import RadialMetric
from .shifts import restriction_shift, shift_kernel_metric

DEFAULT_FD_STEP = 1e-3
EPS_EIG = 1e-6
CROSS_CHECK_TOL = 1e-6


class LatticeVerdict(str, enum.Enum):
    FINITE_DISCRETE = "finite-discrete"
    INDETERMINATE = "indeterminate"


def _check_point(omega: complex, margin: float) -> complex:
    omega = complex(omega)
    if not abs(omega) <= 1 - margin:
        raise DomainError(f"|omega| = {abs(omega):.6g} exceeds 1 - margin = {1 - margin:.6g}")
    return omega


# line bundles -----------------------------------------------------------

def _curvature_from_derivatives(r: float, g: float, g1: float, g2: float) -> float:
    # d dbar f(|omega|^2) = f'(r) + r f''(r) for f = log g
    return -(g1 / g + r * (g2 * g - g1 * g1) / (g * g))


def fd_line_curvature(g: RadialMetric, omega: complex, step: float = DEFAULT_FD_STEP,
                      richardson: bool = True, margin: float = DEFAULT_MARGIN) -> float:
    """``-d dbar log g`` by the 5-point Laplacian (``d dbar = Laplacian / 4``).

    Second order in ``step``; one Richardson level lifts it to fourth order.
    """
    omega = _check_point(omega, margin)
    if abs(omega) + step > 1 - margin:
        raise MethodError(
            f"finite-difference stencil of radius {step:g} leaves the domain at |omega|={abs(omega):.6g}; "
            f"use the series method"
        )

    def logg(p):
        return math.log(g.value(abs(p) ** 2, "closed" if g.coefficients is None else "series"))

    def lap(h):
        c = logg(omega)
        s = logg(omega + h) + logg(omega - h) + logg(omega + 1j * h) + logg(omega - 1j * h)
        return (s - 4 * c) / (h * h)

    if richardson:
        val = (4 * lap(step / 2) - lap(step)) / 3
    else:
        val = lap(step)
    return -val / 4


def line_curvature(g: RadialMetric, omega: complex, method: str = "series",
                   step: float = DEFAULT_FD_STEP, margin: float = DEFAULT_MARGIN) -> float:
    """Curvature ``-d dbar log g(|omega|^2)`` of a line bundle.

    ``method`` is ``"series"``, ``"closed"`` or ``"fd"``.
    """
    omega = _check_point(omega, margin)
    r = abs(omega) ** 2
    if method in ("series", "closed"):
        return _curvature_from_derivatives(r, *g.derivatives(r, method))
    if method == "fd":
        return fd_line_curvature(g, omega, step, True, margin)
    raise ValueError(f"unknown method {method!r}")


def metric_h(g: RadialMetric, omega: complex, method: str = "series",
             margin: float = DEFAULT_MARGIN) -> float:
    """The metric invariant ``h = (-K)^(-1/2)``; undefined when ``K >= 0``."""
    K = line_curvature(g, omega, method, margin=margin)
    if K >= 0:
        raise InvariantUndefinedError(f"curvature {K:.6g} is not negative at omega={omega}")
    return 1.0 / math.sqrt(-K)


# frames -------------------------------------------------------------------

Section = Callable[[complex], np.ndarray]


@dataclass(frozen=True, eq=False)
class Frame:
    """Anti-holomorphic sections given by their ambient monomial coefficients.

    ``moments`` are the ambient squared norms of ``z^n`` (the inner product is
    diagonal).  ``radial`` optionally declares that the Grammian is diagonal
    with entries ``radial[i](|omega|^2)``, which enables exact curvature.
    """

    sections: tuple
    moments: np.ndarray
    radial: tuple | None = None
    labels: tuple = ()
    truncated: bool = True  # False when the coefficient vectors are exact

    @property
    def rank(self) -> int:
        return len(self.sections)

    def coefficients(self, omega: complex) -> np.ndarray:
        return np.array([s(omega) for s in self.sections])

    def rescaled(self, D: np.ndarray) -> "Frame":
        """Frame ``nu'_i = sum_j D[i, j] nu_j`` for a constant invertible ``D``."""
        D = np.asarray(D, dtype=complex)
        secs = self.sections

        def make(i):
            return lambda om: sum(D[i, j] * secs[j](om) for j in range(len(secs)))

        return Frame(tuple(make(i) for i in range(len(secs))), self.moments, truncated=self.truncated)


def grammian(frame: Frame, omega: complex, tol: float = 1e-10, margin: float = DEFAULT_MARGIN) -> np.ndarray:
    """``H[i, j] = <nu_j, nu_i>`` at ``omega``, Hermitian by construction."""
    omega = _check_point(omega, margin)
    C = frame.coefficients(omega)
    # tail estimate: trailing mass of each section relative to its norm
    w = np.abs(C) ** 2 * frame.moments
    total = w.sum(axis=1)
    tail = w[:, -max(1, w.shape[1] // 20):].sum(axis=1)
    if frame.truncated and np.any(tail > tol * np.maximum(total, 1e-300)):
        bad = float(np.max(tail / np.maximum(total, 1e-300)))
        raise TruncationError(
            f"frame coefficients not decayed at |omega|={abs(omega):.4g} (relative tail {bad:.2e})",
            bound=bad,
        )
    weighted = C * frame.moments
    H = np.conj(C) @ weighted.T  # H[i, j] = sum_n C[j, n] conj(C[i, n]) mu_n
    H = 0.5 * (H + H.conj().T)
    return H


def _wirtinger(f, omega: complex, h: float):
    """(d f, dbar f) from the 4-point real/imaginary stencil."""
    fx = (f(omega + h) - f(omega - h)) / (2 * h)
    fy = (f(omega + 1j * h) - f(omega - 1j * h)) / (2 * h)
    return 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)


def fd_bundle_curvature(frame: Frame, omega: complex, step: float = DEFAULT_FD_STEP,
                        richardson: bool = True, margin: float = DEFAULT_MARGIN) -> np.ndarray:
    """``K = -d(H^{-1} dbar H)`` by nested central differences on the Grammian."""
    omega = _check_point(omega, margin)
    if abs(omega) + 2 * step > 1 - margin:
        raise MethodError(
            f"finite-difference stencil of radius {2 * step:g} leaves the domain at |omega|={abs(omega):.6g}; "
            f"use the series method"
        )

    def H(p):
        G = grammian(frame, p, margin=margin / 2)
        return G

    def connection(p, h):
        G = H(p)
        _, dbar_G = _wirtinger(H, p, h)
        try:
            return np.linalg.solve(G, dbar_G)
        except np.linalg.LinAlgError as exc:
            raise FrameDegeneracyError(f"Grammian singular near omega={p}") from exc

    def K(h):
        d_conn, _ = _wirtinger(lambda p: connection(p, h), omega, h)
        return -d_conn

    if richardson:
        return (4 * K(step / 2) - K(step)) / 3
    return K(step)


@dataclass(frozen=True, eq=False)
class CurvatureReport:
    omega: complex
    matrix: np.ndarray
    eigenvalues: np.ndarray
    multiplicities: tuple
    verdict: LatticeVerdict
    eps_eig: float = EPS_EIG

    def to_json(self) -> dict:
        return {
            "omega": [self.omega.real, self.omega.imag],
            "matrix": [[[float(v.real), float(v.imag)] for v in row] for row in self.matrix],
            "eigenvalues": [float(e) for e in self.eigenvalues],
            "verdict": self.verdict.value,
        }


def curvature_report(omega: complex, K: np.ndarray, eps_eig: float = EPS_EIG) -> CurvatureReport:
    """Eigenvalues, multiplicity clusters and the reducing-lattice verdict of ``K``."""
    K = np.asarray(K, dtype=complex)
    if np.allclose(K, K.conj().T, atol=1e-12 * max(1.0, np.abs(K).max())):
        eig = np.linalg.eigvalsh(0.5 * (K + K.conj().T))
    else:
        eig = np.sort(np.linalg.eigvals(K).real)
    eig = np.sort(eig)
    mult = []
    for e in eig:
        mult.append(int(np.sum(np.abs(eig - e) <= eps_eig)))
    distinct = all(m == 1 for m in mult)
    verdict = LatticeVerdict.FINITE_DISCRETE if distinct else LatticeVerdict.INDETERMINATE
    return CurvatureReport(complex(omega), K, eig, tuple(mult), verdict, eps_eig)


def _radial_curvature(frame: Frame, omega: complex) -> np.ndarray:
    r = abs(omega) ** 2
    diag = [_curvature_from_derivatives(r, *g.series(r)) for g in frame.radial]
    return np.diag(diag).astype(complex)


def bundle_curvature(frame: Frame, omega: complex, method: str = "auto",
                     step: float = DEFAULT_FD_STEP, cross_check: bool = True,
                     cross_tol: float = CROSS_CHECK_TOL, eps_eig: float = EPS_EIG,
                     margin: float = DEFAULT_MARGIN) -> CurvatureReport:
    """Curvature matrix of a frame with eigenvalues and lattice verdict.

    ``method``: ``"series"`` (exact log-derivatives, diagonal radial frames
    only), ``"fd"`` (Wirtinger differences with Richardson extrapolation) or
    ``"auto"`` (series when available).  With ``cross_check`` both paths are
    run when possible and must agree within ``cross_tol``.
    """
    omega = _check_point(omega, margin)
    H0 = grammian(frame, omega, margin=margin)
    if np.linalg.eigvalsh(H0)[0] <= 1e-14 * max(1.0, np.abs(H0).max()):
        raise FrameDegeneracyError(f"Grammian not positive definite at omega={omega}")
    if method == "auto":
        method = "series" if frame.radial is not None else "fd"
    if method == "series":
        if frame.radial is None:
            raise MethodError("series curvature needs a diagonal radial frame")
        K = _radial_curvature(frame, omega)
        if cross_check:
            try:
                K_fd = fd_bundle_curvature(frame, omega, step, True, margin)
            except MethodError:
                K_fd = None
            if K_fd is not None:
                err = np.abs(K - K_fd).max()
                if err > max(cross_tol, cross_tol * np.abs(K).max()):
                    raise MethodError(f"series and finite-difference curvature disagree by {err:.3e}")
    elif method == "fd":
        K = fd_bundle_curvature(frame, omega, step, True, margin)
        if cross_check and frame.radial is not None:
            err = np.abs(K - _radial_curvature(frame, omega)).max()
            if err > max(cross_tol, cross_tol * np.abs(K).max()):
                raise MethodError(f"series and finite-difference curvature disagree by {err:.3e}")
    else:
        raise ValueError(f"unknown method {method!r}")
    return curvature_report(omega, K, eps_eig)


def constant_frame(rank: int = 2, dim: int | None = None) -> Frame:
    """Sections that do not depend on ``omega``: a flat bundle."""
    dim = rank if dim is None else dim
    secs = tuple((lambda om, i=i: np.eye(dim)[i].astype(complex)) for i in range(rank))
    radial = tuple(RadialMetric.constant(1.0) for _ in range(rank))
    return Frame(secs, np.ones(dim), radial, truncated=False)


# powers of the shift ----------------------------------------------------

def power_frame(spec: KernelSpec, m: int, terms: int = 200) -> Frame:
    """Frame adapted to ``L_{m,0}, ..., L_{m,m-1}`` for ``M_{z^m}``.

    Section ``k`` has coefficient ``sqrt(mu_k) conj(omega)^l / mu_{m l + k}`` on
    ``z^{m l + k}``, so ``H[k, k] = sum_l |omega|^{2l} / beta_l^2`` for the
    restricted shift and the off-diagonal entries vanish identically.
    """
    if spec.variables != 1:
        raise ValueError("power_frame needs a one-variable diagonal family")
    if m < 1:
        raise ValueError("m must be >= 1")
    N = m * terms
    mu = moments(spec, N)
    ls = np.arange(terms)

    def make(k):
        pos = m * ls + k
        scale = np.sqrt(mu[k]) / mu[pos]

        def section(omega):
            c = np.zeros(N, dtype=complex)
            c[pos] = scale * np.conj(complex(omega)) ** ls
            return c

        return section

    sections = tuple(make(k) for k in range(m))
    radial = tuple(shift_kernel_metric(restriction_shift(spec, m, k, terms), terms) for k in range(m))
    return Frame(sections, mu, radial, tuple(f"L[{m},{k}]" for k in range(m)))


def branch_power_frame(spec: KernelSpec, m: int, terms: int = 200, rotation: int = 0) -> Frame:
    """Same frame assembled from kernel functions at the m-th roots of ``omega``.

    ``nu_k = sqrt(mu_k) / (m conj(eta)^k) * sum_j zeta^(jk) k_{eta zeta^j}``
    with ``eta`` the principal root times ``zeta^rotation``.  Only defined
    for ``omega != 0``; used to confirm that nothing depends on the branch.
    """
    N = m * terms
    mu = moments(spec, N)
    n = np.arange(N)
    zeta = cmath.exp(2j * math.pi / m)

    def kernel_coeffs(lam):
        return np.conj(lam) ** n / mu

    def make(k):
        def section(omega):
            omega = complex(omega)
            if omega == 0:
                raise ValueError("branch construction is undefined at omega = 0")
            eta = omega ** (1.0 / m) * zeta**rotation
            acc = sum(zeta ** (j * k) * kernel_coeffs(eta * zeta**j) for j in range(m))
            c = math.sqrt(mu[k]) * acc / (m * np.conj(eta) ** k)
            mask = (n % m) == k
            return np.where(mask, c, 0)

        return section

    return Frame(tuple(make(k) for k in range(m)), mu)


@dataclass(frozen=True)
class ReducingCurvatures:
    values: tuple
    verdict: LatticeVerdict
    omega: complex = 0j

    def to_json(self) -> dict:
        return {"curvatures": [float(v) for v in self.values], "verdict": self.verdict.value}


def reducing_curvatures(spec: KernelSpec, m: int, omega: complex = 0.0, method: str = "series",
                        terms: int = 200, eps_eig: float = EPS_EIG) -> ReducingCurvatures:
    """Curvature of each ``L_{m,k}`` line at ``omega`` (at 0 this is ``-a_1/a_0``)."""
    if spec.variables != 1:
        raise ValueError("reducing_curvatures needs a one-variable family")
    vals = []
    for k in range(m):
        g = shift_kernel_metric(restriction_shift(spec, m, k, terms), terms)
        vals.append(line_curvature(g, omega, method))
    report = curvature_report(omega, np.diag(vals), eps_eig)
    return ReducingCurvatures(tuple(vals), report.verdict, complex(omega))


def printed_reducing_curvature(m: int, k: int) -> float | None:
    """The alternative closed form ``-(m+k)/k``; ``None`` at ``k = 0``.

    It disagrees with the computed value ``-(m+k+1)/(k+1)`` and is exposed
    only for comparison.
    """
    if k == 0:
        return None
    return -(m + k) / k


def derived_reducing_curvature(m: int, k: int) -> float:
    """``-(m+k+1)/(k+1)``: curvature at 0 of ``M_{z^m}`` on ``L_{m,k}`` for the Bergman space."""
    return -(m + k + 1) / (k + 1)
