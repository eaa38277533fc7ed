"""Radial metrics g(r) = sum a_l r**l with r = |omega|**2."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import TruncationError

# closed-form evaluator: r -> (g, g', g'')
ClosedForm = Callable[[float], tuple]


@dataclass(frozen=True, eq=False)
class RadialMetric:
    """A positive radial function of ``r = |omega|^2``.

    Either ``coefficients`` (a power series in ``r``) or ``closed`` (returning
    value and two derivatives) must be present; built-in kernels carry both.
    ``ratio_bound`` is the ratio-test certificate used for tail estimates:
    it bounds ``a[l+1] / a[l]`` past the stored coefficients.
    """

    coefficients: np.ndarray | None = None
    closed: ClosedForm | None = None
    ratio_bound: float = 1.0
    label: str = ""

    def __post_init__(self):
        if self.coefficients is None and self.closed is None:
            raise ValueError("need coefficients or a closed form")
        if self.coefficients is not None:
            a = np.asarray(self.coefficients, dtype=float)
            if a.ndim != 1 or a.size == 0:
                raise ValueError("coefficients must be a non-empty 1-d sequence")
            if a[0] <= 0 or np.any(a < 0):
                raise ValueError("need a_0 > 0 and a_l >= 0")
            object.__setattr__(self, "coefficients", a)

    # constructors -------------------------------------------------------
    @classmethod
    def from_coefficients(cls, a, label: str = "") -> "RadialMetric":
        a = np.asarray(a, dtype=float)
        tail = a[-8:]
        ratios = [tail[i + 1] / tail[i] for i in range(len(tail) - 1) if tail[i] > 0]
        rho = max(ratios) if ratios else 0.0
        return cls(coefficients=a, ratio_bound=rho, label=label)

    @classmethod
    def hardy(cls, terms: int = 200) -> "RadialMetric":
        def closed(r):
            q = 1.0 - r
            return 1 / q, 1 / q**2, 2 / q**3

        return cls(np.ones(terms), closed, 1.0, "hardy")

    @classmethod
    def bergman(cls, alpha: float = 0.0, terms: int = 200) -> "RadialMetric":
        s = 2.0 + alpha

        def closed(r):
            q = 1.0 - r
            return q**-s, s * q ** (-s - 1), s * (s + 1) * q ** (-s - 2)

        # a_l = (s)_l / l!
        a = np.empty(terms)
        a[0] = 1.0
        for l in range(1, terms):
            a[l] = a[l - 1] * (l - 1 + s) / l
        rho = (terms - 1 + s) / terms
        return cls(a, closed, max(rho, 1.0), f"bergman(alpha={alpha:g})")

    @classmethod
    def constant(cls, c: float = 1.0) -> "RadialMetric":
        return cls(np.array([float(c)]), lambda r: (float(c), 0.0, 0.0), 0.0, "constant")

    @classmethod
    def from_kernel(cls, spec, terms: int = 200) -> "RadialMetric":
        """``||k_omega||^2 = K(omega, omega)`` as a radial metric."""
        from .kernels import Family, moments

        if spec.family is Family.HARDY:
            return cls.hardy(terms)
        if spec.family is Family.BERGMAN:
            return cls.bergman(spec.alpha, terms)
        return cls.from_coefficients(1.0 / moments(spec, terms), label=spec.label())

    def scaled(self, c: float) -> "RadialMetric":
        closed = None
        if self.closed is not None:
            f = self.closed
            closed = lambda r: tuple(c * v for v in f(r))  # noqa: E731
        coeffs = None if self.coefficients is None else c * self.coefficients
        return RadialMetric(coeffs, closed, self.ratio_bound, f"{c:g}*{self.label}")

    # evaluation ---------------------------------------------------------
    def tail_bound(self, r: float) -> float:
        """Estimated size of the omitted part of the series at ``r``."""
        a = self.coefficients
        N = a.size
        if N == 1 and self.ratio_bound == 0.0:
            return 0.0
        q = self.ratio_bound * r
        if q >= 1:
            return math.inf
        return a[-1] * r ** N * self.ratio_bound / (1 - q)

    def series(self, r: float, tol: float = 1e-10) -> tuple:
        """(g, g', g'') at ``r`` from the coefficients, ascending-degree fsum."""
        if self.coefficients is None:
            raise ValueError(f"metric {self.label!r} has no series coefficients")
        a = self.coefficients
        g_val = abs(a[0])
        bound = self.tail_bound(r)
        if bound > tol * g_val:
            raise TruncationError(
                f"metric series tail {bound:.3e} exceeds {tol:.1e} relative at r={r:.6g}; "
                f"increase the number of terms",
                bound=bound,
            )
        l = np.arange(a.size, dtype=float)
        powers = r ** l
        g = math.fsum(a * powers)
        g1 = math.fsum((a * l)[1:] * powers[:-1]) if a.size > 1 else 0.0
        g2 = math.fsum((a * l * (l - 1))[2:] * powers[:-2]) if a.size > 2 else 0.0
        return g, g1, g2

    def derivatives(self, r: float, method: str = "series") -> tuple:
        if method == "closed":
            if self.closed is None:
                raise ValueError(f"metric {self.label!r} has no closed form")
            return self.closed(r)
        return self.series(r)

    def value(self, r: float, method: str = "series") -> float:
        if method == "closed" or self.coefficients is None:
            return self.closed(r)[0]
        return self.series(r)[0]

    def value_complex(self, x: complex) -> complex:
        """Evaluate the power series at a complex argument (no tail check)."""
        a = self.coefficients
        powers = complex(x) ** np.arange(a.size)
        terms = a * powers
        return complex(math.fsum(terms.real), math.fsum(terms.imag))
