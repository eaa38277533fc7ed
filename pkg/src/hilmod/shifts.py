"""Unilateral weighted shifts, restrictions of M_{z^m}, equivalence and similarity.

A shift acts by ``e_l -> w_l e_{l+1}``.  Restricting ``M_{z^m}`` to
``L_{m,k} = span{z^(m l + k)}`` gives the shift with

    w_l = sqrt(mu[m(l+1)+k] / mu[m l + k]).

Two shifts are unitarily equivalent iff their weights agree; they are
similar iff the diagonal intertwiner ``Y e_l = c_l f_l`` with
``c_{l+1} = c_l * w_target[l] / w_source[l]`` is bounded above and below.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ArityError, TruncationError
from .kernels import DEFAULT_MARGIN, Family, KernelSpec, as_point, moment, tail_bound
from .metric import RadialMetric

DEFAULT_DEPTH = 512
DEFAULT_TOL = 1e-10


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class RationalWeightRule:
    """Closed-form weights ``w_l**2 = scale * prod(l + num) / prod(l + den)``.

    Shifts ``num``/``den`` are stored as exact fractions with common factors
    cancelled, so two rules describe the same weights iff they compare equal.
    """

    scale: Fraction = Fraction(1)
    num: tuple = ()
    den: tuple = ()

    def __post_init__(self):
        num = sorted(_frac(x) for x in self.num)
        den = sorted(_frac(x) for x in self.den)
        for x in list(num):
            if x in den:
                num.remove(x)
                den.remove(x)
        if any(x <= 0 for x in num + den):
            raise ValueError("rule shifts must be positive so every weight is positive and finite")
        if len(num) > len(den):
            raise ValueError("weights grow without bound; shift would be unbounded")
        scale = _frac(self.scale)
        if scale <= 0:
            raise ValueError("scale must be positive")
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "num", tuple(num))
        object.__setattr__(self, "den", tuple(den))

    def weight_squared(self, l: int) -> float:
        out = float(self.scale)
        for a in self.num:
            out *= l + float(a)
        for b in self.den:
            out /= l + float(b)
        return out

    def weight(self, l: int) -> float:
        return math.sqrt(self.weight_squared(l))

    def to_json(self) -> dict:
        return {
            "kind": "rational",
            "scale": str(self.scale),
            "num": [str(x) for x in self.num],
            "den": [str(x) for x in self.den],
        }


def bergman_power_rule(m: int, k: int, alpha: float = 0.0) -> RationalWeightRule:
    """Weights of ``M_{z^m}`` on ``L_{m,k}`` in the weighted Bergman space.

    ``mu_n = prod_{j<=n} j/(j+1+alpha)`` so the squared weight is
    ``prod_{i=1..m} (m l + k + i) / (m l + k + i + 1 + alpha)``.
    Taking ``alpha = -1`` gives the Hardy space (all weights one).
    """
    a = Fraction(alpha)
    num = [Fraction(k + i, m) for i in range(1, m + 1)]
    den = [(k + i + 1 + a) / m for i in range(1, m + 1)]
    return RationalWeightRule(Fraction(1), tuple(num), tuple(den))


class Verdict(str, enum.Enum):
    UNITARILY_EQUIVALENT = "unitarily-equivalent"
    SIMILAR_NOT_UNITARY = "similar-not-unitary"
    NOT_SIMILAR = "not-similar"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, eq=False)
class WeightedShift:
    """A bounded unilateral weighted shift.

    Backed either by a closed-form ``rule`` or by a finite ``table`` with an
    optional constant ``tail`` weight (``None`` means weights past the table
    are unknown).  ``descriptor`` is the JSON rule descriptor, if any.
    """

    rule: RationalWeightRule | None = None
    table: tuple = ()
    tail: float | None = None
    descriptor: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.rule is None and not self.table:
            raise ValueError("a shift needs a rule or a weight table")
        if any(not (w > 0 and math.isfinite(w)) for w in self.table):
            raise ValueError("weights must be positive and finite")
        if self.tail is not None and not self.tail > 0:
            raise ValueError("tail weight must be positive")
        object.__setattr__(self, "table", tuple(float(w) for w in self.table))

    @classmethod
    def from_table(cls, weights, tail: float | None = None) -> "WeightedShift":
        return cls(table=tuple(weights), tail=tail)

    @property
    def is_closed_form(self) -> bool:
        return self.rule is not None or self.tail is not None

    def available(self, depth: int) -> int:
        """How many of the first ``depth`` weights are known."""
        if self.is_closed_form:
            return depth
        return min(depth, len(self.table))

    def weight(self, l: int) -> float:
        if self.rule is not None:
            return self.rule.weight(l)
        if l < len(self.table):
            return self.table[l]
        if self.tail is not None:
            return self.tail
        raise TruncationError(f"weight {l} lies beyond the table of length {len(self.table)}")

    def weights(self, L: int) -> np.ndarray:
        return np.array([self.weight(l) for l in range(L)])

    def betas(self, L: int) -> np.ndarray:
        """Cumulative products ``beta_l = w_0 ... w_{l-1}``, ``beta_0 = 1``."""
        b = np.empty(L)
        b[0] = 1.0
        for l in range(1, L):
            b[l] = b[l - 1] * self.weight(l - 1)
        return b

    def same_rule(self, other: "WeightedShift") -> bool:
        """Symbolic equality of the weight rules (not a numerical comparison)."""
        if self.rule is not None or other.rule is not None:
            return self.rule is not None and self.rule == other.rule
        return self.table == other.table and self.tail == other.tail and self.tail is not None

    # serialisation ------------------------------------------------------
    def to_json(self) -> dict:
        if self.descriptor is not None:
            return dict(self.descriptor)
        if self.rule is not None:
            return self.rule.to_json()
        out = {"kind": "table", "weights": list(self.table)}
        if self.tail is not None:
            out["tail"] = self.tail
        return out

    @classmethod
    def from_json(cls, doc) -> "WeightedShift":
        if isinstance(doc, str):
            doc = json.loads(doc)
        kind = doc["kind"]
        if kind == "bergman-power":
            m, k = int(doc.get("m", 1)), int(doc.get("k", 0))
            alpha = float(doc.get("alpha", 0.0))
            return cls(bergman_power_rule(m, k, alpha), descriptor=dict(doc))
        if kind == "hardy":
            return cls(RationalWeightRule(), descriptor=dict(doc))
        if kind == "drury-arveson-slice":
            return drury_arveson_slice_shift(int(doc["ell"]))
        if kind == "rational":
            rule = RationalWeightRule(
                Fraction(doc.get("scale", "1")),
                tuple(Fraction(x) for x in doc.get("num", [])),
                tuple(Fraction(x) for x in doc.get("den", [])),
            )
            return cls(rule)
        if kind == "table":
            return cls(table=tuple(doc["weights"]), tail=doc.get("tail"))
        raise ValueError(f"unknown shift kind {kind!r}")

    def to_csv(self, L: int | None = None) -> str:
        L = len(self.table) if L is None else L
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index", "weight"])
        for l in range(L):
            writer.writerow([l, repr(self.weight(l))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, tail: float | None = None) -> "WeightedShift":
        rows = list(csv.DictReader(io.StringIO(text)))
        rows.sort(key=lambda r: int(r["index"]))
        if [int(r["index"]) for r in rows] != list(range(len(rows))):
            raise ValueError("weight table indices must be 0..L-1 without gaps")
        return cls(table=tuple(float(r["weight"]) for r in rows), tail=tail)


def restriction_shift(spec: KernelSpec, m: int, k: int, length: int = DEFAULT_DEPTH) -> WeightedShift:
    """Matrix of ``M_{z^m}`` on ``L_{m,k}`` in its normalised monomial basis."""
    if spec.variables != 1:
        raise ArityError("restriction_shift needs a one-variable family")
    if m < 1 or not 0 <= k < m:
        raise ValueError(f"need m >= 1 and 0 <= k < m, got m={m}, k={k}")
    if length < 1:
        raise ValueError("length must be >= 1")
    if spec.family is Family.HARDY:
        return WeightedShift(RationalWeightRule(), descriptor={"kind": "hardy"})
    if spec.family is Family.BERGMAN:
        desc = {"kind": "bergman-power", "m": m, "k": k}
        if spec.alpha != 0:
            desc["alpha"] = spec.alpha
        return WeightedShift(bergman_power_rule(m, k, spec.alpha), descriptor=desc)
    weights = []
    for l in range(length):
        try:
            hi = moment(spec, m * (l + 1) + k)
        except TruncationError:
            break
        weights.append(math.sqrt(hi / moment(spec, m * l + k)))
    tail = None
    if spec.tail == "geometric" and len(weights) == length:
        # past the table the moments are constant so the weights are 1
        top = spec.table_degree
        if m * length + k > top:
            tail = 1.0
    if not weights:
        raise TruncationError("moment table too short for a single weight")
    return WeightedShift(table=tuple(weights), tail=tail)


def drury_arveson_slice_shift(ell: int) -> WeightedShift:
    """``M_{z_1}`` on the slice ``span{z_1^a z_2^ell}`` of H^2_2: ``w_a^2 = (a+1)/(a+ell+1)``."""
    rule = RationalWeightRule(Fraction(1), (Fraction(1),), (Fraction(ell + 1),))
    return WeightedShift(rule, descriptor={"kind": "drury-arveson-slice", "ell": ell})


def slice_shift(spec: KernelSpec, fixed: tuple, variable: int = 0, length: int = 64) -> WeightedShift:
    """``M_{z_variable}`` on ``span{z^alpha}`` with the other exponents pinned to ``fixed``.

    Weights are read off the moments, so this works for any diagonal family.
    ``fixed`` lists the exponents of the remaining variables in order.
    """
    if len(fixed) != spec.variables - 1:
        raise ArityError(f"need {spec.variables - 1} fixed exponents, got {len(fixed)}")

    def idx(a):
        full = list(fixed)
        full.insert(variable, a)
        return tuple(full)

    weights = [math.sqrt(moment(spec, idx(a + 1)) / moment(spec, idx(a))) for a in range(length)]
    return WeightedShift(table=tuple(weights))


# equivalence and similarity --------------------------------------------

@dataclass(frozen=True, eq=False)
class SimilarityVerdict:
    verdict: Verdict
    coefficients: np.ndarray
    bounds: tuple
    depth: int

    @property
    def similar(self) -> bool | None:
        if self.verdict is Verdict.INCONCLUSIVE:
            return None
        return self.verdict is not Verdict.NOT_SIMILAR

    @property
    def unitarily_equivalent(self) -> bool:
        return self.verdict is Verdict.UNITARILY_EQUIVALENT

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "depth": self.depth,
            "bounds": [float(self.bounds[0]), float(self.bounds[1])],
            "coefficients": [float(c) for c in self.coefficients],
        }


def _intertwiner(source: WeightedShift, target: WeightedShift, L: int) -> np.ndarray:
    # Y S = T Y with Y e_l = c_l f_l  <=>  c_{l+1} w_source[l] = c_l w_target[l]
    c = np.empty(L)
    c[0] = 1.0
    for l in range(L - 1):
        c[l + 1] = c[l] * target.weight(l) / source.weight(l)
    return c


def _asymptotic_verdict(source: WeightedShift, target: WeightedShift) -> Verdict | None:
    """Decide boundedness of ``c_l`` exactly from closed-form rules.

    ``c_l^2 = prod_{j<l} r_j`` with ``r_j = (w_target[j] / w_source[j])^2``.
    For rational rules ``log r_j = log(s) + (A / j) + O(1/j^2)`` when the
    factor counts match; the product converges to a positive limit iff
    ``s == 1`` and ``A == 0``, otherwise ``c_l`` tends to 0 or infinity.
    Table shifts with a constant tail are handled the same way (A = 0).
    """
    def parts(s):
        if s.rule is not None:
            return s.rule.scale, list(s.rule.num), list(s.rule.den)
        if s.tail is not None:
            return Fraction(s.tail) ** 2, [], []
        return None

    ps, pt = parts(source), parts(target)
    if ps is None or pt is None:
        return None
    scale = pt[0] / ps[0]
    num = pt[1] + ps[2]
    den = pt[2] + ps[1]
    if scale != 1 or len(num) != len(den):
        return Verdict.NOT_SIMILAR
    if sum(num, Fraction(0)) != sum(den, Fraction(0)):
        return Verdict.NOT_SIMILAR
    return Verdict.SIMILAR_NOT_UNITARY


def similarity_intertwiner(
    source: WeightedShift,
    target: WeightedShift,
    depth: int = DEFAULT_DEPTH,
    tol: float = DEFAULT_TOL,
) -> SimilarityVerdict:
    """Diagonal ``Y`` with ``Y source = target Y`` and the resulting verdict."""
    if depth < 2:
        raise ValueError("depth must be >= 2")
    L = min(source.available(depth), target.available(depth))
    if L < 2:
        return SimilarityVerdict(Verdict.INCONCLUSIVE, np.ones(max(L, 1)), (1.0, 1.0), L)
    c = _intertwiner(source, target, L)
    bounds = (float(np.min(np.abs(c))), float(np.max(np.abs(c))))
    verdict = None
    if L == depth:
        verdict = _asymptotic_verdict(source, target)
    if verdict is Verdict.SIMILAR_NOT_UNITARY and source.same_rule(target):
        verdict = Verdict.UNITARILY_EQUIVALENT
    if verdict is Verdict.SIMILAR_NOT_UNITARY:
        # the proof says c_l converges; the computed tail must look Cauchy
        tail = c[-max(2, L // 8):]
        if not (bounds[0] > 0 and np.isfinite(bounds[1])):
            verdict = None
        elif np.ptp(tail) > 0.5 * max(bounds[0], 1e-300):
            verdict = None
    if verdict is None:
        verdict = Verdict.INCONCLUSIVE
    return SimilarityVerdict(verdict, c, bounds, L)


def unitarily_equivalent(
    a: WeightedShift,
    b: WeightedShift,
    depth: int = DEFAULT_DEPTH,
    tol: float = DEFAULT_TOL,
) -> SimilarityVerdict:
    """Compare weights; fall through to similarity analysis when they differ."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    L = min(a.available(depth), b.available(depth))
    wa, wb = a.weights(L), b.weights(L)
    agree = bool(np.all(np.abs(wa - wb) <= tol))
    if agree and L == depth and a.same_rule(b):
        return SimilarityVerdict(Verdict.UNITARILY_EQUIVALENT, np.ones(L), (1.0, 1.0), L)
    if agree and L < depth:
        return SimilarityVerdict(Verdict.INCONCLUSIVE, np.ones(max(L, 1)), (1.0, 1.0), L)
    if depth < 2:
        return SimilarityVerdict(Verdict.INCONCLUSIVE, np.ones(max(L, 1)), (1.0, 1.0), L)
    return similarity_intertwiner(a, b, depth, tol)


# metrics and sub-bundle kernels ----------------------------------------

def shift_kernel_metric(s: WeightedShift, terms: int = 200) -> RadialMetric:
    """Metric ``g(r) = sum r^l / beta_l^2``: squared norm of the eigenvector of ``s*``."""
    if terms < 2:
        raise ValueError("terms must be >= 2")
    a = np.empty(terms)
    a[0] = 1.0
    for l in range(1, terms):
        a[l] = a[l - 1] / s.weight(l - 1) ** 2
    metric = RadialMetric.from_coefficients(a, label="shift")
    if s.rule is not None:
        # 1/w_l^2 is monotone in l for rational rules with positive shifts,
        # so the sup past the table is the larger of its limit and last value
        limit = 1.0 / float(s.rule.scale) if len(s.rule.num) == len(s.rule.den) else math.inf
        rho = max(1.0 / s.weight(terms - 1) ** 2, limit)
        metric = RadialMetric(a, None, rho, "shift")
    elif s.tail is not None:
        metric = RadialMetric(a, None, max(1.0 / s.tail**2, metric.ratio_bound), "shift")
    return metric


def restriction_kernel(
    spec: KernelSpec,
    m: int,
    k: int,
    z: complex,
    w: complex,
    terms: int = 400,
    margin: float = DEFAULT_MARGIN,
) -> complex:
    """Reproducing kernel of ``L_{m,k}`` at ``(z, w)``, built from the shift metric.

    ``K_{m,k}(z, w) = (z conj(w))^k / mu_k * g((z conj(w))^m)`` with ``g`` the
    metric of :func:`restriction_shift`.
    """
    (zc,) = as_point(spec, z, margin).coordinates
    (wc,) = as_point(spec, w, margin).coordinates
    x = zc * wc.conjugate()
    g = shift_kernel_metric(restriction_shift(spec, m, k, length=terms), terms)
    bound = g.tail_bound(abs(x) ** m)
    if bound > 1e-12 * g.coefficients[0]:
        raise TruncationError(f"restriction kernel tail {bound:.3e} too large; raise terms", bound=bound)
    return x**k / moment(spec, k) * g.value_complex(x**m)
