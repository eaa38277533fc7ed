import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hilmod import KernelSpec
from hilmod.kernels import kernel_eval
from hilmod.shifts import (
    RationalWeightRule,
    Verdict,
    WeightedShift,
    bergman_power_rule,
    drury_arveson_slice_shift,
    restriction_kernel,
    restriction_shift,
    similarity_intertwiner,
    slice_shift,
    unitarily_equivalent,
)

BERGMAN = KernelSpec.bergman()
L = 512


def test_bergman_square_weights():
    ls = np.arange(L)
    T0 = restriction_shift(BERGMAN, 2, 0)
    T1 = restriction_shift(BERGMAN, 2, 1)
    assert np.max(np.abs(T0.weights(L) - np.sqrt((2 * ls + 1) / (2 * ls + 3)))) <= 1e-12
    assert np.max(np.abs(T1.weights(L) - np.sqrt((ls + 1) / (ls + 2)))) <= 1e-12


def test_rule_cancellation_is_symbolic():
    # T_{2,1} reduces to the Bergman M_z rule after cancelling common factors
    assert bergman_power_rule(2, 1) == bergman_power_rule(1, 0)
    assert bergman_power_rule(2, 0) != bergman_power_rule(1, 0)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_power_weights_are_products_of_mz_weights(m):
    mz = restriction_shift(BERGMAN, 1, 0).weights(m * 40 + m)
    for k in range(m):
        w = restriction_shift(BERGMAN, m, k).weights(40)
        ref = [math.prod(mz[m * l + k + j] for j in range(m)) for l in range(40)]
        assert np.allclose(w, ref, rtol=1e-14, atol=0)


def test_t1_unitarily_equivalent_to_bergman_shift():
    v = unitarily_equivalent(restriction_shift(BERGMAN, 2, 1), restriction_shift(BERGMAN, 1, 0))
    assert v.verdict is Verdict.UNITARILY_EQUIVALENT


def test_t0_t1_similar_not_unitary():
    v = unitarily_equivalent(restriction_shift(BERGMAN, 2, 0), restriction_shift(BERGMAN, 2, 1))
    assert v.verdict is Verdict.SIMILAR_NOT_UNITARY
    assert not v.unitarily_equivalent and v.similar


def test_bergman_to_t0_intertwiner_oracle():
    src = restriction_shift(BERGMAN, 1, 0)
    tgt = restriction_shift(BERGMAN, 2, 0)
    v = similarity_intertwiner(src, tgt, L)
    ls = np.arange(L)
    assert np.allclose(v.coefficients, np.sqrt((ls + 1) / (2 * ls + 1)), rtol=1e-12)
    assert v.bounds[0] >= 0.7 and v.bounds[1] == pytest.approx(1.0)
    assert v.verdict is Verdict.SIMILAR_NOT_UNITARY
    # Y S = T Y on basis vectors
    c, ws, wt = v.coefficients, src.weights(L), tgt.weights(L)
    assert np.allclose(c[1:] * ws[:-1], wt[:-1] * c[:-1], rtol=1e-13)


def test_hardy_vs_bergman_not_similar():
    v = unitarily_equivalent(restriction_shift(KernelSpec.hardy(), 1, 0), restriction_shift(BERGMAN, 1, 0))
    assert v.verdict is Verdict.NOT_SIMILAR
    assert v.similar is False


def test_table_without_tail_is_inconclusive():
    a = WeightedShift.from_table([0.5, 0.6, 0.7])
    b = WeightedShift.from_table([0.5, 0.6, 0.8])
    assert unitarily_equivalent(a, b).verdict is Verdict.INCONCLUSIVE
    assert unitarily_equivalent(a, a).verdict is Verdict.INCONCLUSIVE


def test_custom_table_restriction():
    spec = KernelSpec.custom({n: 1 / (n + 1) for n in range(60)}, tail="reject")
    s = restriction_shift(spec, 2, 0, length=20)
    ls = np.arange(20)
    assert np.allclose(s.weights(20), np.sqrt((2 * ls + 1) / (2 * ls + 3)), rtol=1e-14)


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_orthogonal_decomposition_complete(m):
    for z, w in [(0.5, 0.5), (0.3 + 0.4j, -0.2 + 0.1j), (0.7j, 0.6)]:
        total = sum(restriction_kernel(BERGMAN, m, k, z, w) for k in range(m))
        assert total == pytest.approx(kernel_eval(BERGMAN, z, w), rel=1e-12)


@pytest.mark.parametrize("ell", [0, 1, 2, 3, 4])
def test_drury_arveson_slice_is_weighted_bergman(ell):
    computed = slice_shift(KernelSpec.drury_arveson(2), (ell,), 0, 50)
    closed = drury_arveson_slice_shift(ell)
    assert np.allclose(computed.weights(50), closed.weights(50), rtol=1e-14)
    if ell == 0:
        ref = restriction_shift(KernelSpec.hardy(), 1, 0)
    else:
        ref = restriction_shift(KernelSpec.bergman(ell - 1), 1, 0)
    assert np.allclose(closed.weights(50), ref.weights(50), rtol=1e-14)
    assert unitarily_equivalent(closed, ref).verdict is Verdict.UNITARILY_EQUIVALENT


def test_json_and_csv_round_trip():
    s = restriction_shift(BERGMAN, 3, 1)
    again = WeightedShift.from_json(s.to_json())
    assert again.same_rule(s)
    t = WeightedShift.from_csv(s.to_csv(10))
    assert np.allclose(t.weights(10), s.weights(10), rtol=1e-15)
    with pytest.raises(ValueError):
        WeightedShift.from_csv("index,weight\n0,0.5\n2,0.5\n")


def test_invalid_weights_rejected():
    with pytest.raises(ValueError):
        WeightedShift.from_table([0.5, -1.0])
    with pytest.raises(ValueError):
        restriction_shift(BERGMAN, 2, 2)


@given(st.integers(1, 5), st.data())
def test_powers_mutually_similar(m, data):
    k1 = data.draw(st.integers(0, m - 1))
    k2 = data.draw(st.integers(0, m - 1))
    v = unitarily_equivalent(restriction_shift(BERGMAN, m, k1), restriction_shift(BERGMAN, m, k2), 256)
    if k1 == k2 or {k1, k2} == {m - 1, m - 1}:
        assert v.verdict is Verdict.UNITARILY_EQUIVALENT
    else:
        assert v.verdict in (Verdict.SIMILAR_NOT_UNITARY, Verdict.UNITARILY_EQUIVALENT)
        assert v.bounds[0] > 0 and np.isfinite(v.bounds[1])


@given(st.fractions(Fraction(1, 4), Fraction(4)), st.fractions(Fraction(1, 4), Fraction(4)))
def test_rational_rule_weights(a, b):
    rule = RationalWeightRule(Fraction(1), (Fraction(a),), (Fraction(b),))
    s = WeightedShift(rule)
    for l in (0, 3, 17):
        assert s.weight(l) == pytest.approx(math.sqrt((l + a) / (l + b)), rel=1e-14)
