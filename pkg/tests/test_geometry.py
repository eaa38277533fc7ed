import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hilmod import KernelSpec
from hilmod.errors import InvariantUndefinedError, MethodError, TruncationError
from hilmod.geometry import (
    Frame,
    LatticeVerdict,
    branch_power_frame,
    bundle_curvature,
    constant_frame,
    derived_reducing_curvature,
    fd_bundle_curvature,
    fd_line_curvature,
    grammian,
    line_curvature,
    metric_h,
    power_frame,
    printed_reducing_curvature,
    reducing_curvatures,
)
from hilmod.metric import RadialMetric
from hilmod.shifts import restriction_shift, shift_kernel_metric

BERGMAN = KernelSpec.bergman()


def grid25(radius=0.9):
    pts = []
    for r in np.linspace(0, radius, 5):
        for t in np.linspace(0, 2 * np.pi, 5, endpoint=False):
            pts.append(complex(r * cmath.exp(1j * t)))
    return pts


# -- line case -------------------------------------------------------------

@pytest.mark.parametrize("method", ["series", "closed"])
def test_h_golden_values(method):
    gh, gb = RadialMetric.hardy(), RadialMetric.bergman()
    ga = {a: RadialMetric.bergman(a) for a in (0.5, 2.0)}
    for om in grid25():
        r = abs(om) ** 2
        if method == "series" and abs(om) > 0.85:
            continue  # covered by the closed path
        assert metric_h(gh, om, method) == pytest.approx(1 - r, abs=1e-9)
        assert metric_h(gb, om, method) == pytest.approx((1 - r) / math.sqrt(2), abs=1e-9)
        for a, g in ga.items():
            assert metric_h(g, om, method) == pytest.approx((1 - r) / math.sqrt(2 + a), abs=1e-9)


def test_hardy_curvature_at_origin():
    assert line_curvature(RadialMetric.hardy(), 0) == -1.0


def test_flat_metric_has_no_h():
    with pytest.raises(InvariantUndefinedError):
        metric_h(RadialMetric.constant(2.0), 0.3)


def test_fd_matches_series_line():
    g = RadialMetric.bergman()
    for om in (0.0, 0.3 + 0.2j, -0.5j):
        assert fd_line_curvature(g, om) == pytest.approx(line_curvature(g, om), rel=1e-7)


def test_fd_rejects_stencil_outside_domain():
    with pytest.raises(MethodError):
        fd_line_curvature(RadialMetric.hardy(), 0.9985, step=1e-3)


def test_richardson_order():
    g = RadialMetric.bergman()
    om = 0.3 + 0.1j
    exact = line_curvature(g, om)
    e1 = abs(fd_line_curvature(g, om, step=2e-2, richardson=False) - exact)
    e2 = abs(fd_line_curvature(g, om, step=1e-2, richardson=False) - exact)
    assert 3.5 <= e1 / e2 <= 4.5
    assert abs(fd_line_curvature(g, om, step=1e-2) - exact) < e2 / 10


def test_scaled_metric_same_curvature():
    g = RadialMetric.bergman()
    for om in (0.2, 0.4j):
        assert line_curvature(g.scaled(7.5), om) == pytest.approx(line_curvature(g, om), rel=1e-12)


@given(st.floats(0, 0.75), st.floats(0, 2 * math.pi), st.floats(0, 3))
def test_weighted_bergman_curvature_formula(r, t, alpha):
    om = r * cmath.exp(1j * t)
    K = line_curvature(RadialMetric.bergman(alpha), om)
    assert K == pytest.approx(-(2 + alpha) / (1 - r * r) ** 2, rel=1e-10)


# -- bundle case -------------------------------------------------------------

def _rational_m2(om):
    r = abs(om) ** 2
    return -(3 + 2 * r + 3 * r * r) / (1 - r * r) ** 2, -2 / (1 - r) ** 2


def test_power_frame_square_at_origin():
    rep = bundle_curvature(power_frame(BERGMAN, 2), 0)
    assert np.allclose(rep.matrix, np.diag([-3, -2]), atol=1e-8)
    assert rep.verdict is LatticeVerdict.FINITE_DISCRETE


def test_power_frame_square_rational_expressions():
    frame = power_frame(BERGMAN, 2)
    pts = [0.0, 0.3, 0.5j, -0.7, 0.35 + 0.35j, 0.6 * cmath.exp(2j), 0.1j, 0.45, 0.2 - 0.6j]
    for om in pts:
        K = bundle_curvature(frame, om, "series", cross_check=False).matrix
        k0, k1 = _rational_m2(om)
        assert abs(K[0, 0] - k0) <= 1e-6 * max(1, abs(k0))
        assert abs(K[1, 1] - k1) <= 1e-6 * max(1, abs(k1))
        Kfd = fd_bundle_curvature(frame, om)
        assert np.max(np.abs(K - Kfd)) <= 1e-6 * max(1, np.abs(K).max())


def test_hardy_power_frame_is_scalar():
    frame = power_frame(KernelSpec.hardy(), 3)
    om = 0.4 + 0.2j
    r = abs(om) ** 2
    rep = bundle_curvature(frame, om)
    assert np.allclose(np.diag(rep.matrix), -1 / (1 - r) ** 2, rtol=1e-9)
    assert rep.verdict is LatticeVerdict.INDETERMINATE
    assert rep.multiplicities == (3, 3, 3)


def test_constant_frame_is_flat():
    rep = bundle_curvature(constant_frame(2), 0.3)
    assert np.allclose(rep.matrix, 0)


def test_frame_scaling_invariance():
    frame = power_frame(BERGMAN, 2, terms=150)
    D = np.array([[2.0, 0.5 - 1j], [0.3j, 1.5]])
    om = 0.25 - 0.1j
    base = bundle_curvature(frame, om).eigenvalues
    scaled = bundle_curvature(frame.rescaled(D), om, "fd").eigenvalues
    assert np.allclose(np.sort(scaled), np.sort(base), atol=1e-6)
    diag = bundle_curvature(frame.rescaled(np.diag([3.0, 0.2j])), om, "fd").matrix
    assert np.allclose(diag, np.diag(base), atol=1e-6)


def test_antiholomorphic_frame_change_is_similarity():
    frame = power_frame(BERGMAN, 2, terms=150)

    def F(om):
        return np.array([[1.0, om], [0.5 * om * om, 2.0 + om]])

    secs = frame.sections

    def make(i):
        return lambda om: sum(np.conj(F(om)[i, j]) * secs[j](om) for j in range(2))

    changed = Frame((make(0), make(1)), frame.moments)
    om = 0.2 + 0.15j
    K0 = bundle_curvature(frame, om).matrix
    K1 = bundle_curvature(changed, om, "fd").matrix
    assert np.allclose(np.sort(np.linalg.eigvals(K1).real), np.sort(np.diag(K0).real), atol=1e-6)
    assert np.trace(K1).real == pytest.approx(np.trace(K0).real, abs=1e-6)


@pytest.mark.parametrize("m", [2, 3])
@pytest.mark.parametrize("rotation", [0, 1, 2])
def test_branch_independence(m, rotation):
    om = 0.3 - 0.2j
    base = power_frame(BERGMAN, m, terms=120)
    branch = branch_power_frame(BERGMAN, m, terms=120, rotation=rotation)
    assert np.allclose(branch.coefficients(om), base.coefficients(om), rtol=1e-9, atol=1e-12)
    assert np.allclose(grammian(branch, om), grammian(base, om), rtol=1e-10)
    with pytest.raises(ValueError):
        branch.coefficients(0)


def test_grammian_truncation_guard():
    frame = power_frame(KernelSpec.hardy(), 2, terms=20)
    with pytest.raises(TruncationError):
        grammian(frame, 0.9)


@given(st.floats(0, 0.7), st.floats(0, 2 * math.pi))
def test_power_frame_grammian_diagonal(r, t):
    om = r * cmath.exp(1j * t)
    H = grammian(power_frame(BERGMAN, 3, terms=200), om)
    assert np.allclose(H, np.diag(np.diag(H)), atol=1e-14)
    assert np.all(np.diag(H).real > 0)


# -- reducing curvatures ------------------------------------------------------

@pytest.mark.parametrize("m", range(1, 7))
def test_reducing_curvatures_derived(m):
    rc = reducing_curvatures(BERGMAN, m)
    for k, v in enumerate(rc.values):
        # independent oracle: -a_1/a_0 with a_l = mu_k / mu_{m l + k}
        a0, a1 = 1.0, (m + k + 1) / (k + 1)
        assert v == pytest.approx(-a1 / a0, abs=1e-12)
        assert v == pytest.approx(derived_reducing_curvature(m, k), abs=1e-12)
        g = shift_kernel_metric(restriction_shift(BERGMAN, m, k, 200), 200)
        assert abs(fd_line_curvature(g, 0.0) - v) <= 1e-8
    assert len(set(rc.values)) == m
    assert rc.verdict is LatticeVerdict.FINITE_DISCRETE
    assert rc.to_json()["verdict"] == "finite-discrete"


def test_printed_closed_form_exposed():
    assert printed_reducing_curvature(2, 0) is None
    assert printed_reducing_curvature(3, 1) == -4.0
    assert derived_reducing_curvature(2, 0) == -3.0 and derived_reducing_curvature(2, 1) == -2.0


def test_reducing_curvatures_off_origin():
    om = 0.4
    rc = reducing_curvatures(BERGMAN, 2, om)
    assert np.allclose(rc.values, _rational_m2(om), rtol=1e-9)
