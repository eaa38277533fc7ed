import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hilmod import ArityError, DomainError, KernelSpec, TruncationError
from hilmod.kernels import (
    eigenvector_residual,
    gram_matrix,
    kernel_eval,
    kernel_series,
    moment,
    multi_indices,
    multiplier_matrix,
    shift_matrix,
    tail_bound,
)

coord = st.complex_numbers(max_magnitude=0.6, allow_nan=False, allow_infinity=False)


def _da_moment_bruteforce(alpha):
    # ||z^alpha||^2 in the symmetric Fock space: 1 / (number of words with content alpha)
    letters = [i for i, a in enumerate(alpha) for _ in range(a)]
    words = set(itertools.permutations(letters))
    return 1.0 / len(words)


# -- golden values -------------------------------------------------------

@pytest.mark.parametrize("z,w", [(0.5, 0.5), (0.3 + 0.4j, -0.2j), (0.0, 0.9)])
def test_closed_forms_one_variable(z, w):
    x = z * np.conj(w)
    assert kernel_eval(KernelSpec.hardy(), z, w) == pytest.approx(1 / (1 - x), rel=1e-14)
    assert kernel_eval(KernelSpec.bergman(), z, w) == pytest.approx(1 / (1 - x) ** 2, rel=1e-14)
    assert kernel_eval(KernelSpec.bergman(1.5), z, w) == pytest.approx((1 - x) ** -3.5, rel=1e-13)


def test_bergman_at_half():
    assert kernel_eval(KernelSpec.bergman(), 0.5, 0.5) == pytest.approx(16 / 9, rel=1e-15)


def test_series_matches_closed_form_within_bound():
    for spec in (KernelSpec.hardy(), KernelSpec.bergman(), KernelSpec.bergman(0.5)):
        s = kernel_series(spec, 0.5, 0.4 + 0.2j, terms=120)
        exact = kernel_eval(spec, 0.5, 0.4 + 0.2j, method="closed")
        assert abs(s.value - exact) <= s.tail_bound + 1e-14 * abs(exact)


def test_multivariable_closed_forms():
    z, w = (0.3, 0.2j), (0.1 - 0.2j, 0.4)
    ip = sum(a * np.conj(b) for a, b in zip(z, w))
    assert kernel_eval(KernelSpec.drury_arveson(2), z, w) == pytest.approx(1 / (1 - ip), rel=1e-14)
    prod = np.prod([1 / (1 - a * np.conj(b)) for a, b in zip(z, w)])
    assert kernel_eval(KernelSpec.hardy_polydisk(2), z, w) == pytest.approx(prod, rel=1e-14)
    assert kernel_series(KernelSpec.drury_arveson(2), z, w, terms=40).value == pytest.approx(1 / (1 - ip), rel=1e-12)


# -- moments -------------------------------------------------------------

@pytest.mark.parametrize("alpha", [(1, 0), (1, 1), (2, 1), (3, 2), (2, 2, 1), (1, 1, 1, 1)])
def test_drury_arveson_moments_by_counting(alpha):
    spec = KernelSpec.drury_arveson(len(alpha))
    assert moment(spec, alpha) == pytest.approx(_da_moment_bruteforce(alpha), rel=1e-15)


def test_bergman_moments_exact():
    spec = KernelSpec.bergman()
    for n in range(50):
        assert moment(spec, n) == 1 / (n + 1)
    spec = KernelSpec.bergman(2)
    # n! 3! / (n+3)! = 6 / ((n+1)(n+2)(n+3))
    for n in range(40):
        assert moment(spec, n) == pytest.approx(6 / ((n + 1) * (n + 2) * (n + 3)), rel=1e-15)


def test_fractional_bergman_moment_matches_gamma():
    alpha = 0.5
    for n in (0, 1, 7, 60):
        ref = math.exp(math.lgamma(n + 1) + math.lgamma(2 + alpha) - math.lgamma(n + 2 + alpha))
        assert moment(KernelSpec.bergman(alpha), n) == pytest.approx(ref, rel=1e-12)


def test_multi_indices_count():
    for n in range(1, 4):
        for d in range(6):
            assert len(list(multi_indices(n, d))) == math.comb(d + n - 1, n - 1)


# -- custom tables -------------------------------------------------------

def test_custom_table_round_trip(tmp_path):
    spec = KernelSpec.custom({0: 1.0, 1: 0.5, 2: 1 / 3, 3: 0.25})
    path = tmp_path / "m.json"
    path.write_text(json.dumps(spec.to_json()))
    again = KernelSpec.from_json(str(path))
    assert again == spec
    assert moment(again, 2) == 1 / 3
    assert moment(again, 10) == 0.25  # geometric tail: last moment repeated


def test_custom_reject_tail():
    spec = KernelSpec.custom({0: 1.0, 1: 0.5}, tail="reject")
    with pytest.raises(TruncationError):
        moment(spec, 5)
    with pytest.raises(TruncationError):
        kernel_eval(spec, 0.9, 0.9)


def test_custom_agrees_with_bergman_prefix():
    table = {n: 1 / (n + 1) for n in range(400)}
    spec = KernelSpec.custom(table, tail="geometric")
    z, w = 0.5 + 0.1j, 0.3
    assert kernel_eval(spec, z, w, terms=300) == pytest.approx(kernel_eval(KernelSpec.bergman(), z, w), rel=1e-12)


# -- domain and arity ----------------------------------------------------

def test_domain_and_arity_errors():
    with pytest.raises(DomainError):
        kernel_eval(KernelSpec.hardy(), 0.9995, 0.0)
    with pytest.raises(ArityError):
        kernel_eval(KernelSpec.drury_arveson(2), 0.1, 0.1)
    with pytest.raises(DomainError):
        kernel_eval(KernelSpec.drury_arveson(2), (0.8, 0.8), (0, 0))
    # polydisk allows coordinates up to 1 - margin separately
    kernel_eval(KernelSpec.hardy_polydisk(2), (0.8, 0.8), (0, 0))


def test_tail_bound_decreases():
    spec = KernelSpec.bergman()
    bounds = [tail_bound(spec, (0.7,), (0.7,), N) for N in (20, 40, 80)]
    assert bounds[0] > bounds[1] > bounds[2]


# -- properties ----------------------------------------------------------

@given(st.lists(coord, min_size=1, max_size=8))
def test_gram_positive_semidefinite(points):
    delta = 0.05
    pts = [p for p in points if abs(p) <= 1 - delta]
    for spec in (KernelSpec.hardy(), KernelSpec.bergman(), KernelSpec.bergman(0.7)):
        G = gram_matrix(spec, pts)
        lam = np.linalg.eigvalsh(0.5 * (G + G.conj().T))
        assert lam.min() >= -1e-10 * max(1.0, np.abs(G).max())


@given(coord, coord, coord, coord)
def test_hermitian_symmetry_bit_exact(a, b, c, d):
    for spec, z, w in (
        (KernelSpec.bergman(0.3), a, b),
        (KernelSpec.drury_arveson(2), (a / 2, c / 2), (b / 2, d / 2)),
        (KernelSpec.hardy_polydisk(2), (a, c), (b, d)),
    ):
        assert kernel_eval(spec, z, w) == np.conj(kernel_eval(spec, w, z))
    spec = KernelSpec.custom({0: 1.0, 1: 0.5, 2: 0.4}, tail="geometric")
    assert kernel_eval(spec, a, b) == np.conj(kernel_eval(spec, b, a))


@given(st.floats(0.0, 0.8), st.floats(0, 2 * math.pi))
def test_eigenvector_residual_decays(r, t):
    om = r * complex(math.cos(t), math.sin(t))
    spec = KernelSpec.bergman()
    p = [0.3, -1.0, 0.5j]
    res = [eigenvector_residual(spec, om, p, N) for N in (20, 60, 200)]
    floor = 1e-14
    assert res[2] <= max(res[0], floor) + floor
    assert res[2] <= max(2 * r ** 150, floor) * 10 or res[2] <= floor


def test_eigenvector_residual_hardy_small():
    assert eigenvector_residual(KernelSpec.hardy(), 0.5, [0, 1], 80) < 1e-20


def test_multiplier_matrix_composition():
    spec = KernelSpec.bergman()
    S = shift_matrix(spec, 12)
    p = [1.0, 2.0, -1.0]
    M = multiplier_matrix(spec, p, 12)
    assert np.allclose(M, np.eye(12) + 2 * S - S @ S)
