import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from symbidisc.bipoly import (
    BiPoly, classify_bidisc, classify_gamma, compose_pi, desymmetrize, det_pencil,
    divides, eval_poly, fiber_roots, sample_variety, square_free, swap_symmetrize,
)
from symbidisc.errors import SymmetryError, UnsupportedDivisorError
from symbidisc.numlin import numerical_radius, spectral_radius

from conftest import random_unitary

Z1, Z2 = BiPoly.z1(), BiPoly.z2()
ONE = BiPoly.const(1)
ROYAL = 4 * Z2 - Z1 ** 2
A_PENCIL = np.array([[0, 2, 0], [0, 0, 0], [0, 0, 1]], complex)


def same_up_to_constant(p, q, tol=1e-9):
    (i, j, c) = q.terms[-1]
    k = p.coeff(i, j) / c
    return k != 0 and p.allclose(k * q, tol)


@pytest.mark.parametrize("p, z, expected", [
    (ROYAL, (2, 1), 0),
    (Z1 - Z2, (1j, 1j), 0),
    (ONE - Z1 * Z2, (0.5, 0.5), 0.75),
])
def test_eval(p, z, expected):
    assert eval_poly(p, *z) == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("p, expected", [
    (Z1, Z1 + Z2),
    (ROYAL, -(Z1 - Z2) ** 2),
    (Z2, Z1 * Z2),
])
def test_compose_pi(p, expected):
    assert compose_pi(p).allclose(expected, 1e-14)


@pytest.mark.parametrize("q, expected", [
    (-(Z1 - Z2) ** 2, ROYAL),
    (Z1 + Z2, Z1),
    (Z1 * Z2, Z2),
])
def test_desymmetrize(q, expected):
    assert desymmetrize(q).allclose(expected, 1e-12)


def test_desymmetrize_rejects_asymmetric():
    with pytest.raises(SymmetryError):
        desymmetrize(Z1 - Z2)


@pytest.mark.parametrize("q, expected", [
    (Z1 - Z2, -(Z1 - Z2) ** 2),
    (Z1, Z1 * Z2),
    (Z1 + Z2, (Z1 + Z2) ** 2),
])
def test_swap_symmetrize(q, expected):
    assert swap_symmetrize(q).allclose(expected, 1e-14)


def test_fiber_roots_examples():
    r = fiber_roots(ROYAL, 1, 1.0)
    np.testing.assert_allclose(r.roots, [0.25], atol=1e-14)
    assert not r.degenerate
    w = np.exp(0.7j)
    np.testing.assert_allclose(fiber_roots(Z1 - Z2, 1, w).roots, [w], atol=1e-14)
    r = fiber_roots(Z1 - ONE, 1, 1.0)
    assert r.degenerate and r.identically_zero


@pytest.mark.parametrize("p, toral, inner", [
    (Z1 - Z2, True, True),
    (ONE - Z1 * Z2, False, False),
    ((Z1 + Z2) * (Z1 * Z2 - ONE), True, False),
])
def test_classify_bidisc(p, toral, inner):
    v = classify_bidisc(p)
    assert v.toral is toral
    assert v.inner_toral is inner
    assert v.flags["toral"] == (v.flags["nonempty_interior"] and v.flags["boundary_escape_ok"])
    for z1, z2 in v.witnesses:
        assert abs(eval_poly(p, z1, z2)) <= 1e-8


def test_classify_bidisc_grid_floor():
    with pytest.raises(ValueError):
        classify_bidisc(Z1 - Z2, grid=32)


@pytest.mark.parametrize("p, expected", [
    (ROYAL, True),
    (Z2, False),
    (Z1 - 0.3 * Z2 - 0.3, True),
])
def test_classify_gamma(p, expected):
    assert classify_gamma(p).gamma_distinguished is expected


def test_classify_gamma_witnesses_on_variety():
    v = classify_gamma(Z2).verdict
    for s, p in v.witnesses:
        assert abs(eval_poly(Z2, s, p)) <= 1e-8


@pytest.mark.parametrize("F, expected", [
    ([[0.8]], 0.8 + 0.8 * Z2 - Z1),
    ([[0.0]], -Z1),
])
def test_det_pencil_scalar(F, expected):
    assert det_pencil(np.array(F, complex)).allclose(expected, 1e-12)


def test_det_pencil_matrix_first_example(rng):
    p = det_pencil(A_PENCIL, "matrix_first")
    assert same_up_to_constant(p, (ONE + Z2 - Z1) * (Z1 ** 2 - 4 * Z2))
    # oracle: direct determinants at random points
    for _ in range(25):
        z1, z2 = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        d = np.linalg.det(A_PENCIL + z2 * A_PENCIL.conj().T - z1 * np.eye(3))
        assert abs(eval_poly(p, z1, z2) - d) <= 1e-9 * max(1, abs(d))


@pytest.mark.parametrize("d, p, ok, quotient", [
    (Z1 - Z2, (Z1 - Z2) ** 3, True, (Z1 - Z2) ** 2),
    (Z1 ** 2 - 4 * Z2, ROYAL ** 2, True, Z1 ** 2 - 4 * Z2),
    (Z1 - Z2, ONE - Z1 * Z2, False, None),
])
def test_divides(d, p, ok, quotient):
    r = divides(d, p)
    assert r.divides is ok
    if ok:
        assert r.quotient.allclose(quotient, 1e-12)


def test_divides_rejects_non_monic():
    with pytest.raises(UnsupportedDivisorError):
        divides(Z1 * Z2 - ONE, Z1)


@pytest.mark.parametrize("p, expected", [
    ((Z1 - Z2) ** 3, Z1 - Z2),
    ((Z1 ** 2 - 4 * Z2) ** 2, Z1 ** 2 - 4 * Z2),
    ((Z1 - Z2) * (Z1 ** 2 - 4 * Z2), (Z1 - Z2) * (Z1 ** 2 - 4 * Z2)),
])
def test_square_free(p, expected):
    assert same_up_to_constant(square_free(p), expected)


def test_square_free_slices_have_simple_roots(rng):
    # oracle: on random z2-slices the reduced polynomial has no repeated root
    r = square_free((Z1 - Z2) * (Z1 ** 2 - 4 * Z2))
    for t in rng.standard_normal(50) + 1j * rng.standard_normal(50):
        roots = fiber_roots(r, 2, t).roots
        gaps = np.abs(roots[:, None] - roots[None, :]) + np.eye(len(roots))
        assert gaps.min() > 1e-6


def test_sample_variety_royal():
    pts = sample_variety(Z1 ** 2 - 4 * Z2, "GAMMA", 128)
    assert len(pts)
    z = pts[:, 0] / 2
    np.testing.assert_allclose(pts[:, 1], z ** 2, atol=1e-8)
    assert np.all(np.abs(z) <= 1 + 1e-9)


def test_sample_variety_diagonal():
    pts = sample_variety(Z1 - Z2, "BIDISC", 128)
    assert len(pts)
    np.testing.assert_allclose(pts[:, 0], pts[:, 1], atol=1e-10)


def test_sample_variety_constant_is_empty():
    assert len(sample_variety(ONE, "BIDISC", 64)) == 0


# properties

coef = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


@st.composite
def bipolys(draw, max_deg=3):
    n = draw(st.integers(0, max_deg))
    terms = {}
    for i in range(n + 1):
        for j in range(n + 1 - i):
            terms[(i, j)] = draw(coef)
    return BiPoly(terms)


@settings(max_examples=200, deadline=None)
@given(bipolys())
def test_compose_pi_is_swap_symmetric(p):
    q = compose_pi(p)
    assert q.as_dict() == q.swap().as_dict()


@settings(max_examples=200, deadline=None)
@given(bipolys())
def test_desymmetrize_inverts_compose(p):
    back = desymmetrize(compose_pi(p))
    assert back.allclose(p, 1e-10)


@settings(max_examples=60, deadline=None)
@given(bipolys(2), bipolys(2))
def test_division_identity(a, b):
    d = Z1 ** 2 + Z2 * 0.5 - ONE * 0.25 + a.coeff(0, 1) * Z2
    p = d * b + (a if a.deg1 < 2 else BiPoly())
    r = divides(d, p)
    if r.divides:
        resid = p - d * r.quotient
        assert all(abs(c) <= 1e-9 * max(1, p.max_coeff()) for _, _, c in resid.terms)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.floats(-2, 2), st.floats(0.5, 2))
def test_square_free_divides_both_ways(m1, m2, a, b):
    f, g = Z1 - a * Z2 - 0.1 * ONE, Z1 ** 2 - b * Z2
    p = f ** m1 * g ** m2
    r = square_free(p)
    assert divides(r, p).divides
    assert divides(p, r ** max(m1, m2)).divides


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_det_pencil_of_strict_contraction_is_distinguished(seed, n):
    r = np.random.default_rng(seed)
    F = r.standard_normal((n, n)) + 1j * r.standard_normal((n, n))
    F *= r.uniform(0.3, 0.95) / numerical_radius(F)
    assert spectral_radius(F) < 1 - 1e-3
    assert classify_gamma(det_pencil(F), grid=128).distinguished


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_det_pencil_of_unitary_touches_torus(seed):
    U = random_unitary(2, np.random.default_rng(seed))
    q = compose_pi(det_pencil(U))
    roots = np.concatenate([fiber_roots(q, 1, np.exp(1j * t)).roots
                            for t in np.linspace(0, 2 * np.pi, 64, endpoint=False)])
    assert np.min(np.abs(np.abs(roots) - 1)) <= 1e-6
