import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from symbidisc import numlin
from symbidisc.bipoly import BiPoly, det_pencil
from symbidisc.decomp import (
    factor_decompose_pure_truncated, factor_decompose_unitary, orthogonality_check,
    reflection_check, wold_split,
)
from symbidisc.errors import DomainError, HypothesisError
from symbidisc.pairs import OperatorPair, is_gamma_unitary

from conftest import random_gamma_unitary, unitary_on_variety

Z1, Z2 = BiPoly.z1(), BiPoly.z2()
LINE = Z1 - 0.3 * Z2 - 0.3
OTHER = Z1 + 0.5 * Z2 + 0.5
ROYAL = 4 * Z2 - Z1 ** 2


def proj(Q):
    return Q @ Q.conj().T


def test_orthogonality_two_pencils(rng):
    pair = unitary_on_variety([LINE, OTHER], [3, 3], rng)
    r = orthogonality_check(pair, LINE, OTHER)
    assert float(r) <= 1e-9
    assert r.warnings == []


def test_orthogonality_same_factor(rng):
    pair = unitary_on_variety([LINE, OTHER], [2, 2], rng)
    r = orthogonality_check(pair, LINE, LINE, check_distinguished=False)
    q = numlin.apply_bipoly(LINE, pair.S, pair.P)
    assert float(r) == pytest.approx(numlin.operator_norm(q) ** 2, rel=1e-10)
    assert r.warnings  # q1 q1 does not annihilate


def test_orthogonality_single_annihilator(rng):
    pair = unitary_on_variety([LINE], [3], rng)
    assert float(orthogonality_check(pair, LINE, OTHER)) <= 1e-10


def test_orthogonality_requires_unitary():
    with pytest.raises(DomainError):
        orthogonality_check(OperatorPair(np.eye(2), 0.5 * np.eye(2)), LINE, OTHER)


@pytest.mark.parametrize("p", [LINE, OTHER, ROYAL])
def test_reflection_identity_holds(p):
    rc = reflection_check(p)
    assert rc["holds"] and rc["unimodular"]


def test_reflection_identity_fails_off_torus():
    rc = reflection_check(Z1 - 0.5 * Z2 - 3)
    assert not rc["holds"]


def test_decompose_two_blocks(rng):
    pair, blocks = unitary_on_variety([LINE, OTHER], [3, 2], rng, with_blocks=True)
    res = factor_decompose_unitary(pair, [LINE, OTHER])
    assert res.dims == [3, 2]
    for sub, B in zip(res.subspaces, blocks):
        assert numlin.operator_norm(proj(sub.columns) - proj(B)) <= 1e-8
    assert res.residuals["orthogonality"] <= 1e-8
    assert res.residuals["completeness"] <= 1e-8
    assert max(res.residuals["reducing"]) <= 1e-8
    assert max(res.residuals["annihilation"]) <= 1e-7


def test_decompose_single_factor(rng):
    pair = unitary_on_variety([LINE], [4], rng)
    res = factor_decompose_unitary(pair, [LINE])
    assert res.dims == [4]


def test_decompose_three_factors(rng):
    pair, blocks = unitary_on_variety([LINE, OTHER, ROYAL], [2, 2, 2], rng, with_blocks=True)
    res = factor_decompose_unitary(pair, [LINE, OTHER, ROYAL])
    assert res.dims == [2, 2, 2]
    assert res.residuals["orthogonality"] <= 1e-8
    for sub, B in zip(res.subspaces, blocks):
        assert numlin.operator_norm(proj(sub.columns) - proj(B)) <= 1e-8


def test_decompose_rejects_non_annihilating(rng):
    pair = unitary_on_variety([LINE, ROYAL], [2, 2], rng)
    with pytest.raises(HypothesisError) as exc:
        factor_decompose_unitary(pair, [LINE, OTHER])
    assert "annihilation_residual" in exc.value.diagnostics


def test_decompose_rejects_non_unitary():
    with pytest.raises(HypothesisError):
        factor_decompose_unitary(OperatorPair(np.eye(2), 0.5 * np.eye(2)), [LINE])


def _two_block_F(rng):
    F1 = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    F2 = rng.standard_normal((1, 1)) + 1j * rng.standard_normal((1, 1))
    F1 *= 0.7 / numlin.numerical_radius(F1)
    F2 *= 0.4 / abs(F2[0, 0])
    F = np.zeros((3, 3), complex)
    F[:2, :2], F[2:, 2:] = F1, F2
    return F, F1, F2


def test_pure_truncated_block_supports(rng):
    F, F1, F2 = _two_block_F(rng)
    q1, q2 = det_pencil(F1), det_pencil(F2)
    level = 8
    res = factor_decompose_pure_truncated(F, [q1, q2], level)
    first = np.zeros(3 * level, bool)
    for k in range(level):
        first[3 * k:3 * k + 2] = True
    Q1, Q2 = (s.columns for s in res.subspaces)
    assert np.abs(Q1[~first]).max() <= 1e-8
    assert np.abs(Q2[first]).max() <= 1e-8
    assert max(res.residuals["annihilation"]) <= 1e-9
    assert max(res.residuals["invariance"]) <= 1e-9
    assert res.residuals["interior_orthogonality"] <= 1e-8


def test_pure_truncated_single_factor(rng):
    F, _, _ = _two_block_F(rng)
    res = factor_decompose_pure_truncated(F, [det_pencil(F)], 8)
    assert res.dims == [24]


def test_pure_truncated_scalar_line():
    a = 0.8
    res = factor_decompose_pure_truncated(a * np.eye(2), [Z1 - a * Z2 - a], 4)
    assert res.dims == [8]
    assert res.residuals["annihilation"][0] <= 1e-12
    assert res.residuals["invariance"][0] <= 1e-12


def test_pure_truncated_level_floor():
    with pytest.raises(DomainError):
        factor_decompose_pure_truncated(0.8 * np.eye(2), [Z1 - 0.8 * Z2 - 0.8], 1)


def test_pure_truncated_rejects_wrong_factor():
    with pytest.raises(HypothesisError):
        factor_decompose_pure_truncated(0.8 * np.eye(2), [Z1 - 0.5 * Z2 - 0.5], 4)


def test_wold_split_trivial(rng):
    out = wold_split(random_gamma_unitary(3, rng))
    assert out["unitary"].dim == 3 and out["pure"].dim == 0
    with pytest.raises(DomainError):
        wold_split(OperatorPair(np.zeros((2, 2)), 0.5 * np.eye(2)))


# properties

seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_decomposition_invariants(seed, c1, c2):
    r = np.random.default_rng(seed)
    pair = unitary_on_variety([LINE, OTHER], [c1, c2], r)
    res = factor_decompose_unitary(pair, [LINE, OTHER])
    assert res.residuals["dimension_sum"] == pair.dim
    assert all(res.residuals["gamma_unitary"])
    assert res.residuals["orthogonality"] <= 1e-8
    assert float(orthogonality_check(pair, LINE, OTHER)) <= 1e-8
    for sub in res.subspaces:
        Q = sub.columns
        restricted = OperatorPair(Q.conj().T @ pair.S @ Q, Q.conj().T @ pair.P @ Q)
        assert is_gamma_unitary(restricted, 1e-7)
