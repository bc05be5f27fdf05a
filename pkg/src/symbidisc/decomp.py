"""Orthogonal decompositions driven by a factorization of an annihilator.

For a Gamma-unitary ``Sigma`` annihilated by ``q1 q2`` the ranges of
``q1(Sigma)`` and ``q2(Sigma)`` are orthogonal and reduce ``Sigma``; the
pieces are annihilated by the complementary factor.  For pure models the
same construction is done on a finite section of the Toeplitz model, where
it yields invariant rather than reducing subspaces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from . import numlin
from .bipoly import BiPoly, classify_gamma, compose_pi, eval_poly
from .dilation import apply_bipoly_band, build_toeplitz_model
from .errors import DomainError, HypothesisError
from .pairs import OperatorPair, _pair, is_gamma_unitary

RANGE_REL_TOL = 1e-8


def _range(M: np.ndarray) -> np.ndarray:
    tol = RANGE_REL_TOL * max(1.0, numlin.operator_norm(M))
    return numlin.range_kernel(M, tol)[0].columns


def _kernel(M: np.ndarray) -> np.ndarray:
    tol = RANGE_REL_TOL * max(1.0, numlin.operator_norm(M))
    return numlin.range_kernel(M, tol)[1].columns


def _orth(*blocks) -> np.ndarray:
    cols = [b for b in blocks if b.shape[1]]
    n = blocks[0].shape[0]
    if not cols:
        return np.zeros((n, 0), complex)
    return _range(np.hstack(cols))


def _scale(pair: OperatorPair) -> float:
    return max(1.0, numlin.operator_norm(pair.S), numlin.operator_norm(pair.P))


def _eval(q: BiPoly, pair: OperatorPair) -> np.ndarray:
    return numlin.apply_bipoly(q, pair.S, pair.P, check=False)


@dataclass
class OrthogonalityResult:
    value: float
    warnings: list = field(default_factory=list)

    def __float__(self):
        return self.value


def orthogonality_check(pair, q1: BiPoly, q2: BiPoly, grid: int = 512,
                        check_distinguished: bool = True) -> OrthogonalityResult:
    """``||q1(Sigma)* q2(Sigma)||`` for a Gamma-unitary ``Sigma``.

    Failed hypotheses (annihilation by ``q1 q2``, distinguished product)
    are reported as warnings, not errors.
    """
    pair = _pair(pair)
    if not is_gamma_unitary(pair):
        raise DomainError("pair is not a Gamma-unitary")
    A, B = _eval(q1, pair), _eval(q2, pair)
    notes = []
    res = numlin.operator_norm(_eval(q1 * q2, pair)) / max(1.0, (q1 * q2).norm1())
    if res > 1e-8:
        notes.append(f"q1 q2 does not annihilate the pair (residual {res:.2e})")
    if check_distinguished and not classify_gamma(q1 * q2, grid).gamma_distinguished:
        notes.append("q1 q2 is not Gamma-distinguished")
    return OrthogonalityResult(numlin.operator_norm(A.conj().T @ B), notes)


def reflection_check(p: BiPoly, samples: int = 100, seed: int = 0) -> dict:
    """Check ``z1^n z2^m conj(q(1/conj z1, 1/conj z2)) = alpha q(z1, z2)`` for
    ``q = p o pi`` of bidegree ``(n, m)``; ``alpha`` is estimated from samples."""
    q = compose_pi(p)
    n, m = q.deg1, q.deg2
    rng = np.random.default_rng(seed)
    z = (0.5 + rng.random((samples, 2))) * np.exp(2j * np.pi * rng.random((samples, 2)))
    z1, z2 = z[:, 0], z[:, 1]
    lhs = z1 ** n * z2 ** m * np.conj(eval_poly(q, 1 / np.conj(z1), 1 / np.conj(z2)))
    rhs = eval_poly(q, z1, z2)
    ok = np.abs(rhs) > 1e-8 * max(1.0, q.max_coeff())
    alpha = complex(np.median((lhs[ok] / rhs[ok]).real) + 1j * np.median((lhs[ok] / rhs[ok]).imag)) \
        if np.any(ok) else complex("nan")
    resid = float(np.max(np.abs(lhs - alpha * rhs)) / max(1.0, q.norm1()))
    return {"alpha": alpha, "residual": resid,
            "unimodular": bool(abs(abs(alpha) - 1) <= 1e-6),
            "holds": bool(resid <= 1e-8 and abs(abs(alpha) - 1) <= 1e-6)}


@dataclass
class DecompositionResult:
    subspaces: list
    annihilators: list
    residuals: dict
    warnings: list = field(default_factory=list)

    @property
    def dims(self) -> list[int]:
        return [s.dim for s in self.subspaces]


def _split(pair: OperatorPair, q1: BiPoly, rest: BiPoly):
    """``(K1, K')`` with ``K1`` annihilated by ``q1`` and ``K'`` by ``rest``."""
    A, B = _eval(q1, pair), _eval(rest, pair)
    K2 = _range(A)
    L1 = _range(B)
    Lp = _kernel(np.vstack([A.conj().T, B.conj().T]))
    return _orth(L1, Lp), K2


def _compress(pair: OperatorPair, Q: np.ndarray) -> OperatorPair:
    QH = Q.conj().T
    return OperatorPair(QH @ pair.S @ Q, QH @ pair.P @ Q)


def _reducing(M: np.ndarray, Q: np.ndarray) -> float:
    Pi = Q @ Q.conj().T
    I = np.eye(M.shape[0])
    return max(numlin.operator_norm((I - Pi) @ M @ Pi),
               numlin.operator_norm((I - Pi) @ M.conj().T @ Pi))


def _pairwise(bases: list[np.ndarray]) -> float:
    worst = 0.0
    for i in range(len(bases)):
        for j in range(i + 1, len(bases)):
            if bases[i].shape[1] and bases[j].shape[1]:
                worst = max(worst, numlin.operator_norm(bases[i].conj().T @ bases[j]))
    return worst


def factor_decompose_unitary(pair, factors: list, tol: float = 1e-8) -> DecompositionResult:
    """Split a Gamma-unitary annihilated by ``prod(factors)`` into reducing pieces."""
    pair = _pair(pair)
    factors = list(factors)
    if not factors:
        raise ValueError("need at least one factor")
    scale = _scale(pair)
    if not is_gamma_unitary(pair, tol):
        raise HypothesisError("pair is not a Gamma-unitary",
                              {"commutator": pair.commutator()})
    prod = reduce(lambda a, b: a * b, factors)
    res = numlin.operator_norm(_eval(prod, pair)) / max(1.0, prod.norm1() * scale ** prod.degree)
    if res > tol:
        raise HypothesisError("product of factors does not annihilate the pair",
                              {"annihilation_residual": res})
    notes = []
    for k, q in enumerate(factors):
        rc = reflection_check(q)
        if not rc["holds"]:
            notes.append(f"factor {k}: reflection identity fails "
                         f"(alpha {rc['alpha']:.6g}, residual {rc['residual']:.2e})")

    n = pair.dim
    bases = []
    current, frame = pair, np.eye(n, dtype=complex)
    for k, q in enumerate(factors):
        if k == len(factors) - 1:
            bases.append(frame)
            break
        rest = reduce(lambda a, b: a * b, factors[k + 1:])
        K1, Kp = _split(current, q, rest)
        bases.append(frame @ K1)
        frame = frame @ Kp
        current = _compress(current, Kp)

    residuals = {"annihilation": [], "reducing": [], "gamma_unitary": []}
    for Q, q in zip(bases, factors):
        if Q.shape[1] == 0:
            residuals["annihilation"].append(0.0)
            residuals["reducing"].append(0.0)
            residuals["gamma_unitary"].append(True)
            continue
        sub = _compress(pair, Q)
        residuals["annihilation"].append(
            numlin.operator_norm(_eval(q, sub)) / max(1.0, q.norm1() * scale ** q.degree))
        residuals["reducing"].append(max(_reducing(pair.S, Q), _reducing(pair.P, Q)))
        residuals["gamma_unitary"].append(is_gamma_unitary(sub, 1e-7))
    residuals["orthogonality"] = _pairwise(bases)
    residuals["dimension_sum"] = sum(Q.shape[1] for Q in bases)
    total = sum((Q @ Q.conj().T for Q in bases), np.zeros((n, n), complex))
    residuals["completeness"] = numlin.operator_norm(total - np.eye(n))
    subspaces = [numlin.SubspaceBasis(Q) for Q in bases]
    return DecompositionResult(subspaces, factors, residuals, notes)


def factor_decompose_pure_truncated(F, factors: list, level: int) -> DecompositionResult:
    """Invariant pieces ``range r_j(Sigma)`` of the Toeplitz model of ``F`` on its
    first ``level`` blocks, where ``r_j`` is the product of the other factors.

    The model is lower triangular, so the finite section is an exact
    compression and ``q_j`` annihilates each piece up to rounding; orthogonality
    and spanning are only approximate near the cut and are reported both over
    all blocks and over the interior half.
    """
    factors = list(factors)
    if not factors:
        raise ValueError("need at least one factor")
    model = build_toeplitz_model(F)
    d = model.Tphi.block_dim
    prod = reduce(lambda a, b: a * b, factors)
    if level < 2 * prod.degree:
        raise DomainError(f"level {level} is below twice the total degree {prod.degree}")
    scale = max(1.0, model.Tphi.norm_bound())
    res = apply_bipoly_band(prod, model.Tphi, model.Tz).norm_bound()
    if res > 1e-9 * max(1.0, prod.norm1() * scale ** prod.degree):
        raise HypothesisError("product of factors does not annihilate the model",
                              {"annihilation_residual": res})
    Sig = OperatorPair(model.Tphi.to_dense(level + 1), model.Tz.to_dense(level + 1))
    N = level * d
    bases = []
    for j in range(len(factors)):
        others = [f for k, f in enumerate(factors) if k != j]
        r = reduce(lambda a, b: a * b, others, BiPoly.const(1))
        bases.append(_range(_eval(r, Sig)))
    residuals = {"annihilation": [], "invariance": []}
    for Q, q in zip(bases, factors):
        if Q.shape[1] == 0:
            residuals["annihilation"].append(0.0)
            residuals["invariance"].append(0.0)
            continue
        Pi = Q @ Q.conj().T
        I = np.eye(N)
        residuals["annihilation"].append(numlin.operator_norm(_eval(q, Sig) @ Q))
        residuals["invariance"].append(max(numlin.operator_norm((I - Pi) @ Sig.S @ Pi),
                                           numlin.operator_norm((I - Pi) @ Sig.P @ Pi)))
    residuals["orthogonality"] = _pairwise(bases)
    half = (level // 2) * d
    residuals["interior_orthogonality"] = _pairwise([_range(Q[:half]) if Q.shape[1] else Q[:half]
                                                     for Q in bases])
    residuals["dimension_sum"] = sum(Q.shape[1] for Q in bases)
    residuals["ambient_dim"] = N
    return DecompositionResult([numlin.SubspaceBasis(Q) for Q in bases], factors, residuals)


def wold_split(pair, tol: float = 1e-8) -> dict:
    """Unitary/pure split of a Gamma-isometry on a finite-dimensional space.

    In finite dimensions an isometry is unitary, so the pure part is zero.
    """
    pair = _pair(pair)
    n = pair.dim
    P, S = pair.P, pair.S
    if (numlin.operator_norm(P.conj().T @ P - np.eye(n)) > tol
            or numlin.operator_norm(S.conj().T @ P - S) > tol * max(1.0, numlin.operator_norm(S))):
        raise DomainError("pair is not a Gamma-isometry")
    return {"unitary": numlin.SubspaceBasis(np.eye(n, dtype=complex)),
            "pure": numlin.SubspaceBasis(np.zeros((n, 0), complex)),
            "note": "finite-dimensional Gamma-isometries are Gamma-unitaries"}
