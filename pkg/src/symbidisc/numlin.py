"""Dense complex linear algebra primitives.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Eigen, Schur
and SVD kernels come from numpy/scipy; this module adds the tolerances and
checks the rest of the package relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import CommutationError, ConvergenceError, DimensionError, DomainError

NUMRAD_GRID = 4096
GOLDEN_TOL = 1e-10
MAX_SCHUR_RETRIES = 8


def as_matrix(M) -> np.ndarray:
    """Coerce to a 2-D complex array and reject non-finite entries."""
    A = np.asarray(M, dtype=complex)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise DomainError("matrix has non-finite entries")
    return A


def _square(M) -> np.ndarray:
    A = as_matrix(M)
    if A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    return A


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal columns spanning a subspace of ``C^ambient_dim``."""

    columns: np.ndarray

    @property
    def ambient_dim(self) -> int:
        return self.columns.shape[0]

    @property
    def dim(self) -> int:
        return self.columns.shape[1]

    def projector(self) -> np.ndarray:
        Q = self.columns
        return Q @ Q.conj().T

    def compress(self, M) -> np.ndarray:
        """Matrix of ``M`` restricted to the subspace, in this basis."""
        Q = self.columns
        return Q.conj().T @ M @ Q


def operator_norm(M) -> float:
    A = as_matrix(M)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def spectral_radius(M) -> float:
    A = _square(M)
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(A))))


def _re_part_top(A: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    rot = np.exp(1j * np.asarray(thetas))[:, None, None] * A[None, :, :]
    H = 0.5 * (rot + rot.conj().transpose(0, 2, 1))
    return np.linalg.eigvalsh(H)[:, -1]


def numerical_radius(M, grid: int = NUMRAD_GRID) -> float:
    """Numerical radius by a theta grid followed by golden-section refinement.

    ``w(M) = max_theta lambda_max(Re(e^{i theta} M))``.
    """
    A = _square(M)
    if A.size == 0:
        return 0.0
    thetas = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    vals = np.empty(grid)
    chunk = max(1, 2**20 // max(1, A.shape[0] ** 2))
    for start in range(0, grid, chunk):
        vals[start:start + chunk] = _re_part_top(A, thetas[start:start + chunk])
    k = int(np.argmax(vals))
    best = vals[k]
    h = 2 * np.pi / grid
    lo, hi = thetas[k] - h, thetas[k] + h
    f = lambda t: float(_re_part_top(A, np.array([t]))[0])  # noqa: E731
    invphi = (np.sqrt(5) - 1) / 2
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > GOLDEN_TOL:
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = f(d)
    return float(max(best, fc, fd, 0.0))


def psd_sqrt(M, tol: float = 1e-10) -> np.ndarray:
    A = _square(M)
    if A.size == 0:
        return A.copy()
    scale = max(1.0, operator_norm(A))
    if operator_norm(A - A.conj().T) > tol * scale:
        raise DomainError("psd_sqrt needs a Hermitian matrix")
    w, V = np.linalg.eigh(0.5 * (A + A.conj().T))
    if w[0] < -tol * scale:
        raise DomainError(f"psd_sqrt: eigenvalue {w[0]:.3e} is negative")
    w = np.sqrt(np.clip(w, 0.0, None))
    R = (V * w) @ V.conj().T
    return 0.5 * (R + R.conj().T)


def default_rank_tol(M) -> float:
    A = as_matrix(M)
    return operator_norm(A) * max(A.shape) * 1e-13


def range_kernel(M, tol: float | None = None) -> tuple[SubspaceBasis, SubspaceBasis]:
    """Orthonormal bases of range(M) and ker(M) by singular-value threshold."""
    A = as_matrix(M)
    m, n = A.shape
    if tol is None:
        tol = default_rank_tol(A)
    if A.size == 0:
        return (SubspaceBasis(np.zeros((m, 0), complex)),
                SubspaceBasis(np.eye(n, dtype=complex)))
    U, s, Vh = np.linalg.svd(A)
    r = int(np.sum(s > tol))
    return SubspaceBasis(U[:, :r]), SubspaceBasis(Vh[r:].conj().T)


def commutator_norm(S, P) -> float:
    return operator_norm(S @ P - P @ S)


def check_commuting(S, P, rel: float = 1e-10) -> None:
    S, P = _square(S), _square(P)
    if S.shape != P.shape:
        raise DimensionError(f"shape mismatch {S.shape} vs {P.shape}")
    c = commutator_norm(S, P)
    if c > rel * (operator_norm(S) * operator_norm(P) + 1.0):
        raise CommutationError(f"matrices do not commute: ||SP-PS|| = {c:.3e}")


def joint_triangularize(S, P, seed: int = 0):
    """Simultaneous Schur form of a commuting pair.

    Returns ``(Q, S', P')`` with ``S' = Q* S Q`` and ``P' = Q* P Q`` upper
    triangular; the diagonal pairs are the joint eigenvalues.
    """
    S, P = _square(S), _square(P)
    check_commuting(S, P)
    n = S.shape[0]
    if n == 0:
        return np.eye(0, dtype=complex), S.copy(), P.copy()
    scale = max(1.0, operator_norm(S), operator_norm(P))
    rng = np.random.default_rng(seed)
    worst = np.inf
    for _ in range(MAX_SCHUR_RETRIES):
        a, b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        _, Q = scipy.linalg.schur(a * S + b * P, output="complex")
        S1 = Q.conj().T @ S @ Q
        P1 = Q.conj().T @ P @ Q
        low = max(np.linalg.norm(np.tril(S1, -1)), np.linalg.norm(np.tril(P1, -1)))
        worst = min(worst, low)
        if low <= 1e-8 * scale:
            return Q, np.triu(S1), np.triu(P1)
    raise ConvergenceError(
        f"joint triangularization failed after {MAX_SCHUR_RETRIES} retries "
        f"(best lower residual {worst:.3e})")


def joint_spectrum(S, P, seed: int = 0) -> np.ndarray:
    """Joint eigenvalues as an (n, 2) complex array."""
    _, S1, P1 = joint_triangularize(S, P, seed)
    return np.stack([np.diag(S1), np.diag(P1)], axis=1)


def apply_bipoly(p, S, P, check: bool = True) -> np.ndarray:
    """Evaluate ``sum c_ij S^i P^j`` by Horner in S, then in P."""
    S, P = _square(S), _square(P)
    if check:
        check_commuting(S, P)
    n = S.shape[0]
    C = p.coeff_array()
    I = np.eye(n, dtype=complex)
    out = np.zeros((n, n), complex)
    for j in range(C.shape[1] - 1, -1, -1):
        col = np.zeros((n, n), complex)
        for i in range(C.shape[0] - 1, -1, -1):
            col = col @ S + C[i, j] * I
        out = out @ P + col
    return out
