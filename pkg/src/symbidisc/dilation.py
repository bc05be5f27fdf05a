"""Isometric dilations as exact eventually-Toeplitz block band operators.

A :class:`BlockBandOperator` acts on ``C^{d0} + (C^d)^N``.  Block 0 is the
head of size ``d0``; blocks ``1, 2, ...`` are tail blocks of size ``d``.  The
operator is a dense corner on blocks ``[0, c)`` plus constant block
diagonals (offset ``k = col - row``) everywhere outside the corner.  Sums,
products and adjoints stay in this form, so identities between infinite
operators reduce to finitely many matrix comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numlin
from .bipoly import BiPoly
from .errors import DimensionError, DomainError
from .pairs import OperatorPair, _pair, fundamental_operator

EQ_TOL = 1e-11


class BlockBandOperator:
    """Head block plus a block band tail that is Toeplitz outside the corner."""

    __slots__ = ("head_dim", "block_dim", "corner_blocks", "corner", "diagonals")

    def __init__(self, head_dim: int, block_dim: int, corner, diagonals=None,
                 corner_blocks: int | None = None):
        self.head_dim = int(head_dim)
        self.block_dim = int(block_dim)
        d = self.block_dim
        diags = {}
        for k, B in (diagonals or {}).items():
            B = np.asarray(B, complex).reshape(d, d)
            if d and np.any(B != 0):
                diags[int(k)] = B
        self.diagonals = dict(sorted(diags.items()))
        corner = np.asarray(corner, complex)
        if corner_blocks is None:
            corner_blocks = 1 + (corner.shape[0] - self.head_dim) // d if d else 1
        self.corner_blocks = int(corner_blocks)
        if corner.shape != (self._n(self.corner_blocks),) * 2:
            raise DimensionError(
                f"corner shape {corner.shape} does not match {self.corner_blocks} blocks")
        self.corner = corner
        need = 1 + self.bandwidth
        if self.corner_blocks < need:
            grown = self.expanded(need)
            self.corner, self.corner_blocks = grown.corner, grown.corner_blocks

    # geometry
    def _n(self, blocks: int) -> int:
        return self.head_dim + max(0, blocks - 1) * self.block_dim

    def _start(self, i: int) -> int:
        return 0 if i == 0 else self.head_dim + (i - 1) * self.block_dim

    def _size(self, i: int) -> int:
        return self.head_dim if i == 0 else self.block_dim

    @property
    def bandwidth(self) -> int:
        return max((abs(k) for k in self.diagonals), default=0)

    def block(self, i: int, j: int) -> np.ndarray:
        if i < self.corner_blocks and j < self.corner_blocks:
            a, b = self._start(i), self._start(j)
            return self.corner[a:a + self._size(i), b:b + self._size(j)].copy()
        if i == 0 or j == 0:
            return np.zeros((self._size(i), self._size(j)), complex)
        B = self.diagonals.get(j - i)
        return np.zeros((self.block_dim,) * 2, complex) if B is None else B.copy()

    def to_dense(self, blocks: int) -> np.ndarray:
        """Finite section on blocks ``[0, blocks)``."""
        n = self._n(blocks)
        M = np.zeros((n, n), complex)
        c = min(blocks, self.corner_blocks)
        m = self._n(c)
        M[:m, :m] = self.corner[:m, :m]
        d = self.block_dim
        if d == 0:
            return M
        for k, B in self.diagonals.items():
            for i in range(1, blocks):
                j = i + k
                if j < 1 or j >= blocks or (i < self.corner_blocks and j < self.corner_blocks):
                    continue
                a, b = self._start(i), self._start(j)
                M[a:a + d, b:b + d] = B
        return M

    def expanded(self, blocks: int) -> "BlockBandOperator":
        blocks = max(blocks, self.corner_blocks)
        op = object.__new__(BlockBandOperator)
        op.head_dim, op.block_dim = self.head_dim, self.block_dim
        op.diagonals = self.diagonals
        op.corner_blocks = blocks
        op.corner = self.to_dense(blocks)
        return op

    # algebra
    def _check(self, other: "BlockBandOperator"):
        if (self.head_dim, self.block_dim) != (other.head_dim, other.block_dim):
            raise DimensionError(
                f"block structure mismatch ({self.head_dim}, {self.block_dim}) vs "
                f"({other.head_dim}, {other.block_dim})")

    def _combine(self, other, sign: float):
        self._check(other)
        c = max(self.corner_blocks, other.corner_blocks)
        corner = self.expanded(c).corner + sign * other.expanded(c).corner
        diags = dict(self.diagonals)
        for k, B in other.diagonals.items():
            diags[k] = diags.get(k, 0) + sign * B
        return BlockBandOperator(self.head_dim, self.block_dim, corner, diags, c)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __neg__(self):
        return self.scale(-1.0)

    def scale(self, a: complex) -> "BlockBandOperator":
        return BlockBandOperator(self.head_dim, self.block_dim, a * self.corner,
                                 {k: a * B for k, B in self.diagonals.items()},
                                 self.corner_blocks)

    def __mul__(self, a):
        if isinstance(a, BlockBandOperator):
            return self @ a
        return self.scale(a)

    __rmul__ = scale

    def adjoint(self) -> "BlockBandOperator":
        return BlockBandOperator(self.head_dim, self.block_dim, self.corner.conj().T,
                                 {-k: B.conj().T for k, B in self.diagonals.items()},
                                 self.corner_blocks)

    @property
    def H(self) -> "BlockBandOperator":
        return self.adjoint()

    def __matmul__(self, other: "BlockBandOperator") -> "BlockBandOperator":
        self._check(other)
        wa, wb = self.bandwidth, other.bandwidth
        c = max(self.corner_blocks, other.corner_blocks) + wa + wb
        m = c + wa + wb
        prod = self.to_dense(m) @ other.to_dense(m)
        n = self._n(c)
        diags: dict[int, np.ndarray] = {}
        for ka, A in self.diagonals.items():
            for kb, B in other.diagonals.items():
                diags[ka + kb] = diags.get(ka + kb, 0) + A @ B
        return BlockBandOperator(self.head_dim, self.block_dim, prod[:n, :n], diags, c)

    def norm_bound(self) -> float:
        """``||corner|| + sum_k ||B_k||``, an upper bound for the operator norm."""
        return numlin.operator_norm(self.corner) + sum(
            numlin.operator_norm(B) for B in self.diagonals.values())

    def allclose(self, other, tol: float = EQ_TOL) -> bool:
        scale = max(1.0, self.norm_bound(), other.norm_bound())
        return (self - other).norm_bound() <= tol * scale

    # pieces relative to the head
    def head(self) -> np.ndarray:
        return self.corner[:self.head_dim, :self.head_dim].copy()

    def head_column(self) -> np.ndarray:
        """Tail part of the head column (finitely many tail rows)."""
        return self.corner[self.head_dim:, :self.head_dim].copy()

    def head_row(self) -> np.ndarray:
        return self.corner[:self.head_dim, self.head_dim:].copy()

    def tail(self) -> "BlockBandOperator":
        return BlockBandOperator(0, self.block_dim, self.corner[self.head_dim:, self.head_dim:],
                                 self.diagonals, self.corner_blocks)

    def __repr__(self):
        return (f"BlockBandOperator(head_dim={self.head_dim}, block_dim={self.block_dim}, "
                f"corner_blocks={self.corner_blocks}, offsets={list(self.diagonals)})")


def identity(head_dim: int, block_dim: int) -> BlockBandOperator:
    return BlockBandOperator(head_dim, block_dim, np.eye(head_dim + block_dim),
                             {0: np.eye(block_dim)}, 2)


def from_blocks(head_dim: int, block_dim: int, blocks: dict, diagonals=None,
                corner_blocks: int | None = None) -> BlockBandOperator:
    """Build from explicit corner blocks; unspecified tail blocks follow the diagonals."""
    diagonals = diagonals or {}
    bw = max((abs(k) for k in diagonals), default=0)
    c = max([1 + bw, corner_blocks or 1] + [max(i, j) + 1 for i, j in blocks])
    base = BlockBandOperator(head_dim, block_dim, np.zeros((head_dim, head_dim)),
                             diagonals, 1).expanded(c)
    M = base.to_dense(c)
    for (i, j), B in blocks.items():
        a, b = base._start(i), base._start(j)
        B = np.asarray(B, complex)
        M[a:a + base._size(i), b:b + base._size(j)] = B
    return BlockBandOperator(head_dim, block_dim, M, diagonals, c)


def toeplitz(block_dim: int, diagonals: dict) -> BlockBandOperator:
    """Block Toeplitz operator on ``(C^d)^N`` (empty head)."""
    return from_blocks(0, block_dim, {}, diagonals)


def band_algebra(a: BlockBandOperator, b: BlockBandOperator | None, op: str) -> BlockBandOperator:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a @ b
    if op == "adjoint":
        return a.adjoint()
    raise ValueError(f"unknown band operation {op!r}")


def apply_bipoly_band(p: BiPoly, S: BlockBandOperator, P: BlockBandOperator) -> BlockBandOperator:
    """``p(S, P)`` by Horner in S then P, in exact band arithmetic."""
    S._check(P)
    I = identity(S.head_dim, S.block_dim)
    C = p.coeff_array()
    out = I.scale(0.0)
    for j in range(C.shape[1] - 1, -1, -1):
        col = I.scale(0.0)
        for i in range(C.shape[0] - 1, -1, -1):
            col = col @ S + I.scale(C[i, j])
        out = out @ P + col
    return out


def band_residual(X: BlockBandOperator) -> float:
    return X.norm_bound()


# minimal Gamma-isometric dilation
@dataclass
class DilationBundle:
    base: OperatorPair
    fundamental: np.ndarray
    TA: BlockBandOperator
    V0: BlockBandOperator
    defect_map: np.ndarray
    residuals: dict = field(default_factory=dict)


def _checked_fundamental(pair: OperatorPair):
    fr = fundamental_operator(pair)
    scale = max(1.0, numlin.operator_norm(pair.S), numlin.operator_norm(pair.P))
    w = numlin.numerical_radius(fr.A) if fr.A.size else 0.0
    if (numlin.operator_norm(pair.S) > 2 + 1e-8 or fr.residual > 1e-7 * scale
            or w > 1 + 1e-6):
        raise DomainError(f"pair is not a Gamma-contraction (residual {fr.residual:.2e}, "
                          f"omega(A) {w:.6f})")
    Dmap = fr.defect_basis.columns.conj().T @ fr.D
    return fr, Dmap


def build_TA_V0(pair) -> DilationBundle:
    """``T_A`` and ``V_0`` on ``H + l^2(D_P)``.

    ``T_A(x0, x1, ...) = (S x0, A* D_P x0 + A x1, A* x1 + A x2, ...)`` and
    ``V_0(x0, x1, ...) = (P x0, D_P x0, x1, ...)``.
    """
    pair = _pair(pair)
    pair.check_commuting()
    fr, Dmap = _checked_fundamental(pair)
    A = fr.A
    n, k = pair.dim, A.shape[0]
    AH = A.conj().T
    TA = from_blocks(n, k, {(0, 0): pair.S, (1, 0): AH @ Dmap}, {0: A, -1: AH}, 2)
    V0 = from_blocks(n, k, {(0, 0): pair.P, (1, 0): Dmap}, {-1: np.eye(k)}, 2)
    I = identity(n, k)
    res = {
        "V0*V0-I": (V0.H @ V0 - I).norm_bound(),
        "TA*V0-TA": (TA.H @ V0 - TA).norm_bound(),
        "TAV0-V0TA": (TA @ V0 - V0 @ TA).norm_bound(),
    }
    return DilationBundle(pair, A, TA, V0, Dmap, res)


def verify_compression(bundle: DilationBundle, max_total_degree: int) -> float:
    """Max over ``i + j <= deg`` of ``||P_H T^i V^j |_H - S^i P^j||``, scaled."""
    S, P = bundle.base.S, bundle.base.P
    nS = max(1.0, numlin.operator_norm(S))
    nP = max(1.0, numlin.operator_norm(P))
    n = bundle.base.dim
    I = identity(bundle.TA.head_dim, bundle.TA.block_dim)
    Tpow, Spow = [I], [np.eye(n)]
    for _ in range(max_total_degree):
        Tpow.append(Tpow[-1] @ bundle.TA)
        Spow.append(Spow[-1] @ S)
    worst = 0.0
    Vj, Pj = I, np.eye(n)
    for j in range(max_total_degree + 1):
        for i in range(max_total_degree - j + 1):
            comp = (Tpow[i] @ Vj).head()
            err = numlin.operator_norm(comp - Spow[i] @ Pj) / (nS ** i * nP ** j)
            worst = max(worst, err)
        Vj = Vj @ bundle.V0
        Pj = Pj @ P
    return worst


@dataclass
class TruncatedPair:
    Tn: BlockBandOperator
    Vn: BlockBandOperator
    Yn_check: float
    fund_eq_residual: float
    checks: dict


def build_Tn_Vn(pair, n: int) -> TruncatedPair:
    """The truncations with ``A_n`` and ``I_n`` on the first ``n`` tail blocks.

    Checks that ``T_n - T_n* V_n`` vanishes except for block ``(n, n) = A``,
    that ``I - V_n* V_n`` is the projection onto blocks ``>= n`` and that
    ``T_n - T_n* V_n = D Y_n D`` with ``Y_n`` the block ``A`` at ``(n, n)``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    pair = _pair(pair)
    fr, Dmap = _checked_fundamental(pair)
    A = fr.A
    h, k = pair.dim, A.shape[0]
    AH = A.conj().T
    tb = {(0, 0): pair.S, (1, 0): AH @ Dmap}
    vb = {(0, 0): pair.P, (1, 0): Dmap}
    for i in range(1, n + 1):
        tb[(i, i)] = A
        if i < n:
            tb[(i + 1, i)] = AH
            vb[(i + 1, i)] = np.eye(k)
    Tn = from_blocks(h, k, tb, corner_blocks=n + 2)
    Vn = from_blocks(h, k, vb, corner_blocks=n + 2)
    I = identity(h, k)
    Y = from_blocks(h, k, {(n, n): A}, corner_blocks=n + 2)
    proj = from_blocks(h, k, {(0, 0): np.zeros((h, h)),
                              **{(i, i): np.zeros((k, k)) for i in range(1, n)}},
                       {0: np.eye(k)}, n + 2)
    M = Tn - Tn.H @ Vn
    DV2 = I - Vn.H @ Vn
    checks = {
        "pattern": (M - Y).norm_bound(),
        "defect_projection": (DV2 - proj).norm_bound(),
        "commute": (Tn @ Vn - Vn @ Tn).norm_bound(),
    }
    fund = (M - proj @ Y @ proj).norm_bound()
    return TruncatedPair(Tn, Vn, checks["pattern"], fund, checks)


@dataclass
class ToeplitzModel:
    Tphi: BlockBandOperator
    Tz: BlockBandOperator
    checks: dict


def build_toeplitz_model(F) -> ToeplitzModel:
    """``(T_{F* + F z}, T_z)`` on ``H^2(C^d)``."""
    F = numlin._square(F)
    w = numlin.numerical_radius(F) if F.size else 0.0
    if w > 1 + 1e-8:
        raise DomainError(f"numerical radius {w:.6f} exceeds 1")
    d = F.shape[0]
    Tphi = toeplitz(d, {0: F.conj().T, -1: F})
    Tz = toeplitz(d, {-1: np.eye(d)})
    I = identity(0, d)
    checks = {"Tz*Tz-I": (Tz.H @ Tz - I).norm_bound(),
              "Tphi*Tz-Tphi": (Tphi.H @ Tz - Tphi).norm_bound()}
    return ToeplitzModel(Tphi, Tz, checks)


# block dilation equations
def _as_tail(D) -> BlockBandOperator:
    if isinstance(D, BlockBandOperator):
        if D.head_dim:
            raise DimensionError("tail operator must have an empty head")
        return D
    # a finite D acts as D + D + ... so the band stays Toeplitz; C only
    # reaches the first copy, the others are inert
    D = numlin._square(D)
    return toeplitz(D.shape[0], {0: D})


def _assemble(X, C, D) -> BlockBandOperator:
    """``[[X, 0], [C, D]]`` with ``C`` given by its first tail rows."""
    X = numlin._square(X)
    dense = not isinstance(D, BlockBandOperator)
    D = _as_tail(D)
    C = numlin.as_matrix(C)
    h, d = X.shape[0], D.block_dim
    if C.shape[1] != h or (d and C.shape[0] % d) or (dense and C.shape[0] != d):
        raise DimensionError(f"C of shape {C.shape} does not map C^{h} into tail blocks of size {d}")
    rows = C.shape[0] // d if d else 0
    c = max(D.corner_blocks, rows + 1, 2)
    Dc = D.expanded(c)
    n = h + (c - 1) * d
    M = np.zeros((n, n), complex)
    M[:h, :h] = X
    M[h:h + C.shape[0], :h] = C
    M[h:, h:] = Dc.corner
    return BlockBandOperator(h, d, M, D.diagonals, c)


def _norm(M) -> float:
    return numlin.operator_norm(M) if np.size(M) else 0.0


def check_gamma_dilation_eqs(S, P, C1, C2, D1, D2) -> dict:
    """Residuals of the block conditions for ``[[S,0],[C1,D1]]``, ``[[P,0],[C2,D2]]``.

    (1) ``C1 P + D1 C2 = C2 S + D2 C1``  (2) ``S - S*P = C1* C2``
    (3) ``C2* D2 = 0``  (4) ``C2* C2 = D_P^2``  (5) ``C1 = D1* C2``,
    plus the assembled checks ``TV = VT``, ``T*V = T`` and ``V*V = I``.
    """
    T = _assemble(S, C1, D1)
    V = _assemble(P, C2, D2)
    I = identity(T.head_dim, T.block_dim)
    comm = T @ V - V @ T
    tv = T - T.H @ V
    vv = V.H @ V - I
    return {
        "eq1": _norm(comm.head_column()),
        "eq2": _norm(tv.head()),
        "eq3": _norm(vv.head_row()),
        "eq4": _norm(vv.head()),
        "eq5": _norm(tv.head_column()),
        "TV-VT": comm.norm_bound(),
        "T-T*V": tv.norm_bound(),
        "V*V-I": vv.norm_bound(),
    }


def check_toral_dilation_eqs(T1, T2, C1, C2, D1, D2) -> dict:
    """Residuals for ``V_i = [[T_i, 0], [C_i, D_i]]`` to be commuting isometries.

    (1) ``C1 T2 + D1 C2 = C2 T1 + D2 C1``  (2) ``C_i* D_i = 0``
    (3) ``C_i* C_i = D_{T_i}^2``, plus ``D_i* D_i = I``, ``V1 V2 = V2 V1`` and
    ``V_i* V_i = I``.
    """
    V1 = _assemble(T1, C1, D1)
    V2 = _assemble(T2, C2, D2)
    I = identity(V1.head_dim, V1.block_dim)
    comm = V1 @ V2 - V2 @ V1
    g1 = V1.H @ V1 - I
    g2 = V2.H @ V2 - I
    return {
        "eq1": _norm(comm.head_column()),
        "eq2_1": _norm(g1.head_row()),
        "eq2_2": _norm(g2.head_row()),
        "eq3_1": _norm(g1.head()),
        "eq3_2": _norm(g2.head()),
        "D1*D1-I": g1.tail().norm_bound(),
        "D2*D2-I": g2.tail().norm_bound(),
        "V1V2-V2V1": comm.norm_bound(),
        "V1*V1-I": g1.norm_bound(),
        "V2*V2-I": g2.norm_bound(),
    }


def appendix_identities(A, E) -> dict:
    """``S = T_{A + A* z}``, ``P = T_z``, ``Delta = T_{E - E z}`` and the
    identities ``S^2 - 4P = Delta^2``, ``S Delta = Delta S`` and
    ``(S +- Delta)*(S +- Delta) = 4I``, with the matrix prerequisites."""
    A = numlin._square(A)
    E = numlin._square(E)
    if A.shape != E.shape:
        raise DimensionError("A and E must have the same size")
    d = A.shape[0]
    AH = A.conj().T
    S = toeplitz(d, {0: A, -1: AH})
    P = toeplitz(d, {-1: np.eye(d)})
    Dl = toeplitz(d, {0: E, -1: -E})
    I = identity(0, d)
    return {
        "A^2-E": _norm(A @ A - E),
        "A*^2-E": _norm(AH @ AH - E),
        "A*A+AA*+2E-4I": _norm(AH @ A + A @ AH + 2 * E - 4 * np.eye(d)),
        "S^2-4P-Delta^2": (S @ S - 4 * P - Dl @ Dl).norm_bound(),
        "S.Delta-Delta.S": (S @ Dl - Dl @ S).norm_bound(),
        "(S+Delta)*(S+Delta)-4I": ((S + Dl).H @ (S + Dl) - 4 * I).norm_bound(),
        "(S-Delta)*(S-Delta)-4I": ((S - Dl).H @ (S - Dl) - 4 * I).norm_bound(),
    }


def shift_example(r: float) -> dict:
    """``(S, P) = (2rW, r^2 W^2)`` with ``W`` the unilateral shift and
    ``A = (2r/(1 + r^2)) W``: annihilation by ``4 z2 - z1^2`` and the
    fundamental equation ``S - S*P = D_P A D_P`` with ``D_P = sqrt(1 - r^4)``."""
    W = toeplitz(1, {-1: np.eye(1)})
    S = W.scale(2 * r)
    P = (W @ W).scale(r * r)
    A = W.scale(2 * r / (1 + r * r))
    I = identity(0, 1)
    DP2 = I - P.H @ P
    dp = np.sqrt(1 - r ** 4)
    z1, z2 = BiPoly.z1(), BiPoly.z2()
    return {
        "annihilation": apply_bipoly_band(4 * z2 - z1 ** 2, S, P).norm_bound(),
        "defect": (DP2 - I.scale(1 - r ** 4)).norm_bound(),
        "fundamental": (S - S.H @ P - A.scale(dp * dp)).norm_bound(),
    }


def norm_certificate(op: BlockBandOperator, grid: int = 1024,
                     sections=(4, 8, 16, 32, 64)) -> dict:
    """Symbol bound of the Toeplitz tail and finite-section lower bounds."""
    theta = 2 * np.pi * np.arange(grid) / grid
    d = op.block_dim
    sym = 0.0
    if d and op.diagonals:
        z = np.exp(1j * theta)[:, None, None]
        F = sum(B[None] * z ** (-k) for k, B in op.diagonals.items())
        sym = float(np.max(np.linalg.norm(F, ord=2, axis=(1, 2))))
    lower = [numlin.operator_norm(op.to_dense(m)) for m in sections]
    return {"symbol_bound": sym, "section_norms": lower, "grid": grid}
