"""Commuting matrix pairs against the Gamma hierarchy.

Gamma-contraction membership is decided through the fundamental equation
``S - S*P = D_P X D_P``; the rho-positivity grid and the joint spectrum are
kept as cross-checks and disagreements are reported as warnings.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import numlin
from .bipoly import BiPoly, classify_gamma, det_pencil
from .errors import DomainError
from .gamma_geom import Region, classify_point

RANK_EIG_TOL = 1e-11


@dataclass(frozen=True)
class OperatorPair:
    S: np.ndarray
    P: np.ndarray

    def __post_init__(self):
        S = numlin._square(self.S)
        P = numlin._square(self.P)
        if S.shape != P.shape:
            raise numlin.DimensionError(f"shape mismatch {S.shape} vs {P.shape}")
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "P", P)

    @property
    def dim(self) -> int:
        return self.S.shape[0]

    def adjoint(self) -> "OperatorPair":
        return OperatorPair(self.S.conj().T, self.P.conj().T)

    def commutator(self) -> float:
        return numlin.commutator_norm(self.S, self.P)

    def check_commuting(self) -> None:
        numlin.check_commuting(self.S, self.P)


def _pair(x) -> OperatorPair:
    if isinstance(x, OperatorPair):
        return x
    S, P = x
    return OperatorPair(S, P)


@dataclass
class FundamentalResult:
    A: np.ndarray
    residual: float
    defect_basis: numlin.SubspaceBasis
    D: np.ndarray

    def full(self) -> np.ndarray:
        Q = self.defect_basis.columns
        return Q @ self.A @ Q.conj().T


def defect(P) -> tuple[np.ndarray, numlin.SubspaceBasis, np.ndarray]:
    """``D_P``, an orthonormal basis of its range and the restricted ``D_P``.

    The range is cut on the eigenvalues of ``I - P*P`` (threshold 1e-11), so
    rounding noise of size 1e-16 in ``I - P*P`` never becomes a spurious
    defect direction of size 1e-8 after the square root.
    """
    P = numlin._square(P)
    n = P.shape[0]
    M = np.eye(n) - P.conj().T @ P
    w, V = np.linalg.eigh(0.5 * (M + M.conj().T))
    keep = w > RANK_EIG_TOL
    Q = V[:, keep]
    D = numlin.psd_sqrt(M, tol=1e-9)
    sigma = np.sqrt(w[keep])
    return D, numlin.SubspaceBasis(Q), sigma


def fundamental_operator(pair) -> FundamentalResult:
    """Solve ``S - S*P = D_P A D_P`` with ``A`` acting on the defect space."""
    pair = _pair(pair)
    S, P = pair.S, pair.P
    if numlin.operator_norm(P) > 1 + 1e-9:
        raise DomainError("P is not a contraction")
    D, basis, sigma = defect(P)
    Q = basis.columns
    B = S - S.conj().T @ P
    inv = 1.0 / sigma
    A = inv[:, None] * (Q.conj().T @ B @ Q) * inv[None, :]
    res = numlin.operator_norm(B - D @ (Q @ A @ Q.conj().T) @ D)
    return FundamentalResult(A, res, basis, D)


def fundamental_operator_lstsq(pair) -> np.ndarray:
    """Independent solve: least squares for ``Sigma X Sigma = Q*(S - S*P)Q``."""
    pair = _pair(pair)
    _, basis, sigma = defect(pair.P)
    Q = basis.columns
    k = Q.shape[1]
    if k == 0:
        return np.zeros((0, 0), complex)
    Sig = Q.conj().T @ numlin.psd_sqrt(np.eye(pair.dim) - pair.P.conj().T @ pair.P, 1e-9) @ Q
    rhs = Q.conj().T @ (pair.S - pair.S.conj().T @ pair.P) @ Q
    K = np.kron(Sig, Sig.T)  # row-major vec: vec(Sig X Sig) = (Sig kron Sig^T) vec(X)
    x, *_ = np.linalg.lstsq(K, rhs.reshape(-1), rcond=None)
    return x.reshape(k, k)


def rho(pair, alpha: complex) -> np.ndarray:
    pair = _pair(pair)
    S = alpha * pair.S
    P = alpha * alpha * pair.P
    n = pair.dim
    X = S - S.conj().T @ P
    return 2 * (np.eye(n) - P.conj().T @ P) - X - X.conj().T


def rho_min_eig(pair, alpha: complex) -> float:
    if abs(alpha) > 1 + 1e-12:
        raise DomainError("|alpha| must be at most 1")
    R = rho(pair, alpha)
    return float(np.linalg.eigvalsh(0.5 * (R + R.conj().T))[0])


def _rho_grid_min(pair: OperatorPair, radii, angles) -> float:
    alphas = (np.asarray(radii)[:, None] * np.exp(1j * np.asarray(angles))[None, :]).ravel()
    alphas = np.concatenate([[0j], alphas])
    S, P, n = pair.S, pair.P, pair.dim
    a = alphas[:, None, None]
    Sa = a * S[None]
    Pa = a * a * P[None]
    SaH = Sa.conj().transpose(0, 2, 1)
    X = Sa - SaH @ Pa
    R = 2 * (np.eye(n)[None] - Pa.conj().transpose(0, 2, 1) @ Pa) - X - X.conj().transpose(0, 2, 1)
    return float(np.min(np.linalg.eigvalsh(0.5 * (R + R.conj().transpose(0, 2, 1)))[:, 0]))


@dataclass
class PairClass:
    flags: dict
    residuals: dict
    fundamental: np.ndarray | None
    defect_basis: numlin.SubspaceBasis | None
    joint_spectrum: np.ndarray | None = None
    warnings: list = field(default_factory=list)

    def __getattr__(self, name):
        flags = self.__dict__.get("flags", {})
        if name in flags:
            return flags[name]
        raise AttributeError(name)


def classify_pair(pair, alpha_grid: tuple[int, int] = (16, 64), tol: float = 1e-8,
                  seed: int = 0) -> PairClass:
    pair = _pair(pair)
    pair.check_commuting()
    S, P, n = pair.S, pair.P, pair.dim
    nS, nP = numlin.operator_norm(S), numlin.operator_norm(P)
    scale = max(1.0, nS, nP)
    res = {"commutator": pair.commutator(), "norm_S": nS, "norm_P": nP}
    notes = []

    A = basis = None
    contraction = False
    if nP <= 1 + 1e-9:
        fr = fundamental_operator(pair)
        A, basis = fr.A, fr.defect_basis
        res["fundamental_residual"] = fr.residual
        res["omega_A"] = numlin.numerical_radius(A) if A.size else 0.0
        contraction = (nS <= 2 + tol and nP <= 1 + tol
                       and fr.residual <= 1e-7 * scale and res["omega_A"] <= 1 + 1e-6)

    nr, na = alpha_grid
    radii = (1 - 1e-3) * np.arange(1, nr + 1) / nr
    angles = 2 * np.pi * np.arange(na) / na
    res["rho_min"] = _rho_grid_min(pair, radii, angles)
    # rho is continuous on the closed disc, so its infimum over D is reached on
    # the closure; the circle ring decides strictness
    res["rho_min_closed"] = min(res["rho_min"], _rho_grid_min(pair, [1.0], angles))

    try:
        js = numlin.joint_spectrum(S, P, seed)
        inside = all(classify_point((s, p), 1e-6).region.in_gamma for s, p in js)
    except numlin.ConvergenceError as exc:
        js, inside = None, False
        notes.append(f"joint spectrum unavailable: {exc}")
    cross = res["rho_min"] >= -1e-8 and inside
    if cross != contraction:
        notes.append(f"rho/joint-spectrum cross-check ({cross}) disagrees with "
                     f"fundamental-equation route ({contraction})")

    res["isometry_SP"] = numlin.operator_norm(S.conj().T @ P - S)
    res["isometry_P"] = numlin.operator_norm(P.conj().T @ P - np.eye(n))
    res["coisometry_P"] = numlin.operator_norm(P @ P.conj().T - np.eye(n))
    iso = (res["isometry_SP"] <= tol * scale and res["isometry_P"] <= tol
           and nS <= 2 + tol)
    unitary = iso and res["coisometry_P"] <= tol
    res["spectral_radius_P"] = numlin.spectral_radius(P)
    flags = dict(
        commuting=True,
        gamma_contraction=contraction,
        rho_cross_check=cross,
        pure=res["spectral_radius_P"] < 1 - 1e-9,
        gamma_isometry=iso and contraction,
        gamma_unitary=unitary and contraction,
        strict=contraction and res["rho_min_closed"] >= 1e-6,
    )
    for msg in notes:
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    return PairClass(flags, res, A, basis, js, notes)


def annihilation_residual(pair, p: BiPoly) -> float:
    pair = _pair(pair)
    M = numlin.apply_bipoly(p, pair.S, pair.P)
    big = max(1.0, numlin.operator_norm(pair.S), numlin.operator_norm(pair.P))
    return numlin.operator_norm(M) / (1.0 + p.norm1() * big ** p.degree)


def is_gamma_unitary(pair, tol: float = 1e-8) -> bool:
    pair = _pair(pair)
    S, P, n = pair.S, pair.P, pair.dim
    scale = max(1.0, numlin.operator_norm(S))
    return (numlin.commutator_norm(S, P) <= tol * scale
            and numlin.operator_norm(S.conj().T @ P - S) <= tol * scale
            and numlin.operator_norm(P.conj().T @ P - np.eye(n)) <= tol
            and numlin.operator_norm(P @ P.conj().T - np.eye(n)) <= tol
            and numlin.operator_norm(S) <= 2 + tol)


def circle_roots(s: complex, p: complex) -> tuple[complex, complex]:
    """Unit-modulus roots of ``x^2 - s x + p`` for a point of bGamma."""
    w = np.exp(0.5j * np.angle(p))
    x = float(np.clip((s * np.conj(w)).real / 2, -1.0, 1.0))
    y = np.sqrt(1 - x * x)
    return complex(w * (x + 1j * y)), complex(w * (x - 1j * y))


@dataclass
class RootPair:
    U1: np.ndarray
    U2: np.ndarray


def symmetrization_root(pair, seed: int = 0) -> RootPair:
    """Commuting unitaries with ``U1 + U2 = S`` and ``U1 U2 = P``."""
    pair = _pair(pair)
    if not is_gamma_unitary(pair):
        raise DomainError("pair is not a Gamma-unitary")
    Q, S1, P1 = numlin.joint_triangularize(pair.S, pair.P, seed)
    roots = [circle_roots(s, p) for s, p in zip(np.diag(S1), np.diag(P1))]
    z1 = np.array([r[0] for r in roots])
    z2 = np.array([r[1] for r in roots])
    QH = Q.conj().T
    return RootPair((Q * z1) @ QH, (Q * z2) @ QH)


@dataclass
class SqrtResult:
    Delta: np.ndarray
    V1: np.ndarray
    V2: np.ndarray


def commuting_sqrt(pair, seed: int = 0) -> SqrtResult:
    """``Delta`` with ``Delta^2 = S^2 - 4P``; ``(S +- Delta)/2`` are unitary."""
    pair = _pair(pair)
    r = symmetrization_root(pair, seed)
    Delta = r.U1 - r.U2
    return SqrtResult(Delta, (pair.S + Delta) / 2, (pair.S - Delta) / 2)


@dataclass
class Certificate:
    certified: bool
    polynomial: BiPoly | None
    route: str
    checks: dict = field(default_factory=dict)


def _fmt(z: complex) -> str:
    z = complex(z)
    re, im = round(z.real, 6) + 0.0, round(z.imag, 6) + 0.0
    if im == 0:
        return f"{re:g}"
    return f"{re:g}{im:+g}i"


def gamma_distinguished_certificate(pair, candidates=(), grid: int = 256,
                                    tol: float = 1e-6, seed: int = 0) -> Certificate:
    """Search for a Gamma-distinguished polynomial annihilating ``pair``.

    Explicit candidates are tried first.  For a pure Gamma-contraction the
    determinant pencil of the fundamental operator ``F*`` of ``(S*, P*)``
    (and its product with ``z1``) is added when ``r(F*) < 1``; otherwise a
    joint eigenvalue in the boundary of Gamma but off bGamma is recorded as
    the obstruction.
    """
    pair = _pair(pair)
    pair.check_commuting()
    checks: dict = {}
    routes: list[str] = []
    pool = [(c, "candidate") for c in candidates]

    js = numlin.joint_spectrum(pair.S, pair.P, seed)
    obstruction = None
    for s, p in js:
        if classify_point((s, p), 1e-9).region == Region.BOUNDARY_NOT_BGAMMA:
            obstruction = (s, p)
            break

    pc = classify_pair(pair, seed=seed)
    if pc.gamma_contraction and pc.pure:
        Fstar = fundamental_operator(pair.adjoint()).A
        r = numlin.spectral_radius(Fstar) if Fstar.size else 0.0
        checks["r(F*)"] = r
        if r < 1 - 1e-9:
            pen = det_pencil(Fstar, "adjoint_first")
            pool += [(pen, "det(F*^* + z2 F* - z1 I)"),
                     (BiPoly.z1() * pen, "z1 det(F*^* + z2 F* - z1 I)")]
        else:
            routes.append(f"r(F*) = {_fmt(r)} >= 1")
        A = pc.fundamental
        if A is not None and A.size and numlin.numerical_radius(A) < 1 - 1e-9:
            pool.append((det_pencil(A, "adjoint_first"), "det(A^* + z2 A - z1 I)"))

    if obstruction is not None:
        s, p = obstruction
        routes.append(f"{_fmt(s)} ∈ σ(S), ({_fmt(s)},{_fmt(p)}) ∉ bΓ: joint eigenvalue "
                      f"in ∂Γ outside bΓ")

    for poly, label in pool:
        res = annihilation_residual(pair, poly)
        if res > 1e-8:
            checks[f"residual[{label}]"] = res
            continue
        verdict = classify_gamma(poly, grid, tol)
        checks[f"gamma_distinguished[{label}]"] = verdict.gamma_distinguished
        if verdict.gamma_distinguished:
            routes.insert(0, f"annihilated by {label} (residual {res:.2e})")
            return Certificate(True, poly, "; ".join(routes), checks)
    if not routes:
        routes.append("no candidate both annihilates the pair and is Gamma-distinguished")
    return Certificate(False, None, "; ".join(routes), checks)
