import sys

import numpy as np
import pytest

from symbidisc.bipoly import eval_poly, sample_variety
from symbidisc.pairs import OperatorPair


def random_unitary(n, rng):
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def commuting_contractions(n, rng):
    """Two commuting contractions, both polynomials in one random matrix."""
    M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    M /= np.linalg.norm(M, 2)
    c = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    T1 = c[0] * M + c[1] * M @ M
    T2 = M @ M @ M + c[2] * M
    T1 *= rng.uniform(0.3, 1.0) / np.linalg.norm(T1, 2)
    T2 *= rng.uniform(0.3, 1.0) / np.linalg.norm(T2, 2)
    return T1, T2


def random_gamma_contraction(n, rng):
    T1, T2 = commuting_contractions(n, rng)
    return OperatorPair(T1 + T2, T1 @ T2)


def random_gamma_unitary(n, rng):
    U = random_unitary(n, rng)
    a, b = np.exp(2j * np.pi * rng.random((2, n)))
    UH = U.conj().T
    return OperatorPair(U @ np.diag(a + b) @ UH, U @ np.diag(a * b) @ UH)


def variety_points(polys, counts, rng, grid=64):
    """bGamma points of each variety, avoiding points shared with the others."""
    out = []
    for k, (q, c) in enumerate(zip(polys, counts)):
        S = sample_variety(q, "GAMMA", grid, torus=True)
        for other in polys[:k] + polys[k + 1:]:
            S = S[np.abs(eval_poly(other.normalized(), S[:, 0], S[:, 1])) > 1e-6]
        out.append(S[rng.choice(len(S), c, replace=False)])
    return out


def unitary_on_variety(polys, counts, rng, grid=64, with_blocks=False):
    """Gamma-unitary whose joint eigenvalues are bGamma points of the given varieties.

    With ``with_blocks`` the eigenvector block belonging to each variety is
    returned as well.
    """
    pts = np.concatenate(variety_points(polys, counts, rng, grid))
    U = random_unitary(len(pts), rng)
    UH = U.conj().T
    pair = OperatorPair(U @ np.diag(pts[:, 0]) @ UH, U @ np.diag(pts[:, 1]) @ UH)
    if not with_blocks:
        return pair
    edges = np.cumsum([0, *counts])
    return pair, [U[:, a:b] for a, b in zip(edges, edges[1:])]


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
