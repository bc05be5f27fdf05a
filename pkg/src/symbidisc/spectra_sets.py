"""Sampled von Neumann inequality checks on varieties in the bidisc and in Gamma.

The right-hand side of ``||f(S, P)|| <= sup |f|`` is estimated from points
of ``Z(q)`` produced by :func:`symbidisc.bipoly.sample_variety`.  A sampled
supremum is a lower bound for the true one, so a "consistent" verdict is
evidence only.  A "violated" verdict additionally requires that refining the
sample grid does not close the gap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numlin
from .bipoly import BiPoly, eval_poly, sample_variety
from .errors import DomainError
from .pairs import _pair

COND_LIMIT = 1e8


@dataclass
class VNReport:
    lhs: float
    sup_estimate: float | None
    sample_count: int
    verdict: str
    witness: dict | None = None
    grid: int = 0
    margin: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def violated(self) -> bool:
        return self.verdict == "violated"


def _points(points) -> np.ndarray:
    pts = np.asarray(points, complex)
    if pts.size == 0:
        return np.zeros((0, 2), complex)
    return pts.reshape(-1, 2)


def _values(f: BiPoly, pts: np.ndarray, denominator: BiPoly | None):
    vals = eval_poly(f, pts[:, 0], pts[:, 1])
    if denominator is None:
        return vals
    den = eval_poly(denominator, pts[:, 0], pts[:, 1])
    ok = np.abs(den) > 1e-12 * max(1.0, denominator.max_coeff())
    out = np.full(vals.shape, np.nan, complex)
    out[ok] = vals[ok] / den[ok]
    return out


def sup_on_samples(f: BiPoly, points, denominator: BiPoly | None = None) -> float | None:
    """Largest ``|f|`` over the points, ``None`` when there are none."""
    pts = _points(points)
    if len(pts) == 0:
        return None
    vals = np.abs(_values(f, pts, denominator))
    if not np.any(np.isfinite(vals)):
        return None
    return float(np.nanmax(vals))


def _operator_value(pair, f: BiPoly, denominator: BiPoly | None) -> np.ndarray:
    F = numlin.apply_bipoly(f, pair.S, pair.P, check=False)
    if denominator is None:
        return F
    Q = numlin.apply_bipoly(denominator, pair.S, pair.P, check=False)
    if Q.size and np.linalg.cond(Q) >= COND_LIMIT:
        raise DomainError("denominator is not safely invertible at the pair")
    return np.linalg.solve(Q.T, F.T).T if Q.size else F


def vn_check(pair, f: BiPoly, variety: BiPoly, region: str = "GAMMA", grid: int = 512,
             margin: float | None = None, denominator: BiPoly | None = None) -> VNReport:
    """Compare ``||f(S, P)||`` with the sampled sup of ``|f|`` on ``Z(variety)``.

    ``region`` selects the closed bidisc (``BIDISC``, pair read as
    ``(T1, T2)``) or Gamma (``GAMMA``, pair read as ``(S, P)``).
    """
    pair = _pair(pair)
    pair.check_commuting()
    scale = max(1.0, f.norm1())
    if margin is None:
        margin = 1e-6 * scale
    lhs = numlin.operator_norm(_operator_value(pair, f, denominator))
    pts = sample_variety(variety, region, grid)
    sup = sup_on_samples(f, pts, denominator)
    if sup is None:
        return VNReport(lhs, None, 0, "inconclusive", None, grid, margin)
    k = int(np.nanargmax(np.abs(_values(f, pts, denominator))))
    witness = {"point": [complex(pts[k, 0]), complex(pts[k, 1])], "value": sup}
    details = {}
    eff = margin
    if lhs > sup + margin:
        # a gap that shrinks under refinement is a sampling artefact
        fine = sup_on_samples(f, sample_variety(variety, region, 2 * grid), denominator)
        growth = max(0.0, (fine or 0.0) - sup)
        details["refined_sup"] = fine
        eff = max(margin, 4 * growth)
        sup = max(sup, fine or 0.0)
    verdict = "violated" if lhs > sup + eff else "consistent"
    return VNReport(lhs, sup, len(pts), verdict, witness, grid, eff, details)


def _random_entry(rng, degree: int) -> BiPoly:
    C = rng.standard_normal((degree + 1, degree + 1)) + 1j * rng.standard_normal((degree + 1, degree + 1))
    C *= rng.random(C.shape) < 0.6
    return BiPoly.from_array(C)


def _as_matrix_poly(x) -> list[list[BiPoly]]:
    if isinstance(x, BiPoly):
        return [[x]]
    return [[e for e in row] for row in x]


def _matrix_on_points(F: list[list[BiPoly]], pts: np.ndarray) -> np.ndarray:
    m = len(F)
    out = np.empty((len(pts), m, m), complex)
    for i in range(m):
        for j in range(m):
            out[:, i, j] = eval_poly(F[i][j], pts[:, 0], pts[:, 1])
    return out


def _matrix_on_pair(F: list[list[BiPoly]], pair) -> np.ndarray:
    return np.block([[numlin.apply_bipoly(e, pair.S, pair.P, check=False) for e in row]
                     for row in F])


def complete_vn_check(pair, variety: BiPoly, region: str = "GAMMA", grid: int = 256,
                      matrix_degree: int = 2, trials: int = 200, seed: int = 0,
                      seeded=(), max_size: int = 3, margin: float | None = None) -> VNReport:
    """Matricial version of :func:`vn_check` over random polynomial matrices.

    ``seeded`` holds polynomials (or square lists of lists of polynomials)
    tried before the random ones.  The report carries the trial with the
    largest ``lhs - sup``; on a violation that trial is the witness.
    """
    pair = _pair(pair)
    pair.check_commuting()
    pts = sample_variety(variety, region, grid)
    rng = np.random.default_rng(seed)
    cases = [_as_matrix_poly(x) for x in seeded]
    while len(cases) < len(seeded) + trials:
        m = int(rng.integers(1, max_size + 1))
        cases.append([[_random_entry(rng, matrix_degree) for _ in range(m)] for _ in range(m)])
    if len(pts) == 0:
        return VNReport(0.0, None, 0, "inconclusive", None, grid, 0.0)
    best = None
    for idx, F in enumerate(cases):
        scale = max(1.0, max(e.norm1() for row in F for e in row))
        tol = 1e-6 * scale if margin is None else margin
        lhs = numlin.operator_norm(_matrix_on_pair(F, pair))
        norms = np.linalg.norm(_matrix_on_points(F, pts), ord=2, axis=(1, 2))
        k = int(np.argmax(norms))
        gap = lhs - norms[k] - tol
        if best is None or gap > best[0]:
            best = (gap, idx, F, lhs, float(norms[k]), k, tol)
        if gap > 0:
            break
    gap, idx, F, lhs, sup, k, tol = best
    witness = {
        "trial": idx,
        "size": len(F),
        "entries": [[e.as_dict() for e in row] for row in F],
        "point": [complex(pts[k, 0]), complex(pts[k, 1])],
    }
    verdict = "violated" if gap > 0 else "consistent"
    return VNReport(lhs, sup, len(pts), verdict, witness, grid, tol,
                    {"trials_run": idx + 1 if gap > 0 else len(cases)})


def boundary_sup_gap(f: BiPoly, q: BiPoly, grid: int = 1024) -> dict:
    """Sampled sup of ``|f|`` over ``Z(q)`` in the closed bidisc and on the torus."""
    full = sup_on_samples(f, sample_variety(q, "BIDISC", grid))
    torus = sup_on_samples(f, sample_variety(q, "BIDISC", grid, torus=True))
    if full is None or torus is None:
        return {"closed": full, "torus": torus, "relative_gap": None}
    rel = abs(full - torus) / max(full, 1e-300)
    return {"closed": full, "torus": torus, "relative_gap": rel}
