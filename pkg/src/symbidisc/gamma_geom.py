"""Scalar geometry of the bidisc and the symmetrized bidisc.

``pi(z1, z2) = (z1 + z2, z1 z2)`` maps the closed bidisc onto Gamma, the
open bidisc onto G2 and the torus onto the distinguished boundary bGamma.
Region decisions are made from the pi-fibre ``{z1, z2}`` (roots of
``x^2 - s x + p``); the classical inequality tests are kept as margins.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError

CLUSTER_TOL = 1e-7


@dataclass(frozen=True)
class GammaPoint:
    s: complex
    p: complex

    def as_tuple(self) -> tuple[complex, complex]:
        return complex(self.s), complex(self.p)


class Region(str, Enum):
    OPEN_G2 = "OPEN_G2"
    BOUNDARY_NOT_BGAMMA = "BOUNDARY_NOT_BGAMMA"
    BGAMMA = "BGAMMA"
    SYM_EXTERIOR = "SYM_EXTERIOR"
    OTHER_OUTSIDE = "OTHER_OUTSIDE"

    @property
    def in_gamma(self) -> bool:
        return self in (Region.OPEN_G2, Region.BOUNDARY_NOT_BGAMMA, Region.BGAMMA)


@dataclass(frozen=True)
class RegionVerdict:
    region: Region
    root_pair: tuple[complex, complex]
    margins: dict = field(default_factory=dict)


def _pt(pt) -> tuple[complex, complex]:
    if isinstance(pt, GammaPoint):
        return complex(pt.s), complex(pt.p)
    s, p = pt
    return complex(s), complex(p)


def symmetrize(z1: complex, z2: complex) -> GammaPoint:
    return GammaPoint(complex(z1) + complex(z2), complex(z1) * complex(z2))


def unsymmetrize_point(pt) -> tuple[complex, complex]:
    """Roots of ``x^2 - s x + p`` ordered so that ``|z1| >= |z2|``."""
    s, p = _pt(pt)
    d = cmath.sqrt(s * s - 4 * p)
    a, b = s + d, s - d
    big = a if abs(a) >= abs(b) else b
    z1 = big / 2
    z2 = p / z1 if z1 != 0 else 0j
    if abs(z2) > abs(z1):
        z1, z2 = z2, z1
    return z1, z2


def unsymmetrize_many(s, p) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`unsymmetrize_point`."""
    s = np.asarray(s, complex)
    p = np.asarray(p, complex)
    d = np.sqrt(s * s - 4 * p)
    a, b = s + d, s - d
    big = np.where(np.abs(a) >= np.abs(b), a, b) / 2
    safe = np.where(big == 0, 1.0, big)
    small = np.where(big == 0, 0.0, p / safe)
    swap = np.abs(small) > np.abs(big)
    return np.where(swap, small, big), np.where(swap, big, small)


def criterion_margins(s: complex, p: complex) -> dict:
    """Signed margins of the membership tests; negative means inside.

    ``b``: ``|s - conj(s) p| + |p|^2 <= 1`` and ``|s| <= 2``.
    ``c``: ``2|s - conj(s) p| + |s^2 - 4p| + |s|^2 <= 4``.
    ``d``: ``|p| <= 1`` with ``s = beta + conj(beta) p`` for some ``|beta| <= 1``.
    ``bgamma``: ``s = conj(s) p``, ``|s| <= 2``, ``|p| = 1`` (zero on bGamma).
    """
    t = abs(s - s.conjugate() * p)
    mb = max(t + abs(p) ** 2 - 1.0, abs(s) - 2.0)
    mc = 2 * t + abs(s * s - 4 * p) + abs(s) ** 2 - 4.0
    if abs(p) < 1.0:
        beta = (s - s.conjugate() * p) / (1.0 - abs(p) ** 2)
        md = max(abs(p) - 1.0, abs(beta) - 1.0)
    else:
        md = abs(p) - 1.0
    mbg = max(t, abs(s) - 2.0, abs(abs(p) - 1.0))
    return {"b": mb, "c": mc, "d": md, "bgamma": mbg}


def classify_point(pt, tol: float = 1e-9) -> RegionVerdict:
    s, p = _pt(pt)
    z1, z2 = unsymmetrize_point((s, p))
    hi, lo = max(abs(z1), abs(z2)), min(abs(z1), abs(z2))
    if abs(z1 - z2) <= CLUSTER_TOL * max(1.0, abs(s)):
        # near-double root: the split is rounding noise, |p| is well conditioned
        hi = lo = math.sqrt(abs(p))
    if hi < 1 - tol:
        region = Region.OPEN_G2
    elif 1 - tol <= lo and hi <= 1 + tol:
        region = Region.BGAMMA
    elif 1 - tol <= hi <= 1 + tol and lo < 1 - tol:
        region = Region.BOUNDARY_NOT_BGAMMA
    elif lo > 1 + tol:
        region = Region.SYM_EXTERIOR
    else:
        region = Region.OTHER_OUTSIDE
    margins = criterion_margins(s, p)
    margins["roots"] = hi - 1.0
    return RegionVerdict(region, (z1, z2), margins)


def _beta_residual(beta: complex, s: complex, p: complex) -> float:
    return abs(s - beta - beta.conjugate() * p)


def beta_of(pt, tol: float = 1e-9) -> complex:
    """A ``beta`` in the closed disc with ``s = beta + conj(beta) p``.

    For ``|p| < 1`` the solution is unique.  On ``|p| = 1`` the solutions
    form a segment and the one of least modulus is returned.
    """
    s, p = _pt(pt)
    verdict = classify_point((s, p), tol)
    if not verdict.region.in_gamma:
        raise DomainError(f"({s}, {p}) is outside Gamma")
    candidates = []
    d = 1.0 - abs(p) ** 2
    if d > 0:
        candidates.append((s - s.conjugate() * p) / d)
    # root formula, stable when one root sits on the circle
    z1, z2 = verdict.root_pair
    a = (1 - abs(z1)) * (1 + abs(z1))
    b = (1 - abs(z2)) * (1 + abs(z2))
    den = a + b - a * b
    if den > 0:
        candidates.append((z1 * b + z2 * a) / den)
    # unit-circle formula: s = 2 w Re(conj(w) beta) with w^2 = p/|p|
    if abs(p) > 0:
        w = cmath.exp(0.5j * cmath.phase(p))
        candidates.append(w * (s * w.conjugate()).real / 2)
    if not candidates:
        candidates.append(s)
    ok = [c for c in candidates if abs(c) <= 1 + tol]
    pool = ok or candidates
    if abs(abs(p) - 1.0) <= tol and verdict.region == Region.BGAMMA:
        pool = sorted(pool, key=lambda c: (_beta_residual(c, s, p) > 1e-10, abs(c)))
        return pool[0]
    return min(pool, key=lambda c: _beta_residual(c, s, p))


class PeakingFunction:
    """A rational function given by a closure, exposed through ``evaluate``."""

    def __init__(self, func, peak, description: str):
        self._func = func
        self.peak = peak
        self.description = description

    def evaluate(self, pt) -> complex:
        a, b = _pt(pt)
        return complex(self._func(a, b))

    def __call__(self, a, b):
        return self._func(np.asarray(a, complex), np.asarray(b, complex))


def _disc_automorphism(z1: complex, z2: complex) -> tuple[complex, complex]:
    """``(a, e^{i phi})`` with ``v(z) = e^{i phi}(z - a)/(1 - conj(a) z)``,
    ``v(z1) = 1`` and ``v(z2) = -1``.

    The one-parameter family is pinned by also sending the midpoint of the
    counterclockwise arc from z1 to z2 to ``i``.
    """
    t1, t2 = cmath.phase(z1), cmath.phase(z2)
    arc = (t2 - t1) % (2 * math.pi)
    m = cmath.exp(1j * (t1 + arc / 2))
    # cross ratio of (z; z1, m, z2) equals that of (w; 1, i, -1) iff
    # (w - 1)/(w + 1) = i * cr; v(a) = 0 means cr = i
    k = (m - z2) / (m - z1)
    # (a - z1) k = i (a - z2)
    a = (z1 * k - 1j * z2) / (k - 1j)
    rot = (1 - a.conjugate() * z1) / (z1 - a)
    rot /= abs(rot)
    return a, rot


def peak_bgamma(pt, tol: float = 1e-9) -> PeakingFunction:
    """A function of Gamma peaking exactly at the bGamma point ``pt``."""
    s0, p0 = _pt(pt)
    verdict = classify_point((s0, p0), tol)
    if verdict.region != Region.BGAMMA:
        raise DomainError(f"({s0}, {p0}) is not in bGamma ({verdict.region.value})")
    z1, z2 = verdict.root_pair
    z1, z2 = z1 / abs(z1), z2 / abs(z2)
    if abs(z1 - z2) <= CLUSTER_TOL * 2:
        sp = 2 * s0 / abs(s0)

        def f(s, p):
            return 0.5 * (1 + s / sp)

        return PeakingFunction(f, GammaPoint(s0, p0), "equal roots: (1 + s/s0)/2")

    a, rot = _disc_automorphism(z1, z2)
    ac = a.conjugate()

    def f(s, p):
        D = 1 - ac * s + ac * ac * p
        ts = rot * (s * (1 + abs(a) ** 2) - 2 * ac * p - 2 * a) / D
        tp = rot * rot * (p - a * s + a * a) / D
        return 0.5 * (1 + (ts * ts - 4 * tp) / 4)

    return PeakingFunction(f, GammaPoint(s0, p0), "g o T_v with g = (1 + (s^2-4p)/4)/2")


def peak_torus(x: float, y: float) -> PeakingFunction:
    """``g(z1, z2) = e^{ix}/(2e^{ix} - z1) * e^{iy}/(2e^{iy} - z2)``."""
    ex, ey = cmath.exp(1j * x), cmath.exp(1j * y)

    def g(z1, z2):
        return ex / (2 * ex - z1) * (ey / (2 * ey - z2))

    return PeakingFunction(g, (ex, ey), "product of (e^{ix}/(2e^{ix}-z)) factors")
