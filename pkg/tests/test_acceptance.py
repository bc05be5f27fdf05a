"""Acceptance criteria, one test per criterion.

Each test records a single PASS/FAIL line; the lines are printed as they are
produced and repeated in the terminal summary by conftest.
"""

import warnings

import numpy as np

from symbidisc import numlin
from symbidisc.bipoly import (
    BiPoly, classify_bidisc, classify_gamma, compose_pi, desymmetrize, det_pencil,
)
from symbidisc.cli_io import A_PENCIL, E_PENCIL, COUNTER_T1, COUNTER_T2, counter_gamma_pair
from symbidisc.decomp import factor_decompose_unitary, orthogonality_check
from symbidisc.dilation import (
    appendix_identities, apply_bipoly_band, build_TA_V0, build_Tn_Vn, build_toeplitz_model,
    verify_compression,
)
from symbidisc.gamma_geom import Region, classify_point
from symbidisc.pairs import (
    OperatorPair, fundamental_operator, gamma_distinguished_certificate, symmetrization_root,
)
from symbidisc.spectra_sets import boundary_sup_gap, vn_check

from conftest import random_gamma_contraction, random_gamma_unitary, unitary_on_variety

Z1, Z2 = BiPoly.z1(), BiPoly.z2()
ONE = BiPoly.const(1)
ROYAL = 4 * Z2 - Z1 ** 2
SEED = 20261017

RESULTS: dict[int, str] = {}


def record(k: int, ok: bool, detail: str):
    line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[k] = line
    print(line)
    assert ok, line


def test_criterion_01_geometry_consistency():
    rng = np.random.default_rng(SEED)
    n = 100_000
    s = rng.uniform(-2.5, 2.5, n) + 1j * rng.uniform(-2.5, 2.5, n)
    p = rng.uniform(-1.5, 1.5, n) + 1j * rng.uniform(-1.5, 1.5, n)
    # mix in points of Gamma so both verdicts are well represented
    z = np.sqrt(rng.random((2, n // 2))) * np.exp(2j * np.pi * rng.random((2, n // 2)))
    s[: n // 2], p[: n // 2] = z[0] + z[1], z[0] * z[1]
    checked = disagreements = 0
    for a, b in zip(s, p):
        v = classify_point((a, b))
        m = v.margins
        if min(abs(m["b"]), abs(m["c"]), abs(m["d"]), abs(m["roots"])) <= 1e-6:
            continue
        checked += 1
        inside = m["roots"] < 0
        if not ((m["b"] < 0) == (m["c"] < 0) == (m["d"] < 0) == inside):
            disagreements += 1
    record(1, disagreements == 0 and checked > n // 2,
           f"{checked} points compared, {disagreements} disagreements")


def test_criterion_02_pencil_example():
    w = numlin.numerical_radius(A_PENCIL)
    eig = np.linalg.eigvals(A_PENCIL)
    spec_err = max(max(min(abs(e - t) for t in (0, 1)) for e in eig),
                   max(min(abs(e - t) for e in eig) for t in (0, 1)))
    region = classify_point((1, 0)).region
    model = build_toeplitz_model(A_PENCIL.conj().T)
    res = apply_bipoly_band(det_pencil(A_PENCIL, "matrix_first"), model.Tphi, model.Tz).norm_bound()
    cert = gamma_distinguished_certificate(OperatorPair(A_PENCIL, np.zeros((3, 3))))
    ok = (abs(w - 1) <= 1e-6 and spec_err <= 1e-8 and region is Region.BOUNDARY_NOT_BGAMMA
          and res <= 1e-12 and not cert.certified and "(1,0) ∉ bΓ" in cert.route)
    record(2, ok, f"omega={w:.12f} spectrum_err={spec_err:.1e} region={region.value} "
                  f"band_residual={res:.1e} certified={cert.certified}")


def test_criterion_03_scalar_pair_example():
    r = 0.5
    fr = fundamental_operator(OperatorPair(2 * r * np.eye(2), r * r * np.eye(2)))
    err = numlin.operator_norm(fr.full() - 0.8 * np.eye(2))
    model = build_toeplitz_model(0.8 * np.eye(2))
    f = Z1 - 0.8 * Z2 - 0.8
    res = apply_bipoly_band(f, model.Tphi, model.Tz).norm_bound()
    g = classify_gamma(f, 512).gamma_distinguished
    record(3, err <= 1e-10 and res == 0 and g,
           f"|A-0.8I|={err:.1e} band_residual={res:.1e} gamma_distinguished={g}")


def test_criterion_04_dilation_identities():
    rng = np.random.default_rng(SEED + 4)
    worst_id = worst_comp = worst_tn = 0.0
    for _ in range(100):
        pair = random_gamma_contraction(int(rng.integers(1, 4)), rng)
        b = build_TA_V0(pair)
        worst_id = max(worst_id, *b.residuals.values())
        worst_comp = max(worst_comp, verify_compression(b, 8))
        for n in (1, 2, 3):
            t = build_Tn_Vn(pair, n)
            worst_tn = max(worst_tn, t.Yn_check, t.checks["defect_projection"])
    ok = worst_id <= 1e-10 and worst_comp <= 1e-9 and worst_tn <= 1e-10
    record(4, ok, f"identities {worst_id:.1e}, compression(8) {worst_comp:.1e}, "
                  f"Tn pattern {worst_tn:.1e}")


def test_criterion_05_delta_identities():
    res = appendix_identities(A_PENCIL, E_PENCIL)
    keys = ["S^2-4P-Delta^2", "S.Delta-Delta.S", "(S+Delta)*(S+Delta)-4I"]
    worst = max(res[k] for k in keys)
    record(5, worst <= 1e-12, f"max residual {worst:.1e}")


def test_criterion_06_spectral_set_falsifications():
    t = vn_check(OperatorPair(COUNTER_T1, COUNTER_T2), Z1 - Z2, (Z1 - Z2) ** 3, "BIDISC", 512)
    pair, r = counter_gamma_pair()
    g = vn_check(pair, ROYAL, ROYAL ** 2, "GAMMA", 512)
    ok = (t.violated and t.lhs >= 0.1 and t.sup_estimate <= 1e-10
          and g.violated and g.lhs >= 0.1 * r * r and g.sup_estimate <= 1e-10)
    record(6, ok, f"toral lhs={t.lhs:.3f} sup={t.sup_estimate:.1e}; "
                  f"gamma lhs={g.lhs:.3f} (0.1 r^2={0.1 * r * r:.3f}) sup={g.sup_estimate:.1e}")


def test_criterion_07_classifier_verdicts():
    grid, tol = 512, 1e-6
    got = {}
    v = classify_bidisc(Z1 - Z2, grid, tol)
    got["z1-z2 toral"] = v.toral
    got["1-z1z2 not toral"] = not classify_bidisc(ONE - Z1 * Z2, grid, tol).toral
    v = classify_bidisc((Z1 + Z2) * (Z1 * Z2 - ONE), grid, tol)
    got["(z1+z2)(z1z2-1) toral, not inner"] = v.toral and not v.inner_toral
    got["z2 neither"] = (not classify_bidisc(Z2, grid, tol).toral
                         and not classify_gamma(Z2, grid, tol).gamma_distinguished)
    got["4z2-z1^2 Gamma-distinguished"] = classify_gamma(ROYAL, grid, tol).gamma_distinguished
    a = 0.3
    got["z1-a z2-a Gamma-distinguished"] = classify_gamma(
        Z1 - np.conj(a) * Z2 - a, grid, tol).gamma_distinguished
    rng = np.random.default_rng(SEED + 7)
    pencils = []
    for n in (1, 2, 2, 3, 3):
        F = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        F *= rng.uniform(0.5, 1.0) / numlin.numerical_radius(F)
        assert numlin.spectral_radius(F) < 1 - 1e-3
        pencils.append(classify_gamma(det_pencil(F), grid, tol).distinguished)
    got["det pencils distinguished"] = all(pencils)
    bad = [k for k, ok in got.items() if not ok]
    record(7, not bad, f"{len(got) - len(bad)}/{len(got)} verdicts match" +
           (f"; mismatched: {bad}" if bad else ""))


def test_criterion_08_decomposition():
    rng = np.random.default_rng(SEED + 8)
    worst_orth = worst_ann = worst_red = 0.0
    dims_ok = True
    for _ in range(50):
        a, b = 0.9 * np.sqrt(rng.random(2)) * np.exp(2j * np.pi * rng.random(2))
        F = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        F *= rng.uniform(0.3, 0.9) / numlin.numerical_radius(F)
        q1 = det_pencil(F)
        q2 = Z1 - np.conj(b) * Z2 - b
        pair = unitary_on_variety([q1, q2], list(rng.integers(1, 4, 2)), rng)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            oc = orthogonality_check(pair, q1, q2)
        res = factor_decompose_unitary(pair, [q1, q2])
        worst_orth = max(worst_orth, float(oc), res.residuals["orthogonality"])
        worst_ann = max(worst_ann, *res.residuals["annihilation"])
        worst_red = max(worst_red, *res.residuals["reducing"])
        dims_ok &= res.residuals["dimension_sum"] == pair.dim
    ok = worst_orth <= 1e-8 and worst_ann <= 1e-7 and worst_red <= 1e-8 and dims_ok
    record(8, ok, f"orthogonality {worst_orth:.1e}, annihilation {worst_ann:.1e}, "
                  f"reducing {worst_red:.1e}, dimensions add up={dims_ok}")


def test_criterion_09_round_trips():
    rng = np.random.default_rng(SEED + 9)
    worst_poly = 0.0
    for _ in range(500):
        n = int(rng.integers(0, 5))
        C = rng.standard_normal((n + 1, n + 1)) + 1j * rng.standard_normal((n + 1, n + 1))
        C = np.triu(C[::-1])[::-1]  # total degree <= n
        p = BiPoly.from_array(C)
        back = desymmetrize(compose_pi(p))
        worst_poly = max(worst_poly, max((abs(c) for _, _, c in (back - p).terms), default=0.0))
    worst_root = 0.0
    for _ in range(200):
        pair = random_gamma_unitary(int(rng.integers(1, 6)), rng)
        r = symmetrization_root(pair)
        worst_root = max(worst_root, numlin.operator_norm(r.U1 + r.U2 - pair.S),
                         numlin.operator_norm(r.U1 @ r.U2 - pair.P))
    record(9, worst_poly <= 1e-10 and worst_root <= 1e-8,
           f"desymmetrize {worst_poly:.1e}, symmetrization root {worst_root:.1e}")


def _toral_factor(rng):
    # z1 = c (z2 - a)/(1 - conj(a) z2): the graph of a disc automorphism
    a = 0.9 * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
    c = np.exp(2j * np.pi * rng.random())
    return Z1 * (ONE - np.conj(a) * Z2) - c * (Z2 - a)


def test_criterion_10_boundary_sup():
    rng = np.random.default_rng(SEED + 10)
    worst = 0.0
    for _ in range(50):
        q = _toral_factor(rng)
        if rng.random() < 0.5:
            q = q * _toral_factor(rng)
        d = int(rng.integers(1, 4))
        f = BiPoly.from_array(rng.standard_normal((d + 1, d + 1))
                              + 1j * rng.standard_normal((d + 1, d + 1)))
        gap = boundary_sup_gap(f, q, 1024)["relative_gap"]
        worst = max(worst, gap)
    record(10, worst <= 2e-3, f"max relative gap {worst:.1e} over 50 pairs")
