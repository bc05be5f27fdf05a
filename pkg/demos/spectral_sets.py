"""Von Neumann checks on varieties: two falsifications, then a decomposition
of a Gamma-unitary along the factors of its annihilator."""

import numpy as np

from symbidisc.bipoly import BiPoly, compose_pi, eval_poly, sample_variety
from symbidisc.cli_io import COUNTER_T1, COUNTER_T2, counter_gamma_pair
from symbidisc.decomp import factor_decompose_unitary
from symbidisc.pairs import OperatorPair
from symbidisc.spectra_sets import boundary_sup_gap, vn_check

Z1, Z2 = BiPoly.z1(), BiPoly.z2()
ROYAL = 4 * Z2 - Z1 ** 2

rep = vn_check(OperatorPair(COUNTER_T1, COUNTER_T2), Z1 - Z2, (Z1 - Z2) ** 3, "BIDISC", 512)
print(f"cubed diagonal: |f(T)| = {rep.lhs:.3f}, sup on variety = {rep.sup_estimate:.1e}, {rep.verdict}")
pair, r = counter_gamma_pair()
rep = vn_check(pair, ROYAL, ROYAL ** 2, "GAMMA", 512)
print(f"squared royal:  |f(S,P)| = {rep.lhs:.3f}, sup on variety = {rep.sup_estimate:.1e}, {rep.verdict}")

gap = boundary_sup_gap(Z1 + 0.5 * Z2 ** 2, Z1 - Z2, 1024)
print("sup over variety vs its torus part:", gap)

# a Gamma-unitary with joint spectrum on two lines through bGamma
rng = np.random.default_rng(0)
lines = [Z1 - 0.3 * Z2 - 0.3, Z1 + 0.5 * Z2 + 0.5]
pts = []
for q, other, n in zip(lines, lines[::-1], (3, 2)):
    cand = sample_variety(compose_pi(q), "BIDISC", 64, torus=True)
    s, p = cand.sum(axis=1), cand.prod(axis=1)
    cand = cand[np.abs(eval_poly(other, s, p)) > 1e-6]  # drop points shared by both lines
    pts += list(cand[rng.choice(len(cand), n, replace=False)])
pts = np.array(pts)
U = np.linalg.qr(rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5)))[0]
S = U @ np.diag(pts.sum(axis=1)) @ U.conj().T
P = U @ np.diag(pts.prod(axis=1)) @ U.conj().T
res = factor_decompose_unitary(OperatorPair(S, P), lines)
print("block dimensions:", res.dims, " orthogonality:", f"{res.residuals['orthogonality']:.1e}")
