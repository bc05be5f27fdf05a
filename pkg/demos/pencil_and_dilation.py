"""Walk through a Gamma-contraction: classify it, find its fundamental operator,
build the isometric dilation and check the model annihilation."""

import numpy as np

from symbidisc import numlin
from symbidisc.bipoly import BiPoly, classify_gamma, det_pencil
from symbidisc.cli_io import A_PENCIL
from symbidisc.dilation import apply_bipoly_band, build_TA_V0, build_toeplitz_model, verify_compression
from symbidisc.gamma_geom import classify_point
from symbidisc.pairs import OperatorPair, classify_pair, fundamental_operator, gamma_distinguished_certificate

Z1, Z2 = BiPoly.z1(), BiPoly.z2()

r = 0.5
pair = OperatorPair(2 * r * np.eye(2), r * r * np.eye(2))
print("classification:", classify_pair(pair).flags)
fr = fundamental_operator(pair)
print("fundamental operator:\n", np.round(fr.full(), 12))

dil = build_TA_V0(pair)
print("dilation residuals:", {k: f"{v:.1e}" for k, v in dil.residuals.items()})
print("compression error up to degree 8:", f"{verify_compression(dil, 8):.1e}")

model = build_toeplitz_model(0.8 * np.eye(2))
line = Z1 - 0.8 * Z2 - 0.8
print("line annihilates the model:", apply_bipoly_band(line, model.Tphi, model.Tz).norm_bound())
print("line is Gamma-distinguished:", classify_gamma(line, 512).gamma_distinguished)

print()
print("numerical radius of the pencil matrix:", numlin.numerical_radius(A_PENCIL))
print("spectrum:", np.round(np.linalg.eigvals(A_PENCIL), 12))
print("region of (1, 0):", classify_point((1, 0)).region.value)
q = det_pencil(A_PENCIL, "matrix_first")
band = build_toeplitz_model(A_PENCIL.conj().T)
print("det pencil annihilates its model:", f"{apply_bipoly_band(q, band.Tphi, band.Tz).norm_bound():.1e}")
cert = gamma_distinguished_certificate(OperatorPair(A_PENCIL, np.zeros((3, 3))))
print("certificate:", cert.certified, cert.route)
