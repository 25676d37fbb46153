"""
Fields on a grid and gauge covariance
=====================================

The vector derivative on a small 4-D grid, the covariant derivative with
a connection, and how both transform under a local rotor.
"""
import numpy as np

from stawave.algebra import G1
from stawave.fields import (
    Grid4, MultivectorField, covariant_derivative, curvature, dirac_d, div_curl_split,
    gauge_transform, pure_gauge,
)
from stawave.gauge_study import SmoothFields, covariance_residuals, run_gauge_study

grid = Grid4.centered((0.0, 0.0, 0.0, 0.0), 7, 0.1)
x0, x1, x2, x3 = grid.coords()

# d(x^1) = gamma^1 = -gamma_1
f = MultivectorField.from_scalar(grid, x1)
print("d x1 at the center:", dirac_d(f).at((3, 3, 3, 3)).render())

# the vector field x^1 gamma_1 has divergence +1 and no curl
v = MultivectorField.from_scalar(grid, x1, G1)
div, curl = div_curl_split(v)
print("div:", div.at((3, 3, 3, 3)).render(), "  curl:", curl.at((3, 3, 3, 3)).render())

# a random smooth psi, connection omega and local rotor R
rng = np.random.default_rng(1)
psi, omega, R = SmoothFields.random(rng).sample(grid)
Om = covariant_derivative(psi, omega)
F = curvature(omega)
print("max |Omega|:", Om.max_norm(interior=1), "  max |F|:", F.max_norm(interior=1))

# omega' = R~ omega R + R~ dR keeps Omega' = Omega R up to O(h^2)
psi2, omega2 = gauge_transform(psi, omega, R)
print("gauged |psi'|:", psi2.max_norm(), "  gauged |omega'|:", omega2.max_norm())
print("covariance residuals (Omega, F):", covariance_residuals(psi, omega, R))

# a pure gauge connection has no curvature
print("pure gauge curvature:", curvature(pure_gauge(R)).max_norm(interior=2))

# halving h shrinks the residuals by about four
study = run_gauge_study(seed=3)
print("spacings:", study.spacings)
print("Omega residuals:", study.omega_residuals, "ratios:", study.ratios_omega)
print("F residuals:", study.curvature_residuals, "ratios:", study.ratios_curvature)
