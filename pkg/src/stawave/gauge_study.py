"""Grid-refinement study of gauge covariance.

Smooth random fields psi, omega and a rotor field R are sampled on a small
patch around a fixed point.  The patch shrinks with h, so the interior
residuals ||Omega' - Omega R|| and ||F' - R~ F R|| expose the order of the
finite-difference error directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import GRADES, N_BLADES, exp_bivector_array, random_rotor
from .fields import (
    Grid4, MultivectorField, OneForm, covariant_derivative, curvature, gauge_transform,
)


@dataclass(frozen=True)
class SmoothFields:
    """Coefficients of psi, omega and the rotor generator as
    a_0 + sum_mu a_mu sin(k x^mu + c_mu)."""
    psi: np.ndarray      # (5, 16)
    omega: np.ndarray    # (4, 5, 16)
    bivector: np.ndarray  # (5, 16), grade 2 only
    k: float
    c: np.ndarray        # (4,)

    @classmethod
    def random(cls, rng: np.random.Generator, k: float = 1.3, scale: float = 0.5) -> "SmoothFields":
        biv = np.where(GRADES == 2, rng.normal(scale=scale, size=(5, N_BLADES)), 0.0)
        return cls(rng.normal(size=(5, N_BLADES)), rng.normal(scale=scale, size=(4, 5, N_BLADES)),
                   biv, k, rng.uniform(0, 2 * math.pi, size=4))

    def _eval(self, coef: np.ndarray, grid: Grid4) -> np.ndarray:
        x = grid.coords()
        out = np.broadcast_to(coef[0], tuple(grid.extents) + (N_BLADES,)).copy()
        for mu in range(4):
            out = out + np.sin(self.k * x[mu] + self.c[mu])[..., None] * coef[mu + 1]
        return out

    def sample(self, grid: Grid4) -> tuple[MultivectorField, OneForm, MultivectorField]:
        psi = MultivectorField(grid, self._eval(self.psi, grid))
        om = np.stack([self._eval(self.omega[m], grid) for m in range(4)], axis=-2)
        R = MultivectorField(grid, exp_bivector_array(self._eval(self.bivector, grid)))
        return psi, OneForm(grid, om), R


def covariance_residuals(psi: MultivectorField, omega: OneForm, R: MultivectorField,
                         margin: int = 2) -> tuple[float, float]:
    """(max |Omega' - Omega R|, max |F' - R~ F R|) over points ``margin`` away
    from the boundary."""
    psi2, omega2 = gauge_transform(psi, omega, R)
    om_res = covariant_derivative(psi2, omega2) - covariant_derivative(psi, omega) * R
    F = curvature(omega)
    f_res = curvature(omega2) - F.left_mul(R.reverse()) * R
    return om_res.max_norm(interior=margin), f_res.max_norm(interior=margin)


@dataclass
class GaugeStudy:
    spacings: list
    omega_residuals: list
    curvature_residuals: list
    constant_omega_residual: float
    constant_curvature_residual: float
    ratios_omega: list = field(default_factory=list)
    ratios_curvature: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "spacings": self.spacings,
            "omega_residuals": self.omega_residuals,
            "curvature_residuals": self.curvature_residuals,
            "omega_ratios": self.ratios_omega,
            "curvature_ratios": self.ratios_curvature,
            "constant_rotor_omega_residual": self.constant_omega_residual,
            "constant_rotor_curvature_residual": self.constant_curvature_residual,
        }

    def min_ratio(self) -> float:
        return min(self.ratios_omega + self.ratios_curvature)


def run_gauge_study(seed: int = 0, center: Sequence[float] = (0.2, -0.1, 0.3, 0.05),
                    n: int = 7, spacings: Sequence[float] = (0.1, 0.05, 0.025)) -> GaugeStudy:
    rng = np.random.default_rng(seed)
    fields = SmoothFields.random(rng)
    R_const = random_rotor(rng, 0.5)
    om_res, f_res = [], []
    for h in spacings:
        grid = Grid4.centered(center, n, h)
        a, b = covariance_residuals(*fields.sample(grid))
        om_res.append(a)
        f_res.append(b)
    grid = Grid4.centered(center, n, spacings[0])
    psi, omega, _ = fields.sample(grid)
    c_om, c_f = covariance_residuals(psi, omega, MultivectorField.constant(grid, R_const))
    return GaugeStudy(
        [float(h) for h in spacings], om_res, f_res, c_om, c_f,
        [om_res[i] / om_res[i + 1] for i in range(len(om_res) - 1)],
        [f_res[i] / f_res[i + 1] for i in range(len(f_res) - 1)],
    )
