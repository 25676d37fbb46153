"""
Geometric Dirac equation: plane waves, the Coulomb problem and its spectrum.

The equation is used in the form

    (grad psi) gamma_2 gamma_1 = mu psi gamma_0 + V gamma_0 psi

with ``grad = gamma^mu d_mu`` and ``V`` the potential energy (``V = -Z alpha / r``
for the Coulomb field).  Units are hbar = c = 1; energies are reported as E/mu.

For a stationary state psi = phi exp(-gamma_2 gamma_1 E t), left
multiplication by gamma_0 splits phi into the parts commuting (q) and
anticommuting (q') with gamma_0, which obey two coupled first-order
equations.  Separating the angular dependence leaves the radial system
implemented in :func:`radial_rhs`, solved by :func:`shoot_eigenvalue`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import brentq

from .algebra import (
    G0, G1, G2, G3, METRIC, N_BLADES, Multivector, exp_bivector_array, gp,
    reverse,
)
from .canonical import validate_rotor
from .fields import Grid4, MultivectorField, dirac_d

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is optional
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

ALPHA_FS = 7.2973525693e-3
PHASE_BLADE = G2 * G1  # the "i sigma_3" of the plane-wave phase


class SupercriticalCoupling(ValueError):
    """Z alpha too large for a real square root in the spectrum."""


class NoBoundState(ValueError):
    """The matching function has no sign change in the energy bracket."""


class NodeCountMismatch(RuntimeError):
    def __init__(self, message: str, found_n_r: int):
        super().__init__(message)
        self.found_n_r = found_n_r


# -- plane waves ----------------------------------------------------------------

@dataclass(frozen=True)
class PlaneWaveParams:
    """Amplitude ``u`` (even, u u~ = 1), density ``rho``, contravariant momentum
    p^mu and mass ``mu``."""
    rho: float
    u: Multivector
    p: tuple[float, float, float, float]
    mu: float = 1.0

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        if not self.u.is_even(1e-14):
            raise ValueError("plane-wave amplitude must be even")
        if not validate_rotor(self.u):
            raise ValueError("plane-wave amplitude must satisfy u u~ = 1")
        if not self.p[0] > 0:
            raise ValueError("p^0 must be positive")
        object.__setattr__(self, "p", tuple(float(x) for x in self.p))

    @classmethod
    def boosted(cls, mu: float, rapidity: float, axis: int = 3, rho: float = 1.0) -> "PlaneWaveParams":
        """Rest solution boosted along ``axis``: u = exp(gamma_k gamma_0 theta/2)."""
        u = _exp_blade(GAMMA_K[axis] * G0, rapidity / 2.0)
        return cls(rho, u, on_shell_momentum(u, mu), mu)

    @property
    def momentum_vector(self) -> Multivector:
        return sum((self.p[m] * GAMMA4[m] for m in range(4)), Multivector())

    def mass_shell(self) -> float:
        """p.p - mu^2 (zero on shell)."""
        return sum(METRIC[m] * self.p[m] ** 2 for m in range(4)) - self.mu**2


GAMMA4 = (G0, G1, G2, G3)
GAMMA_K = {1: G1, 2: G2, 3: G3}


def _exp_blade(blade: Multivector, angle: float) -> Multivector:
    arr = exp_bivector_array((angle * blade).coeffs[None, :])[0]
    return Multivector(arr)


def on_shell_momentum(u: Multivector, mu: float) -> tuple[float, float, float, float]:
    """Momentum p = mu u gamma_0 u~ carried by amplitude ``u``."""
    p = mu * (u * G0 * reverse(u))
    return tuple(p[1 << m] for m in range(4))


def momentum_constraint(params: PlaneWaveParams) -> float:
    """max-norm of p u - mu u gamma_0."""
    return (params.momentum_vector * params.u - params.mu * params.u * G0).max_norm()


def plane_wave(params: PlaneWaveParams, grid: Grid4, phase: float = 0.0) -> MultivectorField:
    """psi(x) = sqrt(rho) u exp(-gamma_2 gamma_1 (p.x + phase))."""
    x = grid.coords()
    px = sum(METRIC[m] * params.p[m] * x[m] for m in range(4)) + phase
    px = np.broadcast_to(px, tuple(grid.extents))
    rot = exp_bivector_array(-px[..., None] * PHASE_BLADE.coeffs)
    vals = math.sqrt(params.rho) * gp(params.u.coeffs, rot)
    return MultivectorField(grid, vals)


def dirac_operator(psi: MultivectorField, mu: float,
                   potential: np.ndarray | None = None) -> MultivectorField:
    """(grad psi) gamma_2 gamma_1 - mu psi gamma_0 - V gamma_0 psi."""
    out = dirac_d(psi) * PHASE_BLADE - mu * (psi * G0)
    if potential is not None:
        V = np.broadcast_to(potential, tuple(psi.grid.extents))
        out = out - MultivectorField(psi.grid, V[..., None] * gp(G0.coeffs, psi.values))
    return out


def dirac_residual(psi: MultivectorField, mu: float,
                   potential: np.ndarray | None = None, margin: int = 1) -> float:
    """Max-norm of :func:`dirac_operator` over interior points.

    ``potential`` is the potential energy V on the grid (``None`` for a free
    particle); see :func:`coulomb_potential`.
    """
    res = dirac_operator(psi, mu, potential)
    if not np.all(np.isfinite(res.values)):
        raise FloatingPointError("non-finite values in the Dirac residual")
    return res.max_norm(interior=margin)


# -- Coulomb problem ------------------------------------------------------------

@dataclass(frozen=True)
class CoulombParams:
    Z: int = 1
    alpha: float = ALPHA_FS
    mu: float = 1.0

    def __post_init__(self):
        if int(self.Z) != self.Z or self.Z < 1:
            raise ValueError(f"Z must be a positive integer, got {self.Z}")
        if not (self.alpha > 0 and self.mu > 0):
            raise ValueError("alpha and mu must be positive")
        if self.Zalpha >= 1.0:
            raise SupercriticalCoupling(f"Z alpha = {self.Zalpha:.6g} >= 1")

    @property
    def Zalpha(self) -> float:
        return self.Z * self.alpha

    @property
    def bohr_radius(self) -> float:
        return 1.0 / (self.mu * self.Zalpha)


def coulomb_potential(grid: Grid4, params: CoulombParams, scale: float = 1.0) -> np.ndarray:
    """V = -scale Z alpha / r on the grid (r = spatial distance from the origin)."""
    _, x1, x2, x3 = grid.coords()
    r = np.sqrt(x1**2 + x2**2 + x3**2)
    with np.errstate(divide="ignore"):
        V = -scale * params.Zalpha / r
    return np.broadcast_to(V, tuple(grid.extents))


def sommerfeld_energy(n_r: int, l: int, Zalpha: float,
                      variant: Literal["printed", "corrected"] = "corrected") -> float:
    """Closed-form bound-state energy E/mu.

    ``corrected``: {1 + (Z alpha)^2 / (sqrt(l^2 - (Z alpha)^2) + n_r)^2}^{-1/2}.
    ``printed``:   {1 + (Z alpha)^2 / (sqrt(l^2 - (Z alpha)^2) + n_r^2)}^{-1/2},
    the same expression with the square misplaced.
    """
    if n_r < 0 or l < 1:
        raise ValueError("need n_r >= 0 and l >= 1")
    if Zalpha >= l:
        raise SupercriticalCoupling(f"Z alpha = {Zalpha:.6g} >= l = {l}")
    root = math.sqrt(l * l - Zalpha * Zalpha)
    if variant == "corrected":
        denom = (root + n_r) ** 2
    elif variant == "printed":
        denom = root + n_r**2
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return (1.0 + Zalpha**2 / denom) ** -0.5


def radial_rhs(r: float, G: float, F: float, E: float, kappa: int,
               params: CoulombParams) -> tuple[float, float]:
    """(dG/dr, dF/dr) for the radial Coulomb system, U = -Z alpha / r."""
    if r <= 0:
        raise ValueError("radial_rhs needs r > 0")
    U = -params.Zalpha / r
    dG = -kappa / r * G + (E + params.mu - U) * F
    dF = kappa / r * F - (E - params.mu - U) * G
    return dG, dF


@njit(cache=True)
def _rk4_log(t0, dt, n_steps, G0_, F0_, E, kappa, mu, za):
    """Classical RK4 in t = ln r for d(G,F)/dt = r * radial_rhs."""
    G = np.empty(n_steps + 1)
    F = np.empty(n_steps + 1)
    G[0] = G0_
    F[0] = F0_
    g = G0_
    f = F0_
    t = t0
    for k in range(n_steps):
        r1 = math.exp(t)
        r2 = math.exp(t + 0.5 * dt)
        r3 = math.exp(t + dt)
        a1 = -kappa * g + r1 * (E + mu) * f + za * f
        b1 = kappa * f - r1 * (E - mu) * g - za * g
        gg = g + 0.5 * dt * a1
        ff = f + 0.5 * dt * b1
        a2 = -kappa * gg + r2 * (E + mu) * ff + za * ff
        b2 = kappa * ff - r2 * (E - mu) * gg - za * gg
        gg = g + 0.5 * dt * a2
        ff = f + 0.5 * dt * b2
        a3 = -kappa * gg + r2 * (E + mu) * ff + za * ff
        b3 = kappa * ff - r2 * (E - mu) * gg - za * gg
        gg = g + dt * a3
        ff = f + dt * b3
        a4 = -kappa * gg + r3 * (E + mu) * ff + za * ff
        b4 = kappa * ff - r3 * (E - mu) * gg - za * gg
        g = g + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        f = f + dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        t = t + dt
        G[k + 1] = g
        F[k + 1] = f
        # rescale to keep the inward (growing) solution finite
        s = abs(g) + abs(f)
        if s > 1e200:
            for j in range(k + 2):
                G[j] /= s
                F[j] /= s
            g /= s
            f /= s
    return G, F


def integrate_radial(E: float, kappa: int, params: CoulombParams, r_start: float,
                     r_end: float, n_steps: int, y0: tuple[float, float]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """RK4 on a uniform grid in ln r from ``r_start`` to ``r_end`` (either
    direction).  Returns (r, G, F)."""
    t0, t1 = math.log(r_start), math.log(r_end)
    dt = (t1 - t0) / n_steps
    G, F = _rk4_log(t0, dt, int(n_steps), float(y0[0]), float(y0[1]), float(E),
                    float(kappa), float(params.mu), float(params.Zalpha))
    r = np.exp(t0 + dt * np.arange(n_steps + 1))
    return r, G, F


@dataclass
class RadialSolution:
    energy: float
    kappa: int
    n_r: int
    r_grid: np.ndarray = field(repr=False)
    G: np.ndarray = field(repr=False)
    F: np.ndarray = field(repr=False)
    mu: float = 1.0
    mismatch: float = 0.0

    @property
    def energy_over_mu(self) -> float:
        return self.energy / self.mu


def principal_number(kappa: int, n_r: int) -> int:
    return n_r + abs(kappa)


def expected_nodes(kappa: int, n_r: int) -> int:
    """Nodes of G: n_r for kappa < 0, n_r - 1 for kappa > 0 (where n_r >= 1)."""
    return n_r if kappa < 0 else n_r - 1


def count_nodes(G: np.ndarray, rel_tol: float = 1e-9) -> int:
    g = G[np.abs(G) > rel_tol * np.max(np.abs(G))]
    return int(np.count_nonzero(np.signbit(g[1:]) != np.signbit(g[:-1])))


@dataclass(frozen=True)
class ShootingGrid:
    """Log-spaced radial grid in units of the Bohr radius 1/(mu Z alpha)."""
    r_min: float = 1e-6
    r_max: float | None = None
    n_points: int = 4000

    def bounds(self, n: int) -> tuple[float, float, float]:
        r_max = self.r_max if self.r_max is not None else max(50.0, 3.0 * n * n + 10.0 * n)
        r_match = float(n * n)
        return self.r_min, r_match, r_max


class _Shooter:
    """Outward/inward RK4 solutions matched at r_match for one (kappa, grid)."""

    def __init__(self, params: CoulombParams, kappa: int, n: int, grid: ShootingGrid):
        if kappa == 0:
            raise ValueError("kappa must be nonzero")
        self.params = params
        self.kappa = int(kappa)
        a0 = params.bohr_radius
        r_min, r_match, r_max = grid.bounds(n)
        self.r_min, self.r_max = r_min * a0, r_max * a0
        t = np.linspace(math.log(self.r_min), math.log(self.r_max), grid.n_points)
        self.r = np.exp(t)
        self.i_match = int(np.argmin(np.abs(self.r - r_match * a0)))
        self.i_match = min(max(self.i_match, 2), grid.n_points - 3)
        self.gamma = math.sqrt(kappa * kappa - params.Zalpha**2)

    def solve(self, E: float):
        p = self.params
        za = p.Zalpha
        r0 = self.r[0]
        # regular solution near the origin: G, F ~ r^gamma with
        # F/G = (gamma + kappa) / (Z alpha)
        g0 = r0**self.gamma
        f0 = g0 * (self.gamma + self.kappa) / za
        n_out = self.i_match
        _, Go, Fo = integrate_radial(E, self.kappa, p, r0, self.r[self.i_match], n_out, (g0, f0))
        # decaying solution at large r: F/G -> -lambda / (mu + E)
        lam = math.sqrt(max(p.mu**2 - E**2, 0.0))
        rN = self.r[-1]
        n_in = len(self.r) - 1 - self.i_match
        gN = 1e-30
        fN = -gN * lam / (p.mu + E)
        _, Gi, Fi = integrate_radial(E, self.kappa, p, rN, self.r[self.i_match], n_in, (gN, fN))
        return Go, Fo, Gi[::-1], Fi[::-1]

    def mismatch(self, E: float) -> float:
        """sin of the angle between outward and inward (G, F) at r_match."""
        Go, Fo, Gi, Fi = self.solve(E)
        go, fo, gi, fi = Go[-1], Fo[-1], Gi[0], Fi[0]
        no, ni = math.hypot(go, fo), math.hypot(gi, fi)
        return (go / no) * (fi / ni) - (fo / no) * (gi / ni)

    def assemble(self, E: float) -> tuple[np.ndarray, np.ndarray]:
        Go, Fo, Gi, Fi = self.solve(E)
        # scale the inward branch to continue G at the matching point
        if abs(Gi[0]) > abs(Fi[0]):
            s = Go[-1] / Gi[0]
        else:
            s = Fo[-1] / Fi[0]
        G = np.concatenate([Go, s * Gi[1:]])
        F = np.concatenate([Fo, s * Fi[1:]])
        norm = math.sqrt(trapezoid(G * G + F * F, self.r))
        sign = 1.0 if G[np.argmax(np.abs(G) > 1e-9 * np.max(np.abs(G)))] >= 0 else -1.0
        return sign * G / norm, sign * F / norm


def energy_bracket(params: CoulombParams, kappa: int, n_r: int) -> tuple[float, float]:
    """Bracket from the nonrelativistic Bohr levels at n -+ 1/2.

    For the coupling strengths of interest the relativistic shift is far
    smaller than the gap to neighbouring levels, so the bracket holds only
    the level with principal number n = n_r + |kappa|.
    """
    n = principal_number(kappa, n_r)
    z2 = params.Zalpha**2
    lo = params.mu * (1.0 - z2 / (2.0 * (n - 0.5) ** 2))
    hi = params.mu * (1.0 - z2 / (2.0 * (n + 0.5) ** 2))
    return max(lo, 1e-6 * params.mu), hi


def shoot_eigenvalue(params: CoulombParams, kappa: int, n_r: int,
                     E_bracket: tuple[float, float] | None = None,
                     grid: ShootingGrid = ShootingGrid(),
                     rel_tol: float = 1e-10) -> RadialSolution:
    """Bound-state energy of the radial system by shooting and matching.

    Integrates outward from r_min with the r^gamma start and inward from
    r_max with exponential decay, then refines E with Brent's method on the
    normalized Wronskian at r_match until |dE|/mu < ``rel_tol``.
    """
    if n_r < 0:
        raise ValueError("n_r must be nonnegative")
    if params.Zalpha >= abs(kappa):
        raise SupercriticalCoupling(f"Z alpha = {params.Zalpha:.6g} >= |kappa| = {abs(kappa)}")
    shooter = _Shooter(params, kappa, principal_number(kappa, n_r), grid)
    lo, hi = E_bracket if E_bracket is not None else energy_bracket(params, kappa, n_r)
    if not 0 < lo < hi < params.mu:
        raise ValueError(f"energy bracket must lie in (0, mu): {(lo, hi)}")
    want = expected_nodes(kappa, n_r)
    has_root = shooter.mismatch(lo) * shooter.mismatch(hi) <= 0
    if E_bracket is not None and not has_root:
        raise NoBoundState(
            f"no sign change of the matching function in [{lo / params.mu:.12g}, "
            f"{hi / params.mu:.12g}] mu for kappa={kappa}, n_r={n_r}")
    brackets = [(lo, hi)] if has_root else []
    found = []
    tried_scan = E_bracket is not None
    while True:
        for a, b in brackets:
            E = brentq(shooter.mismatch, a, b, xtol=rel_tol * params.mu * 1e-2,
                       rtol=4 * np.finfo(float).eps, maxiter=200)
            G, F = shooter.assemble(E)
            nodes = count_nodes(G)
            if nodes == want:
                return RadialSolution(E, int(kappa), int(n_r), shooter.r, G, F, params.mu,
                                      shooter.mismatch(E))
            found.append((E / params.mu, nodes))
        if tried_scan:
            break
        # the Bohr bracket is reliable only at weak coupling; scan instead
        brackets = [br for br in _scan_brackets(shooter, params, kappa, n_r) if br != (lo, hi)]
        tried_scan = True
    if not found:
        raise NoBoundState(f"no sign change of the matching function for kappa={kappa}, n_r={n_r}")
    E_found, nodes = found[0]
    found_n_r = nodes if kappa < 0 else nodes + 1
    raise NodeCountMismatch(
        f"no level with {want} nodes of G for kappa={kappa}, n_r={n_r}; nearest root "
        f"E/mu = {E_found:.12g} has {nodes} nodes (n_r = {found_n_r})", found_n_r)


def _scan_brackets(shooter: "_Shooter", params: CoulombParams, kappa: int, n_r: int,
                   samples: int = 96) -> list[tuple[float, float]]:
    """Sign changes of the mismatch on a scan in an effective quantum number
    nu, with E(nu) = mu (1 + (Z alpha)^2 / nu^2)^{-1/2} increasing in nu.

    nu runs from n - |kappa| to n + 1, which covers every level that can carry
    principal number n for any coupling below |kappa|.
    """
    n = principal_number(kappa, n_r)
    za = params.Zalpha
    nu = np.linspace(max(n - abs(kappa), 0.0) + 1e-3, n + 1.0, samples)
    E = params.mu / np.sqrt(1.0 + za * za / (nu * nu))
    f = np.array([shooter.mismatch(e) for e in E])
    idx = np.flatnonzero(np.signbit(f[1:]) != np.signbit(f[:-1]))
    return [(float(E[i]), float(E[i + 1])) for i in idx]


def ground_state_radial(params: CoulombParams) -> tuple[float, Callable, Callable]:
    """Closed-form kappa = -1, n_r = 0 state: (E, G(r), F(r)), unnormalized.

    G = r^gamma e^{-lambda r}, F = -lambda/(mu + E) G with gamma = E/mu.
    """
    mu = params.mu
    gam = math.sqrt(1.0 - params.Zalpha**2)
    E = mu * gam
    lam = math.sqrt(mu * mu - E * E)
    c = -lam / (mu + E)

    def G(r):
        return r**gam * np.exp(-lam * r)

    def F(r):
        return c * G(r)

    return E, G, F


def s_state_field(grid: Grid4, energy: float, G: Callable, F: Callable) -> MultivectorField:
    """Space-time field of a kappa = -1 state from its radial functions.

    psi = (G/r - (F/r) sigma_r gamma_2 gamma_1) exp(-gamma_2 gamma_1 E t),
    with sigma_r the radial unit vector in the gamma_0 frame.
    """
    x0, x1, x2, x3 = grid.coords()
    shape = tuple(grid.extents)
    r = np.broadcast_to(np.sqrt(x1**2 + x2**2 + x3**2), shape)
    sig = [G1 * G0, G2 * G0, G3 * G0]
    sigma_r = sum(np.broadcast_to(x, shape)[..., None] / r[..., None] * s.coeffs
                  for x, s in zip((x1, x2, x3), sig))
    phi = np.zeros(shape + (N_BLADES,))
    phi[..., 0] = G(r) / r
    phi -= (F(r) / r)[..., None] * gp(sigma_r, PHASE_BLADE.coeffs)
    t = np.broadcast_to(x0, shape)
    phase = exp_bivector_array(-(energy * t)[..., None] * PHASE_BLADE.coeffs)
    return MultivectorField(grid, gp(phi, phase))


def nonrelativistic_energy(n: int, Zalpha: float) -> float:
    """1 - (Z alpha)^2 / (2 n^2), the Bohr level in units of mu (rest mass included)."""
    return 1.0 - Zalpha**2 / (2.0 * n * n)


@dataclass
class SpectrumRecord:
    Z: int
    alpha: float
    kappa: int
    n_r: int
    E_over_mu_printed: float | None
    E_over_mu_corrected: float | None
    E_over_mu_shooting: float | None
    residual: float | None
    error: str | None = None

    def as_dict(self) -> dict:
        d = {
            "Z": self.Z, "alpha": self.alpha, "kappa": self.kappa, "n_r": self.n_r,
            "E_over_mu_printed": self.E_over_mu_printed,
            "E_over_mu_corrected": self.E_over_mu_corrected,
            "E_over_mu_shooting": self.E_over_mu_shooting,
            "residual": self.residual,
        }
        if self.error is not None:
            d["error"] = self.error
        return d

    @property
    def relative_deviation(self) -> float | None:
        if self.E_over_mu_shooting is None or self.E_over_mu_corrected is None:
            return None
        return abs(self.E_over_mu_shooting - self.E_over_mu_corrected) / self.E_over_mu_corrected


def spectrum_record(params: CoulombParams, kappa: int, n_r: int,
                    grid: ShootingGrid = ShootingGrid()) -> SpectrumRecord:
    """Closed forms and shooting eigenvalue for one state.  Solver failures are
    recorded in ``error`` instead of raised."""
    l = abs(kappa)
    za = params.Zalpha
    printed = sommerfeld_energy(n_r, l, za, "printed")
    corrected = sommerfeld_energy(n_r, l, za, "corrected")
    try:
        sol = shoot_eigenvalue(params, kappa, n_r, grid=grid)
    except (NoBoundState, NodeCountMismatch) as exc:
        return SpectrumRecord(params.Z, params.alpha, kappa, n_r, printed, corrected, None, None,
                              error=f"{type(exc).__name__}: {exc}")
    return SpectrumRecord(params.Z, params.alpha, kappa, n_r, printed, corrected,
                          sol.energy_over_mu, abs(sol.mismatch))


def radial_csv(sol: RadialSolution) -> str:
    lines = ["r,G,F"]
    lines += [f"{r:.17g},{g:.17g},{f:.17g}" for r, g, f in zip(sol.r_grid, sol.G, sol.F)]
    return "\n".join(lines) + "\n"
