"""
Multivector fields on a uniform 4-grid and the structure equations.

Coordinates are contravariant, ``x^mu`` with ``mu = 0`` the time axis.  The
vector derivative is ``d = gamma^mu d_mu`` with the reciprocal frame
``gamma^mu = g^{mu mu} gamma_mu``.

The connection is a 1-form: one multivector ``omega_mu`` per direction.  With
that layout the covariant derivative ``Omega_mu = d_mu psi - psi omega_mu``
and the curvature ``F_{mu nu}`` transform covariantly under
``psi -> psi R``, ``omega_mu -> R~ omega_mu R + R~ d_mu R``.  A single
multivector-valued connection cannot be made covariant, because
``gamma^mu`` does not commute with ``psi``.

Derivatives use second-order central differences; on non-periodic grids the
boundary layer uses second-order one-sided stencils (``numpy.gradient`` with
``edge_order=2``).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .algebra import (
    GAMMA, METRIC, N_BLADES, TABLE, Multivector, blade_name, gp, max_norm,
    reverse_array,
)
from .canonical import NotVersor, ROTOR_TOL


class GridMismatch(ValueError):
    pass


class GridTooSmall(ValueError):
    pass


@dataclass(frozen=True)
class Grid4:
    """Uniform 4-grid: ``extents`` points per axis, spacing ``h_mu``."""
    extents: tuple[int, int, int, int]
    spacing: tuple[float, float, float, float]
    origin: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    periodic: bool = False

    def __post_init__(self):
        ext = tuple(int(n) for n in self.extents)
        sp = tuple(float(h) for h in self.spacing)
        org = tuple(float(o) for o in self.origin)
        if len(ext) != 4 or len(sp) != 4 or len(org) != 4:
            raise ValueError("Grid4 needs four extents, spacings and origins")
        if min(ext) < 3:
            raise GridTooSmall(f"need at least 3 points per axis, got {ext}")
        if min(sp) <= 0:
            raise ValueError(f"spacing must be positive, got {sp}")
        object.__setattr__(self, "extents", ext)
        object.__setattr__(self, "spacing", sp)
        object.__setattr__(self, "origin", org)

    @classmethod
    def centered(cls, center: Sequence[float], n: int, h: float | Sequence[float]) -> "Grid4":
        """n^4 grid of spacing h whose middle point is ``center`` (n odd)."""
        if n % 2 == 0:
            raise ValueError("centered grids need an odd number of points")
        hs = np.broadcast_to(np.asarray(h, dtype=float), (4,))
        origin = tuple(float(c - (n // 2) * hh) for c, hh in zip(center, hs))
        return cls((n,) * 4, tuple(hs), origin)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.extents

    @property
    def npoints(self) -> int:
        return int(np.prod(self.extents))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def volume(self) -> float:
        return self.cell_volume * self.npoints

    def axis(self, mu: int) -> np.ndarray:
        return self.origin[mu] + self.spacing[mu] * np.arange(self.extents[mu])

    def coords(self) -> tuple[np.ndarray, ...]:
        """Broadcastable coordinate arrays x^0..x^3 (sparse meshgrid)."""
        return tuple(np.meshgrid(*(self.axis(mu) for mu in range(4)), indexing="ij", sparse=True))

    def interior(self, margin: int = 1) -> tuple[slice, ...]:
        if self.periodic:
            return (slice(None),) * 4
        return tuple(slice(margin, n - margin) for n in self.extents)

    def refined(self) -> "Grid4":
        """Same domain, half the spacing."""
        if self.periodic:
            ext = tuple(2 * n for n in self.extents)
        else:
            ext = tuple(2 * n - 1 for n in self.extents)
        return Grid4(ext, tuple(h / 2 for h in self.spacing), self.origin, self.periodic)


def _check_same_grid(*grids: Grid4) -> None:
    g0 = grids[0]
    for g in grids[1:]:
        if g != g0:
            raise GridMismatch(f"fields live on different grids: {g0} vs {g}")


class _FieldBase:
    """Shared arithmetic for fields whose values end with a 16-blade axis."""

    components_shape: tuple[int, ...] = ()

    def __init__(self, grid: Grid4, values: np.ndarray):
        values = np.asarray(values, dtype=float)
        expected = tuple(grid.extents) + self.components_shape + (N_BLADES,)
        if values.shape != expected:
            raise ValueError(f"values shape {values.shape} != {expected}")
        values.setflags(write=False)
        self.grid = grid
        self.values = values

    def _new(self, values):
        return type(self)(self.grid, values)

    def _other_values(self, other):
        if isinstance(other, _FieldBase):
            _check_same_grid(self.grid, other.grid)
            return other.values
        return other

    def __add__(self, other):
        if isinstance(other, _FieldBase) and type(other) is not type(self):
            return NotImplemented
        return self._new(self.values + self._other_values(other))

    def __sub__(self, other):
        if isinstance(other, _FieldBase) and type(other) is not type(self):
            return NotImplemented
        return self._new(self.values - self._other_values(other))

    def __neg__(self):
        return self._new(-self.values)

    def __mul__(self, other):
        if np.isscalar(other):
            return self._new(self.values * other)
        if isinstance(other, Multivector):
            return self._new(gp(self.values, other.coeffs))
        if isinstance(other, MultivectorField):
            _check_same_grid(self.grid, other.grid)
            rhs = other.values.reshape(other.values.shape[:4] + (1,) * len(self.components_shape) + (N_BLADES,))
            return self._new(gp(self.values, rhs))
        return NotImplemented

    def __rmul__(self, other):
        if np.isscalar(other):
            return self._new(self.values * other)
        if isinstance(other, Multivector):
            return self._new(gp(other.coeffs, self.values))
        return NotImplemented

    def left_mul(self, other: "MultivectorField"):
        """Pointwise ``other * self``."""
        _check_same_grid(self.grid, other.grid)
        lhs = other.values.reshape(other.values.shape[:4] + (1,) * len(self.components_shape) + (N_BLADES,))
        return self._new(gp(lhs, self.values))

    def reverse(self):
        return self._new(reverse_array(self.values))

    def max_norm(self, interior: bool | int = False) -> float:
        v = self.values
        if interior:
            v = v[self.grid.interior(int(interior))]
        return max_norm(v)


class MultivectorField(_FieldBase):
    """One multivector per grid point; ``values`` has shape (*extents, 16)."""

    @classmethod
    def constant(cls, grid: Grid4, mv: Multivector) -> "MultivectorField":
        return cls(grid, np.broadcast_to(mv.coeffs, tuple(grid.extents) + (N_BLADES,)).copy())

    @classmethod
    def zeros(cls, grid: Grid4) -> "MultivectorField":
        return cls(grid, np.zeros(tuple(grid.extents) + (N_BLADES,)))

    @classmethod
    def from_function(cls, grid: Grid4, func: Callable) -> "MultivectorField":
        """``func(x0, x1, x2, x3)`` gets broadcastable coordinate arrays and
        returns an array of shape (..., 16)."""
        out = np.asarray(func(*grid.coords()), dtype=float)
        out = np.broadcast_to(out, tuple(grid.extents) + (N_BLADES,)).copy()
        return cls(grid, out)

    @classmethod
    def from_scalar(cls, grid: Grid4, values: np.ndarray, blade: Multivector | None = None) -> "MultivectorField":
        """values(x) * blade, with blade defaulting to 1."""
        blade = Multivector.scalar(1.0) if blade is None else blade
        values = np.broadcast_to(values, tuple(grid.extents))
        return cls(grid, values[..., None] * blade.coeffs)

    def at(self, index: Sequence[int]) -> Multivector:
        return Multivector(self.values[tuple(index)])

    def scalar_part(self) -> np.ndarray:
        return self.values[..., 0]

    def pseudoscalar_part(self) -> np.ndarray:
        return self.values[..., -1]


class OneForm(_FieldBase):
    """Components ``omega_mu`` per point; ``values`` has shape (*extents, 4, 16)."""

    components_shape = (4,)

    @classmethod
    def zeros(cls, grid: Grid4) -> "OneForm":
        return cls(grid, np.zeros(tuple(grid.extents) + (4, N_BLADES)))

    @classmethod
    def from_components(cls, comps: Sequence[MultivectorField]) -> "OneForm":
        _check_same_grid(*(c.grid for c in comps))
        return cls(comps[0].grid, np.stack([c.values for c in comps], axis=-2))

    @classmethod
    def constant(cls, grid: Grid4, comps: Sequence[Multivector]) -> "OneForm":
        arr = np.array([c.coeffs for c in comps])
        return cls(grid, np.broadcast_to(arr, tuple(grid.extents) + (4, N_BLADES)).copy())

    def component(self, mu: int) -> MultivectorField:
        return MultivectorField(self.grid, self.values[..., mu, :])

    def contract(self) -> MultivectorField:
        """sum_mu gamma^mu omega_mu, the form written as one multivector."""
        out = np.zeros(tuple(self.grid.extents) + (N_BLADES,))
        for mu in range(4):
            out += METRIC[mu] * gp(GAMMA[mu].coeffs, self.values[..., mu, :])
        return MultivectorField(self.grid, out)


class TwoForm(_FieldBase):
    """Antisymmetric components ``F_{mu nu}``; values (*extents, 4, 4, 16)."""

    components_shape = (4, 4)

    def component(self, mu: int, nu: int) -> MultivectorField:
        return MultivectorField(self.grid, self.values[..., mu, nu, :])

    def contract(self) -> MultivectorField:
        """sum_{mu<nu} gamma^mu gamma^nu F_{mu nu}."""
        out = np.zeros(tuple(self.grid.extents) + (N_BLADES,))
        for mu in range(4):
            for nu in range(mu + 1, 4):
                basis = METRIC[mu] * METRIC[nu] * (GAMMA[mu] * GAMMA[nu])
                out += gp(basis.coeffs, self.values[..., mu, nu, :])
        return MultivectorField(self.grid, out)


# -- differential operators ---------------------------------------------------

def partial(values: np.ndarray, grid: Grid4, mu: int) -> np.ndarray:
    """d/dx^mu of an array whose first four axes are the grid axes."""
    h = grid.spacing[mu]
    if grid.periodic:
        return (np.roll(values, -1, axis=mu) - np.roll(values, 1, axis=mu)) / (2.0 * h)
    return np.gradient(values, h, axis=mu, edge_order=2)


def gradient(f: MultivectorField) -> OneForm:
    """Components d_mu f."""
    return OneForm(f.grid, np.stack([partial(f.values, f.grid, mu) for mu in range(4)], axis=-2))


def dirac_d(f: MultivectorField) -> MultivectorField:
    """Vector derivative gamma^mu d_mu f (left multiplication)."""
    return gradient(f).contract()


def div_curl_split(f: MultivectorField) -> tuple[MultivectorField, MultivectorField]:
    """Grade-lowering and grade-raising parts of :func:`dirac_d`."""
    div = np.zeros(f.values.shape)
    curl = np.zeros(f.values.shape)
    for mu in range(4):
        dmu = partial(f.values, f.grid, mu)
        g = METRIC[mu] * GAMMA[mu].coeffs
        div += TABLE.product(g, dmu, "inner")
        curl += TABLE.product(g, dmu, "outer")
    return MultivectorField(f.grid, div), MultivectorField(f.grid, curl)


def covariant_derivative(psi: MultivectorField, omega: OneForm) -> OneForm:
    """Omega_mu = d_mu psi - psi omega_mu.

    ``.contract()`` on the result gives the multivector
    ``d psi - psi omega`` = sum_mu gamma^mu Omega_mu.
    """
    _check_same_grid(psi.grid, omega.grid)
    dpsi = gradient(psi).values
    return OneForm(psi.grid, dpsi - gp(psi.values[..., None, :], omega.values))


def _check_rotor_field(R: MultivectorField, tol: float) -> None:
    rr = gp(R.values, reverse_array(R.values))
    rr[..., 0] -= 1.0
    err = max_norm(rr)
    if err > tol:
        raise NotVersor(f"R reverse(R) deviates from 1 by {err:.3e}")


def gauge_transform(psi: MultivectorField, omega: OneForm, R: MultivectorField,
                    tol: float = ROTOR_TOL) -> tuple[MultivectorField, OneForm]:
    """psi' = psi R and omega'_mu = R~ omega_mu R + R~ d_mu R.

    With this law Omega' = Omega R and F' = R~ F R hold exactly in the
    continuum; on the grid they hold to second order in the spacing.
    """
    _check_same_grid(psi.grid, omega.grid, R.grid)
    _check_rotor_field(R, tol)
    Rt = reverse_array(R.values)[..., None, :]
    Rv = R.values[..., None, :]
    dR = gradient(R).values
    omega_new = gp(gp(Rt, omega.values), Rv) + gp(Rt, dR)
    return psi * R, OneForm(psi.grid, omega_new)


def pure_gauge(R: MultivectorField) -> OneForm:
    """omega_mu = R~ d_mu R, the connection gauge-equivalent to zero."""
    return OneForm(R.grid, gp(reverse_array(R.values)[..., None, :], gradient(R).values))


def curvature(omega: OneForm) -> TwoForm:
    """F_{mu nu} = d_mu omega_nu - d_nu omega_mu - (omega_nu omega_mu - omega_mu omega_nu).

    This is ``d omega - omega omega`` with the connection product taken in
    the order matching the right action ``psi omega``; pure-gauge
    connections are flat and F' = R~ F R.
    """
    g = omega.grid
    w = omega.values
    d = [partial(w, g, mu) for mu in range(4)]
    out = np.zeros(tuple(g.extents) + (4, 4, N_BLADES))
    for mu in range(4):
        for nu in range(mu + 1, 4):
            wm, wn = w[..., mu, :], w[..., nu, :]
            f = d[mu][..., nu, :] - d[nu][..., mu, :] + gp(wm, wn) - gp(wn, wm)
            out[..., mu, nu, :] = f
            out[..., nu, mu, :] = -f
    return TwoForm(g, out)


# -- action -------------------------------------------------------------------

@dataclass(frozen=True)
class ActionValue:
    total: float
    omega_term: float
    curvature_term: float
    norm: float
    # pseudoscalar parts, reported for diagnostics only
    omega_pseudo: float = 0.0
    norm_pseudo: float = 0.0


def _quadratic(values: np.ndarray) -> np.ndarray:
    """Coefficients of X reverse(X) per point."""
    return gp(values, reverse_array(values))


def curvature_density(F: TwoForm) -> np.ndarray:
    """sum_{mu<nu} g^{mu mu} g^{nu nu} <F_{mu nu} F_{mu nu}~>_0 per point."""
    out = np.zeros(tuple(F.grid.extents))
    for mu in range(4):
        for nu in range(mu + 1, 4):
            f = F.values[..., mu, nu, :]
            out += METRIC[mu] * METRIC[nu] * _quadratic(f)[..., 0]
    return out


def action(psi: MultivectorField, omega: OneForm) -> ActionValue:
    """Rectangle-rule integrals of <Omega Omega~>_0, the curvature invariant and
    <psi psi~>_0.

    Omega is the contracted covariant derivative.  The curvature term uses
    the component contraction F_{mu nu} F^{mu nu}, which is invariant under
    F -> R~ F R point by point.
    """
    _check_same_grid(psi.grid, omega.grid)
    dv = psi.grid.cell_volume
    Om = covariant_derivative(psi, omega).contract()
    q_om = _quadratic(Om.values)
    q_psi = _quadratic(psi.values)
    F = curvature(omega)
    omega_term = float(q_om[..., 0].sum() * dv)
    curv_term = float(curvature_density(F).sum() * dv)
    return ActionValue(
        total=omega_term + curv_term,
        omega_term=omega_term,
        curvature_term=curv_term,
        norm=float(q_psi[..., 0].sum() * dv),
        omega_pseudo=float(q_om[..., -1].sum() * dv),
        norm_pseudo=float(q_psi[..., -1].sum() * dv),
    )


class IndefiniteNorm(ValueError):
    pass


def norm(psi: MultivectorField) -> float:
    return float(_quadratic(psi.values)[..., 0].sum() * psi.grid.cell_volume)


def normalize(psi: MultivectorField) -> MultivectorField:
    """Rescale so that the integral of <psi psi~>_0 is 1."""
    n = norm(psi)
    if not n > 0:
        raise IndefiniteNorm(f"integral of <psi psi~>_0 is {n:.6g}; cannot normalize")
    return psi * (1.0 / np.sqrt(n))


# -- serialization ------------------------------------------------------------

FIELD_FORMAT = "stawave-field"
FIELD_FORMAT_VERSION = 1
HEADER_BYTES = 96
_KINDS = {1: "multivector", 4: "one_form"}


def write_field(path: str | Path, f: MultivectorField | OneForm) -> tuple[Path, Path]:
    """Write ``<path>.bin`` and the JSON sidecar ``<path>.json``.

    Binary layout (little-endian): 4 x int64 extents, 4 x float64 spacing,
    4 x float64 origin, then float64 coefficients, 16 per multivector in blade
    order, points in C order (x^0 slowest); a 1-form stores its four
    components consecutively per point.
    """
    path = Path(path)
    bin_path = path.with_suffix(".bin")
    json_path = path.with_suffix(".json")
    g = f.grid
    comps = 4 if isinstance(f, OneForm) else 1
    header = (np.array(g.extents, dtype="<i8").tobytes()
              + np.array(g.spacing, dtype="<f8").tobytes()
              + np.array(g.origin, dtype="<f8").tobytes())
    assert len(header) == HEADER_BYTES
    bin_path.write_bytes(header + np.ascontiguousarray(f.values, dtype="<f8").tobytes())
    sidecar = {
        "format": FIELD_FORMAT,
        "version": FIELD_FORMAT_VERSION,
        "kind": _KINDS[comps],
        "components": comps,
        "data_file": bin_path.name,
        "header_bytes": HEADER_BYTES,
        "header_layout": ["extents:4xint64", "spacing:4xfloat64", "origin:4xfloat64"],
        "dtype": "<f8",
        "point_order": "C, x0 slowest",
        "blade_order": [blade_name(b) for b in range(N_BLADES)],
        "extents": list(g.extents),
        "spacing": list(g.spacing),
        "origin": list(g.origin),
        "periodic": g.periodic,
    }
    json_path.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return bin_path, json_path


def read_field(path: str | Path) -> MultivectorField | OneForm:
    """Read a field written by :func:`write_field` (either file of the pair)."""
    path = Path(path)
    json_path = path.with_suffix(".json")
    meta = json.loads(json_path.read_text()) if json_path.exists() else {}
    raw = path.with_suffix(".bin").read_bytes()
    if len(raw) < HEADER_BYTES:
        raise ValueError("field file shorter than its header")
    extents = tuple(int(n) for n in np.frombuffer(raw[:32], dtype="<i8"))
    spacing = tuple(float(h) for h in np.frombuffer(raw[32:64], dtype="<f8"))
    origin = tuple(float(o) for o in np.frombuffer(raw[64:96], dtype="<f8"))
    body = np.frombuffer(raw[HEADER_BYTES:], dtype="<f8")
    npts = int(np.prod(extents))
    comps, rem = divmod(body.size, npts * N_BLADES)
    if rem or comps not in _KINDS:
        raise ValueError(f"body of {body.size} doubles does not match extents {extents}")
    if meta and meta.get("components", comps) != comps:
        raise ValueError("sidecar component count disagrees with the binary body")
    grid = Grid4(extents, spacing, origin, bool(meta.get("periodic", False)))
    if comps == 1:
        return MultivectorField(grid, body.reshape(extents + (N_BLADES,)).copy())
    return OneForm(grid, body.reshape(extents + (4, N_BLADES)).copy())
