"""Canonical form psi = (rho e^{I beta})^{1/2} R of even multivectors.

Also holds the quaternion / biquaternion description of the even subalgebra
and the left ideal generated by the idempotent (1 + gamma_0)/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import G0, G1, G2, G3, I, ONE, Multivector, N_BLADES, PSEUDOSCALAR, reverse

EPSILON_NULL = 1e-10
ROTOR_TOL = 1e-10


class NullState(ValueError):
    """psi * reverse(psi) vanishes (lightlike state); no canonical form."""


class NotEven(ValueError):
    """Input has odd-grade components where an even multivector is required."""


class NotVersor(ValueError):
    """R * reverse(R) differs from 1."""


def validate_rotor(R: Multivector, tol: float = ROTOR_TOL) -> bool:
    """True iff R * reverse(R) == 1 within ``tol`` (max coefficient norm).

    Odd versors such as gamma_0 pass as well as even rotors.
    """
    return (R * reverse(R)).allclose(ONE, tol)


def _require_even(psi: Multivector, tol: float = 0.0) -> None:
    if not psi.is_even(tol):
        raise NotEven(f"expected an even multivector, got grades {sorted(psi.grades())}")


def _iphase(angle: float) -> Multivector:
    """cos(angle) + I sin(angle)."""
    return math.cos(angle) * ONE + math.sin(angle) * I


@dataclass(frozen=True)
class CanonicalForm:
    """(rho, beta, R) with psi = sqrt(rho) (cos(beta/2) + I sin(beta/2)) R.

    beta = 0 describes an electron and beta = pi a positron.
    """
    rho: float
    beta: float
    rotor: Multivector

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        if not -math.pi < self.beta <= math.pi:
            raise ValueError(f"beta must lie in (-pi, pi], got {self.beta}")
        if not validate_rotor(self.rotor):
            raise NotVersor("rotor does not satisfy R reverse(R) = 1")

    def is_electron(self, tol: float = 1e-12) -> bool:
        return abs(self.beta) <= tol

    def is_positron(self, tol: float = 1e-12) -> bool:
        return abs(abs(self.beta) - math.pi) <= tol


def to_canonical(psi: Multivector, epsilon_null: float = EPSILON_NULL) -> CanonicalForm:
    """Decompose an even ``psi``.

    With psi * reverse(psi) = s + p I: rho = sqrt(s^2 + p^2),
    beta = atan2(p, s) and R = (rho e^{I beta})^{-1/2} psi.  The rotor is fixed
    only up to sign by the decomposition itself; the principal half-angle
    branch is used.
    """
    _require_even(psi)
    m = psi * reverse(psi)
    if m.max_norm() < epsilon_null:
        raise NullState("psi * reverse(psi) vanishes; lightlike states have no canonical form")
    s, p = m.scalar_part, m.pseudoscalar_part
    rho = math.hypot(s, p)
    beta = math.atan2(p, s)
    if beta <= -math.pi:
        beta += 2.0 * math.pi
    rotor = _iphase(-beta / 2.0) * psi / math.sqrt(rho)
    return CanonicalForm(rho, beta, rotor)


def from_canonical(cf: CanonicalForm) -> Multivector:
    return math.sqrt(cf.rho) * (_iphase(cf.beta / 2.0) * cf.rotor)


# -- quaternions --------------------------------------------------------------

# unit quaternions i, j, k realised by the spatial rotation planes
QUAT_BLADES = (G2 * G3, G3 * G1, G1 * G2)


@dataclass(frozen=True)
class Quaternion:
    w: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            a1, b1, c1, d1 = self.w, self.x, self.y, self.z
            a2, b2, c2, d2 = other.w, other.x, other.y, other.z
            return Quaternion(
                a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
                a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
                a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
                a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
            )
        if np.isscalar(other):
            return Quaternion(*(other * v for v in self.as_array()))
        return NotImplemented

    def __rmul__(self, other):
        if np.isscalar(other):
            return self * other
        return NotImplemented

    def __add__(self, other):
        return Quaternion(*(self.as_array() + other.as_array()))

    def __sub__(self, other):
        return Quaternion(*(self.as_array() - other.as_array()))

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def to_multivector(self) -> Multivector:
        return self.w * ONE + self.x * QUAT_BLADES[0] + self.y * QUAT_BLADES[1] + self.z * QUAT_BLADES[2]


@dataclass(frozen=True)
class Biquaternion:
    """q + I q' with I the unit pseudoscalar (central in the even subalgebra,
    I^2 = -1)."""
    re: Quaternion
    im: Quaternion

    def __mul__(self, other: "Biquaternion") -> "Biquaternion":
        return Biquaternion(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __add__(self, other: "Biquaternion") -> "Biquaternion":
        return Biquaternion(self.re + other.re, self.im + other.im)

    def to_multivector(self) -> Multivector:
        return self.re.to_multivector() + I * self.im.to_multivector()


def _even_basis_matrix() -> np.ndarray:
    """Columns: coefficients of 1, i, j, k, I, I i, I j, I k."""
    cols = [ONE, *QUAT_BLADES]
    cols = cols + [I * c for c in cols]
    return np.array([c.coeffs for c in cols]).T


_BQ_MATRIX = _even_basis_matrix()
# every column is +-1 on a single distinct even blade, so the inverse is the
# transpose restricted to the even blades
_BQ_INVERSE = _BQ_MATRIX.T


def biquaternion_view(psi: Multivector) -> Biquaternion:
    _require_even(psi)
    v = _BQ_INVERSE @ psi.coeffs
    return Biquaternion(Quaternion(*v[:4]), Quaternion(*v[4:]))


def from_biquaternion(b: Biquaternion) -> Multivector:
    return b.to_multivector()


# -- spinor ideal ---------------------------------------------------------------

IDEMPOTENT = 0.5 * (ONE + G0)
IDEMPOTENT_ID = "(1+e0)/2"
# right multiplication by gamma_2 gamma_1 commutes with the idempotent and
# squares to -1: it is the complex structure on the ideal
I_SURROGATE = G2 * G1


@dataclass(frozen=True)
class IdealElement:
    value: Multivector
    idempotent_id: str = IDEMPOTENT_ID

    def times_i(self) -> "IdealElement":
        """Multiplication by the imaginary unit, realised as right
        multiplication by gamma_2 gamma_1."""
        return IdealElement(self.value * I_SURROGATE, self.idempotent_id)


def ideal_project(psi: Multivector) -> IdealElement:
    """psi * (1 + gamma_0)/2, an element of the left ideal Cl(1,3) P."""
    return IdealElement(psi * IDEMPOTENT)


def ideal_dimension(tol: float = 1e-12) -> int:
    """Real dimension of the image of :func:`ideal_project` over all blades."""
    images = np.array([ideal_project(Multivector.blade(b)).value.coeffs for b in range(N_BLADES)])
    return int(np.linalg.matrix_rank(images, tol=tol))


def renormalize_versor(R: Multivector) -> Multivector:
    """R (R reverse(R))^{-1/2}, projecting a drifted versor back to norm 1.

    Only the scalar and pseudoscalar parts of R reverse(R) enter the root.
    """
    m = (R * reverse(R)).coeffs
    z = complex(m[0], m[PSEUDOSCALAR])
    w = z ** -0.5
    return R * (w.real * ONE + w.imag * I)
