"""
Two-beam interference of canonical-form states.

For electrons (beta = 0) the superposition psi = psi_1 + psi_2 gives

    psi psi~ = rho_1 + rho_2 + sqrt(rho_1 rho_2) (R_1 R_2~ + R_2 R_1~)

and the scalar part of R_1 R_2~ + R_1~ R_2 equals the scalar part of the
bracket above.  Everything here is computed with the exact algebra; the
textbook shortcuts are reported next to it for comparison.
"""
from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .algebra import (
    ONE, Multivector, G1, G2, G3, exp_even, parity_split, phase_rotor,
    random_rotor, reverse,
)
from .canonical import ROTOR_TOL, CanonicalForm, NotVersor, from_canonical, renormalize_versor, validate_rotor

DRIFT_TOL = 1e-8


@dataclass(frozen=True)
class BeamState:
    """A beam in canonical form plus a plane-wave phase offset.

    The phase enters as the right factor exp(-gamma_2 gamma_1 phase), the same
    sign as the plane-wave phase in :mod:`stawave.dirac`.  A beam with
    ``rho = 0`` is allowed and contributes nothing.
    """
    rho: float
    rotor: Multivector = ONE
    beta: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError("rho must be nonnegative")
        if self.rho > 0:
            self.canonical  # validates beta range and versor property
        elif not validate_rotor(self.rotor):
            raise NotVersor("rotor does not satisfy R reverse(R) = 1")

    @classmethod
    def from_canonical_form(cls, cf: CanonicalForm, phase: float = 0.0) -> "BeamState":
        return cls(cf.rho, cf.rotor, cf.beta, phase)

    @property
    def canonical(self) -> CanonicalForm:
        return CanonicalForm(self.rho, self.beta, self.rotor)

    def wavefunction(self) -> Multivector:
        if self.rho == 0:
            return Multivector()
        return from_canonical(self.canonical) * phase_rotor(self.phase)

    def with_rotor(self, R: Multivector) -> "BeamState":
        return replace(self, rotor=R)


def superpose(b1: BeamState, b2: BeamState) -> Multivector:
    return b1.wavefunction() + b2.wavefunction()


def _check_versor(R: Multivector, name: str) -> None:
    if not validate_rotor(R):
        raise NotVersor(f"{name} does not satisfy R reverse(R) = 1")


def cross_term(R1: Multivector, R2: Multivector, validate: bool = True) -> Multivector:
    """R1 R2~ + R1~ R2, computed exactly.

    Only its scalar part is the observable interference term.  ``validate``
    may be switched off to evaluate the expression on non-versors.
    """
    if validate:
        _check_versor(R1, "R1")
        _check_versor(R2, "R2")
    return R1 * reverse(R2) + reverse(R1) * R2


def intensity(psi: Multivector) -> float:
    """Scalar part of psi psi~."""
    return (psi * reverse(psi)).scalar_part


def intensity_pseudoscalar(psi: Multivector) -> float:
    """Pseudoscalar part of psi psi~ (nonzero only for mixed-beta superpositions)."""
    return (psi * reverse(psi)).pseudoscalar_part


@dataclass(frozen=True)
class CrossSplit:
    """Parity blocks of the cross term.

    even_even = E1 E2~ + E1~ E2 and odd_odd = O1 O2~ + O1~ O2; even_odd holds
    the mixed products.  The three add up to the cross term exactly.
    ``as_printed`` is E1 E2 - O1 O2, the shortcut without reversion marks.
    """
    total: Multivector
    even_even: Multivector
    odd_odd: Multivector
    even_odd: Multivector
    as_printed: Multivector


def split_cross_term(R1: Multivector, R2: Multivector, validate: bool = True) -> CrossSplit:
    total = cross_term(R1, R2, validate)
    E1, O1 = parity_split(R1)
    E2, O2 = parity_split(R2)
    ee = E1 * reverse(E2) + reverse(E1) * E2
    oo = O1 * reverse(O2) + reverse(O1) * O2
    eo = (E1 * reverse(O2) + reverse(E1) * O2) + (O1 * reverse(E2) + reverse(O1) * E2)
    return CrossSplit(total, ee, oo, eo, E1 * E2 - O1 * O2)


@dataclass
class InterferencePattern:
    """Intensity along a phase scan of beam 2.

    intensity = rho1 + rho2 + sqrt(rho1 rho2) cross_scalar, row by row.
    """
    rho1: float
    rho2: float
    phases: np.ndarray
    cross_scalar: np.ndarray
    even_even_scalar: np.ndarray
    odd_odd_scalar: np.ndarray
    even_odd_scalar: np.ndarray
    printed_scalar: np.ndarray
    odd_odd_grades: list = field(default_factory=list, repr=False)

    @property
    def amplitude(self) -> float:
        return math.sqrt(self.rho1 * self.rho2)

    @property
    def intensity(self) -> np.ndarray:
        return self.rho1 + self.rho2 + self.amplitude * self.cross_scalar

    @property
    def intensity_as_printed(self) -> np.ndarray:
        return self.rho1 + self.rho2 + self.amplitude * self.printed_scalar

    def visibility(self) -> float:
        hi, lo = self.intensity.max(), self.intensity.min()
        return (hi - lo) / (hi + lo)

    def to_csv(self) -> str:
        cols = [self.phases, self.intensity, self.cross_scalar, self.even_even_scalar,
                self.odd_odd_scalar, self.intensity_as_printed]
        buf = io.StringIO()
        buf.write("phase,intensity_exact,cross_scalar,even_even_scalar,odd_odd_scalar,intensity_as_printed\n")
        for row in zip(*cols):
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        return buf.getvalue()


def _fmt(v: float) -> str:
    v = float(v)
    if v == 0.0:
        v = 0.0  # drop the sign of negative zero
    return repr(v)


def _scan(rho1: float, rho2: float, R1: Multivector, R2: Multivector,
          phi_grid: Sequence[float], validate: bool) -> InterferencePattern:
    phases = np.asarray(phi_grid, dtype=float)
    n = len(phases)
    cols = {k: np.empty(n) for k in ("total", "ee", "oo", "eo", "pr")}
    oo_grades = []
    for j, phi in enumerate(phases):
        s = split_cross_term(R1, R2 * phase_rotor(phi), validate)
        cols["total"][j] = s.total.scalar_part
        cols["ee"][j] = s.even_even.scalar_part
        cols["oo"][j] = s.odd_odd.scalar_part
        cols["eo"][j] = s.even_odd.scalar_part
        cols["pr"][j] = s.as_printed.scalar_part
        oo_grades.append(sorted(s.odd_odd.grades(1e-14)))
    return InterferencePattern(rho1, rho2, phases, cols["total"], cols["ee"], cols["oo"],
                               cols["eo"], cols["pr"], oo_grades)


def pattern_even(rho1: float, rho2: float, phi_grid: Sequence[float]) -> InterferencePattern:
    """R1 = 1 against R2 = exp(-gamma_2 gamma_1 phi): intensity
    rho1 + rho2 + 2 sqrt(rho1 rho2) cos(phi)."""
    if not (rho1 > 0 and rho2 > 0):
        raise ValueError("densities must be positive")
    return _scan(rho1, rho2, ONE, ONE, phi_grid, True)


def pattern_mixed(R1: Multivector, R2: Multivector, phi_grid: Sequence[float],
                  rho1: float = 1.0, rho2: float = 1.0, validate: bool = True) -> InterferencePattern:
    """Phase scan for versors with even and odd parts.

    The scan factor multiplies R2 from the right.  The parity blocks of the
    cross term are returned alongside the exact total.  Two even versors
    are accepted; the odd/odd column is then zero.
    """
    return _scan(rho1, rho2, R1, R2, phi_grid, validate)


# -- regions ----------------------------------------------------------------------

@dataclass(frozen=True)
class RegionTransform:
    R: Multivector
    label: str

    def __post_init__(self):
        _check_versor(self.R, f"region {self.label!r}")


@dataclass
class DriftCounter:
    renormalizations: int = 0


DRIFT = DriftCounter()


def _checked(R: Multivector, label: str, counter: DriftCounter) -> Multivector:
    drift = (R * reverse(R) - ONE).max_norm()
    if drift > DRIFT_TOL:
        warnings.warn(f"versor drift {drift:.3g} after {label}; renormalizing",
                      RuntimeWarning, stacklevel=3)
        counter.renormalizations += 1
        return renormalize_versor(R)
    if drift > ROTOR_TOL:
        return renormalize_versor(R)
    return R


def region_sequence(b: BeamState, regions: Iterable[RegionTransform],
                    counter: DriftCounter = DRIFT) -> BeamState:
    """Pass a beam through regions in order: R -> R R_a R_b ...

    The region product R_a R_b ... is formed first and then applied, so
    orderings of commuting regions give bitwise identical beams.  If a
    versor drifts from R R~ = 1 by more than 1e-8 it is renormalized, a
    warning is issued and ``counter`` is incremented.  Smaller drift above
    the versor tolerance is renormalized silently.
    """
    regions = list(regions)
    if not regions:
        return b
    T = regions[0].R
    for reg in regions[1:]:
        T = _checked(T * reg.R, f"region {reg.label!r}", counter)
    return b.with_rotor(_checked(b.rotor * T, "applying the regions", counter))


def commutator_norm(Ra: Multivector, Rb: Multivector) -> float:
    return (Ra * Rb - Rb * Ra).max_norm()


def beam_pattern(reference: BeamState, probe: BeamState, phi_grid: Sequence[float]) -> InterferencePattern:
    """Scan the phase of ``probe`` against ``reference``."""
    return _scan(reference.rho, probe.rho, reference.rotor, probe.rotor, phi_grid, True)


def predicted_difference(reference: BeamState, incoming: BeamState, Ra: Multivector,
                         Rb: Multivector, phi_grid: Sequence[float]) -> np.ndarray:
    """Intensity(order a,b) - intensity(order b,a) from the commutator alone:
    2 sqrt(rho1 rho2) scalar(R1 P(phi)~ C~ R0~) with C = Ra Rb - Rb Ra."""
    C = Ra * Rb - Rb * Ra
    amp = 2.0 * math.sqrt(reference.rho * incoming.rho)
    base = reference.rotor
    return np.array([amp * (base * reverse(incoming.rotor * C * phase_rotor(phi))).scalar_part
                     for phi in phi_grid])


@dataclass
class RegionExperiment:
    """Both orderings of two regions applied to the probe beam."""
    labels_ab: list
    labels_ba: list
    commutator_norm: float
    pattern_ab: InterferencePattern
    pattern_ba: InterferencePattern
    predicted: np.ndarray

    @property
    def max_difference(self) -> float:
        return float(np.max(np.abs(self.pattern_ab.intensity - self.pattern_ba.intensity)))

    def records(self, file_ab: str, file_ba: str) -> list[dict]:
        return [
            {"order": self.labels_ab, "commutator_norm": self.commutator_norm, "pattern_file": file_ab},
            {"order": self.labels_ba, "commutator_norm": self.commutator_norm, "pattern_file": file_ba},
        ]


def region_experiment(reference: BeamState, incoming: BeamState, ra: RegionTransform,
                      rb: RegionTransform, phi_grid: Sequence[float],
                      counter: DriftCounter = DRIFT) -> RegionExperiment:
    ab = region_sequence(incoming, [ra, rb], counter)
    ba = region_sequence(incoming, [rb, ra], counter)
    return RegionExperiment(
        [ra.label, rb.label], [rb.label, ra.label], commutator_norm(ra.R, rb.R),
        beam_pattern(reference, ab, phi_grid), beam_pattern(reference, ba, phi_grid),
        predicted_difference(reference, incoming, ra.R, rb.R, phi_grid))


def plane_rotor(plane: Multivector, angle: float) -> Multivector:
    """exp(-plane * angle) for a unit bivector ``plane``."""
    return exp_even(-angle * plane)


SPATIAL_PLANES = {"e21": G2 * G1, "e31": G3 * G1, "e32": G3 * G2}


def rotor_family(rng: np.random.Generator, n: int = 100, same_plane_fraction: float = 1 / 3,
                 scale: float = 0.5):
    """Sample (R0, Ra, Rb) triples; about a third use one common plane for
    Ra and Rb so that they commute."""
    out = []
    for k in range(n):
        R0 = random_rotor(rng, scale)
        if rng.random() < same_plane_fraction:
            plane = list(SPATIAL_PLANES.values())[rng.integers(3)]
            Ra = plane_rotor(plane, rng.uniform(-math.pi, math.pi))
            Rb = plane_rotor(plane, rng.uniform(-math.pi, math.pi))
        else:
            Ra, Rb = random_rotor(rng, scale), random_rotor(rng, scale)
        out.append((R0, Ra, Rb))
    return out
