"""Algebraic invariant suite run by ``stawave check``.

Each check takes a Cayley table (so a corrupted table can be injected) and a
numpy Generator, and returns a :class:`CheckResult`.  Reports contain no
timings, so equal seeds give byte-identical output.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import (
    GRADES, INVOLUTION_SIGN, METRIC, N_BLADES, REVERSE_SIGN, TABLE,
    CayleyTable, Multivector, blade_name, exp_even, random_multivector,
)
from .canonical import (
    NullState, biquaternion_view, from_canonical, ideal_dimension, ideal_project,
    to_canonical, validate_rotor,
)

N_SAMPLES = 1000
REL_TOL = 1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def _render(c: np.ndarray) -> str:
    return Multivector(c).render(precision=6)


def _random(rng: np.random.Generator, n: int, mask: np.ndarray | None = None) -> np.ndarray:
    a = rng.normal(size=(n, N_BLADES))
    if mask is not None:
        a = np.where(mask, a, 0.0)
    return a


def _worst(err: np.ndarray, scale: np.ndarray) -> tuple[int, float]:
    rel = err / np.maximum(scale, 1e-300)
    k = int(np.argmax(rel))
    return k, float(rel[k])


def check_anticommutation(table: CayleyTable, rng=None) -> CheckResult:
    """gamma_mu gamma_nu + gamma_nu gamma_mu = 2 g_mu_nu over all 16 ordered pairs."""
    for mu in range(4):
        for nu in range(4):
            a = np.zeros(N_BLADES); a[1 << mu] = 1.0
            b = np.zeros(N_BLADES); b[1 << nu] = 1.0
            s = table.product(a, b) + table.product(b, a)
            want = np.zeros(N_BLADES)
            if mu == nu:
                want[0] = 2.0 * METRIC[mu]
            if np.any(s != want):
                return CheckResult("anticommutation", False,
                                   f"e{mu}*e{nu} + e{nu}*e{mu} = {_render(s)}, expected {_render(want)}")
    return CheckResult("anticommutation", True, "16 generator pairs exact")


def check_associativity(table: CayleyTable, rng: np.random.Generator) -> CheckResult:
    a, b, c = (_random(rng, N_SAMPLES) for _ in range(3))
    left = table.product(table.product(a, b), c)
    right = table.product(a, table.product(b, c))
    err = np.max(np.abs(left - right), axis=1)
    scale = np.max(np.abs(left), axis=1) + np.max(np.abs(right), axis=1)
    k, rel = _worst(err, scale)
    ok = rel <= REL_TOL
    detail = f"{N_SAMPLES} random triples, max relative error {rel:.2e}"
    if not ok:
        detail += f"; counterexample (ab)c - a(bc) = {_render(left[k] - right[k])}"
    return CheckResult("associativity", ok, detail)


def check_reversion(table: CayleyTable, rng: np.random.Generator) -> CheckResult:
    a, b = _random(rng, N_SAMPLES), _random(rng, N_SAMPLES)
    left = table.product(a, b) * REVERSE_SIGN
    right = table.product(b * REVERSE_SIGN, a * REVERSE_SIGN)
    err = np.max(np.abs(left - right), axis=1)
    k, rel = _worst(err, np.max(np.abs(left), axis=1))
    ok = rel <= REL_TOL
    detail = f"reverse(ab) = reverse(b) reverse(a) on {N_SAMPLES} pairs, max relative error {rel:.2e}"
    if not ok:
        detail += f"; counterexample difference {_render(left[k] - right[k])}"
    return CheckResult("reversion anti-automorphism", ok, detail)


def check_involution(table: CayleyTable, rng: np.random.Generator) -> CheckResult:
    a, b = _random(rng, N_SAMPLES), _random(rng, N_SAMPLES)
    left = table.product(a, b) * INVOLUTION_SIGN
    right = table.product(a * INVOLUTION_SIGN, b * INVOLUTION_SIGN)
    err = np.max(np.abs(left - right), axis=1)
    k, rel = _worst(err, np.max(np.abs(left), axis=1))
    ok = rel <= REL_TOL
    detail = f"involute(ab) = involute(a) involute(b) on {N_SAMPLES} pairs, max relative error {rel:.2e}"
    if not ok:
        detail += f"; counterexample difference {_render(left[k] - right[k])}"
    return CheckResult("grade-involution automorphism", ok, detail)


def check_grading(table: CayleyTable, rng: np.random.Generator) -> CheckResult:
    """<a_r b_s>_k = 0 unless |r-s| <= k <= r+s and k = r+s mod 2."""
    for r in range(5):
        for s in range(5):
            a = _random(rng, 50, GRADES == r)
            b = _random(rng, 50, GRADES == s)
            p = table.product(a, b)
            allowed = (GRADES >= abs(r - s)) & (GRADES <= r + s) & ((GRADES - r - s) % 2 == 0)
            bad = np.abs(p[:, ~allowed])
            if bad.size and bad.max() > 0:
                j = int(np.argmax(bad.max(axis=0)))
                blade = np.flatnonzero(~allowed)[j]
                return CheckResult("grading constraint", False,
                                   f"grade {r} times grade {s} has a component on {blade_name(blade)}")
    return CheckResult("grading constraint", True, "all 25 grade pairs respect |r-s| <= k <= r+s, parity")


def check_rotor_exponential(table: CayleyTable, rng: np.random.Generator) -> CheckResult:
    worst = 0.0
    for _ in range(200):
        B = random_multivector(rng, [2])
        R = exp_even(B).coeffs
        rr = table.product(R, R * REVERSE_SIGN)
        rr[0] -= 1.0
        worst = max(worst, float(np.max(np.abs(rr))) / max(1.0, float(np.max(np.abs(R))) ** 2))
    ok = worst <= 1e-12
    return CheckResult("rotor exponential", ok, f"exp(B) reverse(exp(B)) = 1 on 200 bivectors, max relative error {worst:.2e}")


def check_canonical_roundtrip(table: CayleyTable, rng: np.random.Generator) -> CheckResult:
    worst, worst_rho, n = 0.0, 0.0, 0
    while n < N_SAMPLES:
        psi = random_multivector(rng, [0, 2, 4])
        m = table.product(psi.coeffs, psi.coeffs * REVERSE_SIGN)
        if math.hypot(m[0], m[15]) <= 1e-6:
            continue
        n += 1
        try:
            cf = to_canonical(psi)
        except NullState as exc:
            return CheckResult("canonical roundtrip", False, f"{psi.render(6)}: {exc}")
        back = from_canonical(cf)
        err = min((back - psi).max_norm(), (back + psi).max_norm()) / max(1.0, psi.max_norm())
        worst = max(worst, err)
        worst_rho = max(worst_rho, abs(cf.rho - math.hypot(m[0], m[15])) / cf.rho)
    ok = worst <= 1e-10 and worst_rho <= 1e-10
    return CheckResult("canonical roundtrip", ok,
                       f"{N_SAMPLES} even multivectors, reconstruction error {worst:.2e}, rho error {worst_rho:.2e}")


def check_biquaternion(table: CayleyTable, rng: np.random.Generator) -> CheckResult:
    worst = 0.0
    for _ in range(N_SAMPLES):
        a = random_multivector(rng, [0, 2, 4])
        b = random_multivector(rng, [0, 2, 4])
        direct = Multivector(table.product(a.coeffs, b.coeffs))
        via = (biquaternion_view(a) * biquaternion_view(b)).to_multivector()
        worst = max(worst, (direct - via).max_norm() / max(1.0, direct.max_norm()))
    ok = worst <= REL_TOL
    return CheckResult("biquaternion homomorphism", ok, f"{N_SAMPLES} pairs, max relative error {worst:.2e}")


def check_ideal(table: CayleyTable, rng: np.random.Generator) -> CheckResult:
    worst = 0.0
    for _ in range(200):
        a = random_multivector(rng)
        v = ideal_project(random_multivector(rng)).value
        w = Multivector(table.product(a.coeffs, v.coeffs))
        worst = max(worst, (ideal_project(w).value - w).max_norm() / max(1.0, w.max_norm()))
    dim = ideal_dimension()
    ok = worst <= REL_TOL and dim == 8
    return CheckResult("left ideal", ok, f"closure error {worst:.2e} on 200 samples, real dimension {dim}")


def check_versor_examples(table: CayleyTable, rng=None) -> CheckResult:
    g0, g1 = Multivector.blade(1), Multivector.blade(2)
    cases = [(Multivector.scalar(1.0), True), (exp_even(0.7 * Multivector.blade(0b1001)), True),
             (1.0 + g0 * g1, False), (g0, True)]
    for R, want in cases:
        if validate_rotor(R) != want:
            return CheckResult("versor validation", False, f"validate_rotor({R.render(6)}) != {want}")
    return CheckResult("versor validation", True, "1, boost, 1 + e01, e0 classified correctly")


CHECKS: list[Callable[[CayleyTable, np.random.Generator], CheckResult]] = [
    check_anticommutation, check_associativity, check_reversion, check_involution,
    check_grading, check_rotor_exponential, check_canonical_roundtrip, check_biquaternion,
    check_ideal, check_versor_examples,
]


def run_suite(seed: int = 0, table: CayleyTable = TABLE) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    return [check(table, rng) for check in CHECKS]
