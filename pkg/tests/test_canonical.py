import math

import pytest

from stawave.algebra import G0, G1, G2, G3, I, ONE, exp_even, random_multivector, reverse
from stawave.canonical import (
    IDEMPOTENT, QUAT_BLADES, Biquaternion, CanonicalForm, NotEven, NotVersor, NullState, Quaternion,
    biquaternion_view, from_biquaternion, from_canonical, ideal_dimension, ideal_project,
    renormalize_versor, to_canonical, validate_rotor,
)
from oracles import from_matrix, to_matrix


def test_scalar_state():
    cf = to_canonical(2 * ONE)
    assert cf.rho == pytest.approx(4.0)
    assert cf.beta == 0.0
    assert cf.rotor.allclose(ONE, 1e-15)
    assert cf.is_electron()


def test_pseudoscalar_state_is_positron():
    cf = to_canonical(I)
    assert cf.rho == pytest.approx(1.0)
    assert cf.beta == pytest.approx(math.pi)
    assert cf.rotor.allclose(ONE, 1e-12)
    assert cf.is_positron(1e-12)


def test_rotor_state_roundtrip(rng):
    for _ in range(20):
        rho, phi = rng.uniform(0.1, 5), rng.uniform(-3, 3)
        R = exp_even(-phi * (G2 * G1))
        cf = to_canonical(math.sqrt(rho) * R)
        assert cf.rho == pytest.approx(rho, rel=1e-12)
        assert abs(cf.beta) < 1e-12
        assert cf.rotor.allclose(R, 1e-12) or cf.rotor.allclose(-R, 1e-12)


def test_from_canonical_examples():
    assert from_canonical(CanonicalForm(1.0, 0.0, ONE)) == ONE
    assert from_canonical(CanonicalForm(4.0, 0.0, ONE)).allclose(2 * ONE, 1e-15)
    assert from_canonical(CanonicalForm(1.0, math.pi, ONE)).allclose(I, 1e-15)


def test_canonical_rejects_bad_input():
    with pytest.raises(NotEven):
        to_canonical(ONE + G0)
    with pytest.raises(NullState):
        to_canonical(ONE + G0 * G1)  # lightlike: (1 + e01)(1 - e01) = 0
    with pytest.raises(ValueError):
        CanonicalForm(0.0, 0.0, ONE)
    with pytest.raises(ValueError):
        CanonicalForm(1.0, -math.pi, ONE)
    with pytest.raises(NotVersor):
        CanonicalForm(1.0, 0.0, 2 * ONE)


def test_rho_beta_match_independent_product(rng):
    # psi psi~ from the matrix representation, not the Cayley table
    for _ in range(50):
        psi = random_multivector(rng, [0, 2, 4])
        m = from_matrix(to_matrix(psi.coeffs) @ to_matrix(reverse(psi).coeffs))
        cf = to_canonical(psi)
        assert cf.rho == pytest.approx(math.hypot(m[0], m[15]), rel=1e-12)
        assert cf.beta == pytest.approx(math.atan2(m[15], m[0]), abs=1e-12)


def test_validate_rotor_examples():
    assert validate_rotor(ONE)
    assert validate_rotor(exp_even(0.7 * (G3 * G0)))
    assert not validate_rotor(ONE + G0 * G1)
    assert validate_rotor(G0)


def test_quaternion_units_follow_hamilton():
    i, j, k = (Quaternion(0, 1, 0, 0), Quaternion(0, 0, 1, 0), Quaternion(0, 0, 0, 1))
    assert i * j == k and j * k == i and k * i == j
    qi, qj, qk = QUAT_BLADES
    assert qi * qj == qk
    assert qi * qi == -ONE


def test_quaternion_embedding_is_homomorphism(rng):
    for _ in range(20):
        a, b = Quaternion(*rng.normal(size=4)), Quaternion(*rng.normal(size=4))
        assert (a * b).to_multivector().allclose(a.to_multivector() * b.to_multivector(), 1e-12)


def test_biquaternion_examples():
    b = biquaternion_view(ONE)
    assert b.re == Quaternion(1.0) and b.im == Quaternion(0.0)
    b = biquaternion_view(I)
    assert b.re == Quaternion(0.0) and b.im == Quaternion(1.0)


def test_biquaternion_bijection_and_homomorphism(rng):
    for _ in range(200):
        a = random_multivector(rng, [0, 2, 4])
        b = random_multivector(rng, [0, 2, 4])
        assert from_biquaternion(biquaternion_view(a)).allclose(a, 1e-14)
        prod = (biquaternion_view(a) * biquaternion_view(b)).to_multivector()
        assert prod.allclose(a * b, 1e-12)
    with pytest.raises(NotEven):
        biquaternion_view(G0)
    assert isinstance(biquaternion_view(ONE) + biquaternion_view(I), Biquaternion)


def test_idempotent():
    assert (IDEMPOTENT * IDEMPOTENT).allclose(IDEMPOTENT, 1e-15)
    assert ideal_project(IDEMPOTENT).value.allclose(IDEMPOTENT, 1e-15)
    assert ideal_project(ONE).value.allclose(IDEMPOTENT, 1e-15)


def test_ideal_closure(rng):
    for _ in range(50):
        a, psi = random_multivector(rng), random_multivector(rng)
        v = a * ideal_project(psi).value
        assert ideal_project(v).value.allclose(v, 1e-12)


def test_ideal_dimension_is_eight():
    # Cl(1,3) is the algebra of 2x2 quaternion matrices; a minimal left ideal
    # is a quaternion column, 8 real dimensions (4 complex)
    assert ideal_dimension() == 8


def test_complex_structure_on_ideal(rng):
    v = ideal_project(random_multivector(rng))
    assert v.times_i().times_i().value.allclose(-v.value, 1e-12)
    w = v.times_i().value
    assert ideal_project(w).value.allclose(w, 1e-12)


def test_printed_four_factor_projector_is_not_idempotent():
    # (1 + e0)(1 + e21)/4 taken literally as an algebra element
    P = 0.25 * (ONE + G0) * (ONE + G2 * G1)
    assert not (P * P).allclose(P, 1e-6)


def test_renormalize_versor(rng):
    R = exp_even(random_multivector(rng, [2], 0.5))
    drifted = 1.001 * R + 1e-4 * I * R
    fixed = renormalize_versor(drifted)
    assert validate_rotor(fixed, 1e-13)
    odd = renormalize_versor(1.01 * G0)
    assert odd.allclose(G0, 1e-14)
