"""
Spacetime algebra in a few lines
================================

Products of the four basis vectors, reversion, rotor exponentials and the
decomposition of an even multivector into density, angle and rotor.
"""
import math

import numpy as np

from stawave import G0, G1, G2, G3, I, exp_even, reverse
from stawave.algebra import random_multivector
from stawave.canonical import biquaternion_view, from_canonical, ideal_dimension, to_canonical

# signature (+, -, -, -)
for name, g in zip("0123", (G0, G1, G2, G3)):
    print(f"g{name} g{name} =", (g * g).render())

# distinct basis vectors anticommute, so their product is a new blade
print("g1 g2 =", (G1 * G2).render(), "   g2 g1 =", (G2 * G1).render())
print("I I =", (I * I).render())  # the unit pseudoscalar squares to -1

# reversion flips bivectors and trivectors
B = 0.3 * (G1 * G2) + 0.2 * (G3 * G0)
print("B  =", B.render())
print("B~ =", reverse(B).render())

# a spatial rotation and a boost, both with R R~ = 1
R = exp_even(-0.4 * (G2 * G1))
L = exp_even(0.25 * (G3 * G0))
print("rotation:", R.render())
print("boost:   ", L.render())
print("R R~ =", (R * reverse(R)).render(), "  L L~ =", (L * reverse(L)).render())

# canonical form psi = (rho e^{I beta})^{1/2} R
rng = np.random.default_rng(0)
psi = random_multivector(rng, [0, 2, 4])
cf = to_canonical(psi)
print(f"rho = {cf.rho:.6f}, beta = {cf.beta:.6f}")
print("reconstruction error:", (from_canonical(cf) - psi).max_norm())
print("electron?", cf.is_electron(), "  positron?", cf.is_positron())

# the even subalgebra is the biquaternions
b = biquaternion_view(psi)
print("real quaternion part:", b.re.to_multivector().render())
print("imaginary quaternion part:", b.im.to_multivector().render())

# spinors live in a minimal left ideal; its real dimension is 8
print("ideal dimension:", ideal_dimension())

# a pure pseudoscalar phase e^{I pi/4} has beta = pi/2; beta = pi is a positron
print("beta of e^{I pi/4}:", to_canonical(exp_even(math.pi / 4 * I)).beta)
print("beta of I:", to_canonical(I).beta, "  positron?", to_canonical(I).is_positron())
