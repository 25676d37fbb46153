"""
Two-beam interference
=====================

Phase scans of two canonical-form beams.  The cross term
R1 R2~ + R1~ R2 carries the fringe; with odd parts in the rotors an extra
odd/odd block appears.
"""
import math

import numpy as np

from stawave.algebra import G0, G1, G2, G3, ONE, exp_even
from stawave.interference import cross_term, pattern_even, pattern_mixed, split_cross_term

phi = np.linspace(0, 2 * math.pi, 9)

# even rotors: rho1 + rho2 + 2 sqrt(rho1 rho2) cos(phi)
pat = pattern_even(2.0, 0.5, phi)
for a, b, c in zip(phi, pat.intensity, pat.intensity_as_printed):
    print(f"phi={a:5.3f}  exact {b:+.6f}   without the factor 2 {c:+.6f}")
print("visibility:", pat.visibility())

# an odd versor against an even one gives no scalar cross term
print("cross_term(1, g0) =", cross_term(ONE, G0).render())

# rotors with both parities: cos a + sin a T with T = g0 g1 g2
T = G0 * G1 * G2
R1 = math.cos(0.6) * ONE + math.sin(0.6) * T
R2 = (math.cos(0.3) * ONE + math.sin(0.3) * T) * exp_even(0.2 * (G3 * G0))
s = split_cross_term(R1, R2)
print("total     ", s.total.render())
print("even/even ", s.even_even.render())
print("odd/odd   ", s.odd_odd.render(), "  grades", sorted(s.odd_odd.grades()))
print("mixed     ", s.even_odd.render())
print("as printed", s.as_printed.render())

mixed = pattern_mixed(R1, R2, phi)
print(mixed.to_csv())
print("g1 g2 commutes with T:", ((G1 * G2) * T - T * (G1 * G2)).max_norm() == 0)
