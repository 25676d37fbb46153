"""
The geometric Dirac equation
============================

Plane waves checked by finite differences, then the hydrogen-like
spectrum by shooting, compared with the closed form.
"""
import math

from stawave.dirac import (
    CoulombParams, PlaneWaveParams, ShootingGrid, dirac_residual, plane_wave, shoot_eigenvalue,
    sommerfeld_energy,
)
from stawave.fields import Grid4

# a rest-frame solution boosted along z
wave = PlaneWaveParams.boosted(mu=1.0, rapidity=0.6, axis=3)
print("momentum:", wave.p, " p.p - mu^2 =", wave.mass_shell())

# the residual falls like h^2 for an on-shell wave
prev = None
for h in (0.2, 0.1, 0.05):
    r = dirac_residual(plane_wave(wave, Grid4.centered((0.1, -0.2, 0.3, 0.05), 9, h)), 1.0)
    print(f"h = {h:<5} residual = {r:.3e}" + (f"  order {math.log2(prev / r):.3f}" if prev else ""))
    prev = r

# scale the energy by 1.3: no longer a solution
off = PlaneWaveParams(1.0, wave.u, (1.3 * wave.p[0],) + wave.p[1:])
print("off-shell residual:", dirac_residual(plane_wave(off, Grid4.centered((0.1, -0.2, 0.3, 0.05), 9, 0.05)), 1.0))

# hydrogen-like levels, Z = 20
p = CoulombParams(Z=20)
print(f"Z alpha = {p.Zalpha:.6f}")
for kappa, n_r in [(-1, 0), (-1, 1), (1, 1), (-2, 0), (-2, 1)]:
    E = shoot_eigenvalue(p, kappa, n_r).energy_over_mu
    c = sommerfeld_energy(n_r, abs(kappa), p.Zalpha)
    t = sommerfeld_energy(n_r, abs(kappa), p.Zalpha, "printed")
    print(f"kappa={kappa:+d} n_r={n_r}  shooting {E:.15f}  closed form {c:.15f}  "
          f"misplaced square {t:.15f}")

# near Z alpha = 1 the r^gamma start needs a smaller inner radius
p = CoulombParams(Z=137)
for r_min in (1e-6, 1e-9, 1e-12):
    E = shoot_eigenvalue(p, -1, 1, grid=ShootingGrid(r_min=r_min)).energy_over_mu
    print(f"Z=137 r_min={r_min:g}: relative error {abs(E / sommerfeld_energy(1, 1, p.Zalpha) - 1):.1e}")
