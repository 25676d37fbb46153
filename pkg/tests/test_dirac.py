import math

import numpy as np
import pytest

from stawave.algebra import G0, G3, ONE, Multivector, exp_even, gp, reverse, reverse_array
from stawave.dirac import (
    ALPHA_FS, CoulombParams, NoBoundState, NodeCountMismatch, PlaneWaveParams, ShootingGrid,
    SupercriticalCoupling, coulomb_potential, count_nodes, dirac_residual, ground_state_radial,
    integrate_radial, momentum_constraint, nonrelativistic_energy, on_shell_momentum, plane_wave,
    radial_csv, radial_rhs, s_state_field, shoot_eigenvalue, sommerfeld_energy, spectrum_record,
)
from stawave.fields import Grid4, MultivectorField
from oracles import dirac_ground_state_energy, integrate_radial_ivp, sommerfeld_mp

ZA1 = ALPHA_FS


# -- closed forms ---------------------------------------------------------------

def test_sommerfeld_hydrogen_ground_state():
    E = sommerfeld_energy(0, 1, ZA1)
    assert E == pytest.approx(0.999973374, abs=5e-10)
    assert E == pytest.approx(dirac_ground_state_energy(ZA1), rel=1e-15)


@pytest.mark.parametrize("n_r", [0, 1, 2, 3])
@pytest.mark.parametrize("l", [1, 2, 3])
@pytest.mark.parametrize("za", [ZA1, 20 * ZA1, 0.9])
def test_corrected_matches_mpmath(n_r, l, za):
    assert sommerfeld_energy(n_r, l, za) == pytest.approx(sommerfeld_mp(n_r, l, za), rel=1e-14)


def test_printed_variant_differs_even_at_zero_nr():
    # at n_r = 0 the printed braces hold sqrt(l^2 - za^2), not its square,
    # so the two variants only agree in the limit za -> 0
    za = 20 * ZA1
    printed, corrected = sommerfeld_energy(0, 1, za, "printed"), sommerfeld_energy(0, 1, za, "corrected")
    assert corrected == pytest.approx(math.sqrt(1 - za * za), rel=1e-15)
    assert abs(printed - corrected) > 1e-4
    assert printed == pytest.approx((1 + za * za / math.sqrt(1 - za * za)) ** -0.5, rel=1e-15)
    assert sommerfeld_energy(1, 1, ZA1, "printed") != pytest.approx(sommerfeld_energy(1, 1, ZA1), rel=1e-8)


def test_zero_coupling_limit():
    for variant in ("printed", "corrected"):
        assert sommerfeld_energy(2, 1, 1e-12, variant) == pytest.approx(1.0, abs=1e-15)


def test_sommerfeld_errors():
    with pytest.raises(SupercriticalCoupling):
        sommerfeld_energy(0, 1, 1.0)
    with pytest.raises(ValueError):
        sommerfeld_energy(-1, 1, 0.1)
    with pytest.raises(ValueError):
        sommerfeld_energy(0, 1, 0.1, "typo")
    with pytest.raises(SupercriticalCoupling):
        CoulombParams(Z=138)
    with pytest.raises(ValueError):
        CoulombParams(Z=0)


def test_nonrelativistic_limit():
    for n_r, l in [(0, 1), (1, 1), (2, 2)]:
        n = n_r + l
        ratios = []
        for za in (1e-2, 5e-3, 2.5e-3):
            diff = sommerfeld_energy(n_r, l, za) - nonrelativistic_energy(n, za)
            ratios.append(diff / za**4)
        # the O(za^4) coefficient settles to a constant
        assert abs(ratios[-1] - ratios[-2]) < 1e-3 * abs(ratios[-1]) + 1e-6
        assert abs(ratios[-1]) < 1.0


# -- radial system --------------------------------------------------------------

def test_radial_rhs_examples():
    p = CoulombParams(1)
    with pytest.raises(ValueError):
        radial_rhs(0.0, 1.0, 0.0, 1.0, -1, p)
    # kappa -> -kappa flips the centrifugal terms only
    a = radial_rhs(2.0, 0.3, 0.1, 0.9, -1, p)
    b = radial_rhs(2.0, 0.3, 0.1, 0.9, 1, p)
    assert a[0] - b[0] == pytest.approx(2 * 0.3 / 2.0)
    assert a[1] - b[1] == pytest.approx(-2 * 0.1 / 2.0)
    # free-ish limit at large r stays finite
    dG, dF = radial_rhs(1e8, 1e8, 0.0, 1.0, -1, p)
    assert dG == pytest.approx(1.0) and math.isfinite(dF)


@pytest.mark.parametrize("kappa", [-2, -1, 1, 2])
def test_indicial_exponent(kappa):
    # G = r^g, F = c r^g with c = (g + kappa)/za: r * derivative / value -> g
    p = CoulombParams(20)
    za = p.Zalpha
    g = math.sqrt(kappa * kappa - za * za)
    c = (g + kappa) / za
    for r in (1e-9, 1e-11):
        G, F = r**g, c * r**g
        dG, dF = radial_rhs(r, G, F, 0.95, kappa, p)
        assert r * dG / G == pytest.approx(g, rel=1e-6)
        assert r * dF / F == pytest.approx(g, rel=1e-6)


def test_rk4_matches_adaptive_reference_at_fourth_order():
    p = CoulombParams(20)
    E, kappa = 0.97, -1
    r0, r1 = 1e-3, 5.0
    y0 = (1.0, -0.2)
    errs = []
    for n in (200, 400):
        r, G, F = integrate_radial(E, kappa, p, r0, r1, n, y0)
        ref = integrate_radial_ivp(E, kappa, p.Zalpha, p.mu, r0, r1, y0, [r1])
        errs.append(max(abs(G[-1] - ref[0, 0]), abs(F[-1] - ref[1, 0])))
    order = math.log2(errs[0] / errs[1])
    assert 3.7 < order < 4.3


def test_integrate_inward():
    p = CoulombParams(1)
    r, G, F = integrate_radial(0.99, -1, p, 10.0, 1.0, 100, (1.0, 0.0))
    assert r[0] == pytest.approx(10.0) and r[-1] == pytest.approx(1.0)
    ref = integrate_radial_ivp(0.99, -1, p.Zalpha, 1.0, 10.0, 1.0, (1.0, 0.0), [1.0])
    assert G[-1] == pytest.approx(ref[0, 0], rel=1e-6)


def test_count_nodes():
    r = np.linspace(0.1, 10, 500)
    assert count_nodes(np.exp(-r)) == 0
    assert count_nodes((r - 3) * np.exp(-r)) == 1
    # tiny tail noise is ignored
    assert count_nodes(np.where(r > 9, 1e-20 * np.sin(50 * r), np.exp(-r))) == 0


# -- shooting -------------------------------------------------------------------

@pytest.mark.parametrize("Z", [1, 20])
def test_ground_state_by_shooting(Z):
    p = CoulombParams(Z)
    sol = shoot_eigenvalue(p, -1, 0)
    assert sol.energy_over_mu == pytest.approx(math.sqrt(1 - p.Zalpha**2), rel=1e-8)
    assert count_nodes(sol.G) == 0
    assert 0 < sol.energy < p.mu
    assert abs(sol.G[-1]) < 1e-8 * np.max(np.abs(sol.G))


def test_excited_state_picks_corrected_variant():
    p = CoulombParams(1)
    sol = shoot_eigenvalue(p, -1, 1)
    assert sol.energy_over_mu == pytest.approx(sommerfeld_energy(1, 1, p.Zalpha), rel=1e-8)
    printed = sommerfeld_energy(1, 1, p.Zalpha, "printed")
    assert abs(sol.energy_over_mu - printed) / printed > 1e-8
    assert count_nodes(sol.G) == 1


def test_degeneracy_in_abs_kappa():
    p = CoulombParams(20)
    for n_r in (1, 2):
        a = shoot_eigenvalue(p, -1, n_r).energy
        b = shoot_eigenvalue(p, 1, n_r).energy
        assert a == pytest.approx(b, rel=1e-9)
    a = shoot_eigenvalue(p, -2, 1).energy
    b = shoot_eigenvalue(p, 2, 1).energy
    assert a == pytest.approx(b, rel=1e-9)


def test_kappa_positive_node_convention():
    # for kappa > 0 the large component has n_r - 1 nodes
    sol = shoot_eigenvalue(CoulombParams(20), 1, 2)
    assert count_nodes(sol.G) == 1


def test_no_kappa_plus_one_ground_state():
    with pytest.raises(NodeCountMismatch) as exc:
        shoot_eigenvalue(CoulombParams(1), 1, 0)
    assert exc.value.found_n_r == 1


def test_empty_bracket_reports_no_bound_state():
    p = CoulombParams(1)
    E = sommerfeld_energy(0, 1, p.Zalpha)
    with pytest.raises(NoBoundState):
        shoot_eigenvalue(p, -1, 0, E_bracket=(0.5, E - 1e-3))
    with pytest.raises(ValueError):
        shoot_eigenvalue(p, -1, 0, E_bracket=(0.5, 1.5))


def test_strong_coupling_needs_smaller_start_radius():
    p = CoulombParams(137)
    target = sommerfeld_energy(1, 1, p.Zalpha)
    coarse = shoot_eigenvalue(p, -1, 1).energy_over_mu
    fine = shoot_eigenvalue(p, -1, 1, grid=ShootingGrid(r_min=1e-12)).energy_over_mu
    assert abs(fine - target) / target < 1e-10
    assert abs(fine - target) < abs(coarse - target)


def test_shooting_solution_satisfies_rhs():
    # refine the log grid: the residual of the ODE along the assembled solution
    # falls at the integrator's order
    p = CoulombParams(20)
    errs = []
    for n in (2000, 4000):
        sol = shoot_eigenvalue(p, -1, 0, grid=ShootingGrid(n_points=n))
        ref = sommerfeld_energy(0, 1, p.Zalpha)
        errs.append(abs(sol.energy_over_mu - ref))
    assert errs[1] <= errs[0] or errs[1] < 1e-13


def test_spectrum_record_and_csv():
    p = CoulombParams(1)
    rec = spectrum_record(p, -1, 0)
    d = rec.as_dict()
    assert set(d) == {"Z", "alpha", "kappa", "n_r", "E_over_mu_printed", "E_over_mu_corrected",
                      "E_over_mu_shooting", "residual"}
    assert rec.relative_deviation < 1e-10
    bad = spectrum_record(p, 1, 0)
    assert bad.E_over_mu_shooting is None and "NodeCountMismatch" in bad.error
    sol = shoot_eigenvalue(p, -1, 0, grid=ShootingGrid(n_points=50))
    lines = radial_csv(sol).splitlines()
    assert lines[0] == "r,G,F" and len(lines) == 51


# -- plane waves ----------------------------------------------------------------

def test_rest_frame_plane_wave():
    params = PlaneWaveParams(1.0, ONE, (1.0, 0, 0, 0))
    assert momentum_constraint(params) == 0.0
    assert params.mass_shell() == 0.0


def test_vanishing_momentum_is_constant():
    # p^0 must be positive, so take it far below the grid resolution
    g = Grid4.centered((0, 0, 0, 0), 5, 0.1)
    psi = plane_wave(PlaneWaveParams(4.0, ONE, (1e-300, 0, 0, 0)), g)
    assert np.allclose(psi.values, 2 * ONE.coeffs, atol=1e-15)


def test_boosted_plane_wave_constraint():
    params = PlaneWaveParams.boosted(1.3, 0.6, axis=3, rho=2.0)
    assert momentum_constraint(params) < 1e-10
    assert abs(params.mass_shell()) < 1e-12
    p = params.p
    assert p[0] == pytest.approx(1.3 * math.cosh(0.6)) and abs(p[3]) == pytest.approx(1.3 * math.sinh(0.6))
    u = exp_even(0.3 * (G3 * G0))
    assert on_shell_momentum(u, 1.3) == pytest.approx(p)


def test_plane_wave_density_is_pointwise_rho():
    params = PlaneWaveParams.boosted(1.0, 0.4, axis=1, rho=2.5)
    g = Grid4.centered((0.1, 0.2, 0.3, 0.4), 5, 0.3)
    psi = plane_wave(params, g, phase=0.7)
    prod = gp(psi.values, reverse_array(psi.values))
    assert np.allclose(prod[..., 0], 2.5, atol=1e-12)
    assert np.allclose(prod[..., 1:], 0, atol=1e-12)


def test_plane_wave_rejects_bad_params():
    with pytest.raises(ValueError):
        PlaneWaveParams(1.0, 2 * ONE, (1.0, 0, 0, 0))
    with pytest.raises(ValueError):
        PlaneWaveParams(1.0, G0, (1.0, 0, 0, 0))
    with pytest.raises(ValueError):
        PlaneWaveParams(1.0, ONE, (-1.0, 0, 0, 0))
    with pytest.raises(ValueError):
        PlaneWaveParams(0.0, ONE, (1.0, 0, 0, 0))


def _residuals(params, spacings, center=(0.1, -0.2, 0.3, 0.05)):
    return [dirac_residual(plane_wave(params, Grid4.centered(center, 9, h)), params.mu) for h in spacings]


def test_plane_wave_residual_second_order():
    params = PlaneWaveParams.boosted(1.0, 0.6, axis=3)
    r = _residuals(params, (0.1, 0.05))
    assert 1.9 <= math.log2(r[0] / r[1]) <= 2.1


def test_off_shell_fails_by_large_margin():
    good = PlaneWaveParams.boosted(1.0, 0.6, axis=3)
    bad = PlaneWaveParams(1.0, good.u, tuple(1.3 * x for x in good.p), 1.0)
    assert _residuals(bad, (0.05,))[0] >= 100 * _residuals(good, (0.05,))[0]


def test_random_field_residual_is_order_one(rng):
    g = Grid4.centered((0, 0, 0, 0), 9, 0.05)
    good = dirac_residual(plane_wave(PlaneWaveParams.boosted(1.0, 0.6), g), 1.0)
    noise = MultivectorField(g, np.cos(rng.normal(size=(9, 9, 9, 9, 16))))
    assert dirac_residual(noise, 1.0) > 100 * good


def test_residual_rejects_non_finite():
    g = Grid4.centered((0, 0, 0, 0), 3, 0.1)
    vals = np.zeros((3, 3, 3, 3, 16))
    vals[1, 1, 1, 1, 0] = np.nan
    with pytest.raises(FloatingPointError):
        dirac_residual(MultivectorField(g, vals), 1.0)


def test_coulomb_s_state_residual_converges():
    p = CoulombParams(20)
    E, G, F = ground_state_radial(p)
    assert E == pytest.approx(math.sqrt(1 - p.Zalpha**2))
    center = (0.0, 1.0, 0.6, 0.8)  # away from the nucleus
    res = []
    for h in (0.04, 0.02):
        g = Grid4.centered(center, 7, h)
        psi = s_state_field(g, E, G, F)
        res.append(dirac_residual(psi, p.mu, coulomb_potential(g, p)))
    assert 3.5 < res[0] / res[1] < 4.5
    # the wrong small-component sign is not a solution
    g = Grid4.centered(center, 7, 0.02)
    wrong = s_state_field(g, E, G, lambda r: -F(r))
    assert dirac_residual(wrong, p.mu, coulomb_potential(g, p)) > 100 * res[1]


def test_plane_waves_superpose_to_cosine_law():
    params = PlaneWaveParams.boosted(1.0, 0.3, axis=2)
    g = Grid4.centered((0, 0, 0, 0), 3, 0.2)
    for phi in (0.0, 1.1, math.pi):
        total = plane_wave(params, g) + plane_wave(params, g, phase=phi)
        m = Multivector(total.values[1, 1, 1, 1])
        assert (m * reverse(m)).scalar_part == pytest.approx(2 + 2 * math.cos(phi), abs=1e-12)
