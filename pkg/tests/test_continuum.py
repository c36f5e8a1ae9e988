"""Continuum equilibrium density rho* = [C_U - U]^+ and its energies."""

import numpy as np
import pytest

from blayer import (
    energy_E,
    energy_Egamma,
    make_confinement,
    make_wall_potential,
    rho_bar,
    solve_continuum,
)

SQRT2 = 1.4142135623730950488016887242097


def test_linear_confinement_closed_form():
    cd = solve_continuum(make_confinement("linear:1.0"))
    assert abs(cd.C_U - SQRT2) < 1e-12
    assert abs(cd.rho0 - SQRT2) < 1e-12
    assert len(cd.support) == 1
    a, b = cd.support[0]
    assert a == 0.0 and abs(b - SQRT2) < 1e-12
    assert abs(energy_E(cd) - 2.0 * SQRT2 / 3.0) < 1e-12


def test_quadratic_confinement_closed_form():
    cd = solve_continuum(make_confinement("quadratic:0"))
    assert abs(cd.C_U - 1.5 ** (2.0 / 3.0)) < 1e-12


def test_density_has_unit_mass_and_matches_formula():
    for spec in ("linear:1.0", "linear:2.5", "quadratic:0.3"):
        U = make_confinement(spec)
        cd = solve_continuum(U)
        xs = np.linspace(0.0, cd.x_max, 20001)
        mass = np.trapezoid(cd.rho(xs), xs)
        assert abs(mass - 1.0) < 1e-6
        assert np.allclose(
            cd.rho(xs), np.maximum(cd.C_U - U.evaluate(xs), 0.0), atol=1e-14
        )


def test_rho_bar_constant_extension():
    # rho-bar continues rho* to the left of the barrier by its wall value
    cd = solve_continuum(make_confinement("linear:1.0"))
    f = rho_bar(cd)
    x = np.linspace(0.0, 2.0, 101)
    assert np.all(f(-x[1:]) == cd.rho0)
    assert np.allclose(f(x), cd.rho(x))


def test_energy_Egamma_two_routes_agree(linear_cd, wall):
    for gamma in (2.0, 5.0):
        val, parts = energy_Egamma(linear_cd, wall, gamma, return_parts=True)
        scale = max(abs(parts["D_spectral"]), abs(parts["D_direct"]))
        assert abs(parts["D_spectral"] - parts["D_direct"]) < 1e-7 * scale
        # E^gamma(rho*) -> E(rho*) + O(1/gamma): sanity window
        assert abs(val - energy_E(linear_cd)) < 1.0 / gamma


def test_energy_Egamma_decreasing_blur_correction(linear_cd, wall):
    # the gamma-dependent part shrinks as the kernel sharpens
    e_inf = energy_E(linear_cd)
    gaps = [abs(energy_Egamma(linear_cd, wall, g) - e_inf) for g in (2.0, 4.0, 8.0)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_energy_E_with_sampled_density(linear_cd):
    xs = np.linspace(0.0, linear_cd.x_max, 2**14 + 1)
    val = energy_E((xs, linear_cd.rho(xs)), U=linear_cd.U)
    assert abs(val - 2.0 * SQRT2 / 3.0) < 1e-8


def test_table_confinement_matches_linear():
    import tempfile, os

    xs = np.linspace(0.0, 6.0, 601)
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "u.csv")
        np.savetxt(path, np.column_stack([xs, xs]), delimiter=",")
        U = make_confinement(f"table:{path}")
        cd = solve_continuum(U)
        assert abs(cd.C_U - SQRT2) < 1e-6
