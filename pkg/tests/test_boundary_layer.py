"""Obstacle problem for the boundary-layer profile nu*."""

import numpy as np
import pytest

from blayer import (
    DomainTooSmallError,
    F_quadratic_form,
    F_value,
    GridMeasure,
    TwoRouteMismatch,
    minimize_F,
    profile_rho_star_gamma,
)


def _gaussian_measure(L=40.0, K=1024, floor=1.0):
    x = np.arange(K + 1) * (L / K)
    vals = np.exp(-((x - 3.0) ** 2)) - 0.5 * np.exp(-((x - 6.0) ** 2) / 2.0)
    return GridMeasure(L, K, vals, floor=floor)


def test_grid_measure_validation():
    with pytest.raises(Exception):
        GridMeasure(10.0, 100, np.zeros(5), floor=1.0)  # wrong length
    with pytest.raises(Exception):
        GridMeasure(10.0, 100, np.full(101, -2.0), floor=1.0)  # below -floor
    m = _gaussian_measure()
    assert m.h == 40.0 / 1024
    assert m.x.shape == (1025,)


def test_quadratic_form_routes_agree(wall):
    nu = _gaussian_measure()
    spectral = F_quadratic_form(nu, wall, route="spectral")
    dense = F_quadratic_form(nu, wall, route="dense")
    sqrtm = F_quadratic_form(nu, wall, route="sqrt_multiplier")
    assert abs(spectral - dense) < 1e-6 * abs(dense)
    assert abs(spectral - sqrtm) < 1e-13 * abs(spectral)
    assert spectral > 0.0  # positive-definite form


def test_quadratic_form_cross_check_raises_on_mismatch(wall):
    nu = _gaussian_measure()
    with pytest.raises(TwoRouteMismatch):
        F_quadratic_form(nu, wall, cross_check=True, check_tol=1e-18)


def test_minimize_F_zero_density(wall):
    prof = minimize_F(wall, 0.0)
    assert prof.F == 0.0
    assert np.all(prof.nu.values == 0.0)


def test_minimize_F_wall_profile(wall, wall_profile):
    prof = wall_profile
    rho0 = prof.rho0
    # constraint, KKT and complementarity
    assert np.all(prof.nu.values >= -rho0 - 1e-12)
    assert prof.kkt_residual < 1e-8
    assert prof.complementarity < 1e-8
    # reported F matches an independent evaluation of the functional
    assert abs(F_value(prof.nu, wall, rho0) - prof.F) < 1e-9 * abs(prof.F)
    # profile decays inside the domain
    assert abs(prof.nu.values[-1]) < 1e-8 * np.max(np.abs(prof.nu.values))
    # a perturbation cannot lower F (minimality spot-check)
    rng = np.random.default_rng(2)
    for _ in range(3):
        pert = rng.normal(0.0, 0.01, prof.nu.values.shape)
        pert[-1] = 0.0
        vals = np.maximum(prof.nu.values + pert, -rho0)
        nu2 = GridMeasure(prof.nu.L, prof.nu.K, vals, floor=rho0)
        assert F_value(nu2, wall, rho0, cross_check=False) >= prof.F - 1e-12


def test_minimize_F_mesh_refinement(wall, wall_profile):
    # successive halvings of the cell width shrink the change in F
    coarse = minimize_F(wall, wall_profile.rho0, L=40.0, K=2048)
    mid = minimize_F(wall, wall_profile.rho0, L=40.0, K=4096)
    d1 = abs(mid.F - coarse.F)
    d2 = abs(wall_profile.F - mid.F)
    assert d2 < d1
    assert d2 < 0.02 * abs(wall_profile.F)


def test_minimize_F_domain_too_small(wall):
    with pytest.raises(DomainTooSmallError):
        minimize_F(wall, np.sqrt(2.0), L=1.0, K=256)


def test_profile_rho_star_gamma_combines_layers(wall, linear_cd, wall_profile):
    gamma = 6.0
    f = profile_rho_star_gamma(wall_profile, linear_cd, gamma)
    # far from the wall the correction vanishes
    assert abs(f(np.array([1.0]))[0] - linear_cd.rho(np.array([1.0]))[0]) < 1e-6
    # at the wall the corrected density exceeds rho*(0) by the layer peak
    assert f(np.array([0.0]))[0] > linear_cd.rho0 + 1.0
