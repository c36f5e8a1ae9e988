"""Discrete configurations, energy/derivatives, Newton minimizer, initializers."""

import numpy as np
import pytest

from blayer import (
    CollisionError,
    ParticleConfiguration,
    density_crosses,
    energy,
    gradient,
    hessian,
    make_confinement,
    minimize,
    quantile_init,
)
from blayer.backend import COMPILED


def _random_cfg(rng, n, gamma):
    gaps = rng.uniform(0.2, 1.5, n) / n
    x = np.concatenate([[0.0], np.cumsum(gaps)])
    return ParticleConfiguration(x, gamma)


def _energy_bruteforce(cfg, V, U):
    # independent O(n^2) python reference for the vectorized/compiled sums
    x, g, n = cfg.positions, cfg.gamma, cfg.n
    e = 0.0
    for i in range(n + 1):
        for j in range(i):
            e += g * float(V.evaluate(np.array([g * (x[i] - x[j])]))[0]) / n**2
        e += float(U.evaluate(np.array([x[i]]))[0]) / n
    return e


def test_configuration_validation():
    with pytest.raises(Exception):
        ParticleConfiguration(np.array([0.1, 0.5]), 1.0)  # x0 must be 0
    with pytest.raises(Exception):
        ParticleConfiguration(np.array([0.0, 0.5, 0.5]), 1.0)  # strictly increasing
    with pytest.raises(Exception):
        ParticleConfiguration(np.array([0.0, 1.0]), -2.0)  # gamma > 0
    cfg = ParticleConfiguration(np.array([0.0, 1.0, 2.0]), 1.5)
    assert cfg.n == 2
    with pytest.raises(ValueError):
        cfg.positions[0] = 1.0  # read-only view


def test_energy_matches_bruteforce(wall):
    U = make_confinement("linear:1.0")
    rng = np.random.default_rng(11)
    for n in (3, 7, 20):
        cfg = _random_cfg(rng, n, rng.uniform(0.5, 4.0))
        assert abs(energy(cfg, wall, U) - _energy_bruteforce(cfg, wall, U)) < 1e-13


def test_gradient_and_hessian_finite_differences(wall):
    U = make_confinement("quadratic:0.2")
    rng = np.random.default_rng(7)
    cfg = _random_cfg(rng, 12, 2.0)
    x = cfg.positions
    g = gradient(cfg, wall, U)
    H = hessian(cfg, wall, U)
    h = 1e-6
    for i in range(1, 13):
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        fd = (
            energy(ParticleConfiguration(xp, 2.0), wall, U)
            - energy(ParticleConfiguration(xm, 2.0), wall, U)
        ) / (2 * h)
        assert abs(fd - g[i]) < 1e-7 * max(1.0, abs(g[i]))
        fd_row = (
            gradient(ParticleConfiguration(xp, 2.0), wall, U)
            - gradient(ParticleConfiguration(xm, 2.0), wall, U)
        ) / (2 * h)
        assert np.max(np.abs(fd_row - H[i])) < 1e-5 * max(1.0, np.max(np.abs(H[i])))


def test_single_particle_stationarity_bisection_oracle(wall):
    # n=1, gamma=1, U(x)=x: minimizer solves V'(x1) + 1 = 0 (energy is
    # V(x1)/1 + x0-term + x1-term with the 1/n^2 = 1 prefactors)
    U = make_confinement("linear:1.0")
    x0 = ParticleConfiguration(np.array([0.0, 0.8]), 1.0)
    cfg, info = minimize(x0, wall, U)
    lo, hi = 1e-6, 5.0
    for _ in range(200):  # bisection on the stationarity residual
        mid = 0.5 * (lo + hi)
        r = wall.derivative(np.array([mid]))[0] + 1.0
        if r < 0:
            lo = mid
        else:
            hi = mid
    assert abs(cfg.positions[1] - 0.5 * (lo + hi)) < 1e-9


def test_minimize_two_starts_agree(wall, linear_cd):
    n, gamma = 120, 120**0.25
    U = linear_cd.U
    a, _ = minimize(quantile_init(linear_cd, n, gamma), wall, U)
    # second start: uniform spacing on a slightly larger interval
    x1 = np.linspace(0.0, 1.2 * linear_cd.x_max, n + 1)
    b, _ = minimize(ParticleConfiguration(x1, gamma), wall, U)
    assert np.max(np.abs(a.positions - b.positions)) < 1e-8


def test_quantile_init_uniform_density():
    # synthetic uniform density on [0,1] with gamma = 1: exact quantiles i/n
    class FlatCD:
        x_max = 1.0
        kinks = ()

        @staticmethod
        def rho(x):
            x = np.asarray(x, dtype=float)
            return np.where((x >= 0.0) & (x <= 1.0), 1.0, 0.0)

    n = 50
    cfg = quantile_init(FlatCD(), n, 1.0)
    assert np.max(np.abs(cfg.positions - np.arange(n + 1) / n)) < 1e-9


def test_quantile_init_tail_rule():
    # total mass 1/2 < 1: the quantile construction exhausts the density
    # halfway and must continue with the uniform zoomed spacing gamma^1.5/n
    class HalfCD:
        x_max = 0.5
        kinks = ()

        @staticmethod
        def rho(x):
            x = np.asarray(x, dtype=float)
            return np.where((x >= 0.0) & (x <= 0.5), 1.0, 0.0)

    n, gamma = 40, 4.0
    cfg = quantile_init(HalfCD(), n, gamma)
    dz = gamma * np.diff(cfg.positions)
    tail_gap = gamma**1.5 / n
    # roughly the last half of the gaps follow the tail rule exactly
    assert np.all(np.abs(dz[-15:] - tail_gap) < 1e-9 * tail_gap)


def test_density_crosses_uniform_spacing():
    n, h = 30, 0.01
    cfg = ParticleConfiguration(np.arange(n + 1) * h, 1.0)
    xc, vals = density_crosses(cfg)
    assert xc.shape == (n - 1,)
    assert np.allclose(vals, 1.0 / (n * h))


def test_density_crosses_track_continuum_in_bulk(wall, linear_cd):
    # minimizer crosses follow rho*(x) = sqrt(2) - x away from both layers
    n, gamma = 400, 400**0.25
    cfg, _ = minimize(quantile_init(linear_cd, n, gamma), wall, linear_cd.U)
    xc, vals = density_crosses(cfg)
    bulk = (xc > 0.4) & (xc < 1.0)
    A = np.column_stack([xc[bulk], np.ones(np.sum(bulk))])
    slope, intercept = np.linalg.lstsq(A, vals[bulk], rcond=None)[0]
    assert abs(slope + 1.0) < 0.08
    # near the barrier the deviation from rho* is much larger than in bulk
    layer = xc < gamma / n * 10
    dev = np.abs(vals - linear_cd.rho(xc))
    assert np.max(dev[layer]) > 10.0 * np.median(dev[bulk])


def test_backend_python_fallback_matches(wall, linear_cd):
    from blayer import _kernels_py
    from blayer import backend

    rng = np.random.default_rng(5)
    cfg = _random_cfg(rng, 40, 3.0)
    x, g = cfg.positions, cfg.gamma
    e_sel = backend.pair_energy(x, g, wall)
    gr_sel = backend.pair_gradient(x, g, wall)
    e_py = _kernels_py.pair_energy(x, g, wall)
    gr_py = _kernels_py.pair_gradient(x, g, wall)
    assert abs(e_sel - e_py) < 1e-11 * abs(e_py)
    assert np.max(np.abs(gr_sel - gr_py)) < 1e-11 * np.max(np.abs(gr_py))
