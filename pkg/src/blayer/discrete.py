"""Discrete particle configurations and their energy minimization.

n+1 ordered particles 0 = x_0 < x_1 < ... < x_n on the half line, with one
particle pinned at the barrier, carry the energy

    E_n(x) = (1/n²) Σ_{i>j} γ V(γ(x_i - x_j)) + (1/n) Σ_i U(x_i).

The interaction is convex in x (V even and convex away from 0), so with the
first coordinate pinned the Hessian is strictly diagonally dominant and a
damped Newton iteration with an ordering-preserving line search converges to
the unique minimizer.
"""

from __future__ import annotations

import dataclasses

import numpy as np
from scipy import linalg

from . import backend
from .errors import CollisionError, IterationLimitError

__all__ = [
    "ParticleConfiguration",
    "energy",
    "gradient",
    "hessian",
    "minimize",
    "quantile_init",
    "density_crosses",
]

_MIN_GAP = 1e-13


@dataclasses.dataclass(frozen=True)
class ParticleConfiguration:
    """Ordered particle positions with the blur parameter γ.

    positions has length n+1, starts at exactly 0, and is strictly
    increasing; the array is copied and frozen at construction.
    """

    positions: np.ndarray
    gamma: float

    def __post_init__(self):
        x = np.array(self.positions, dtype=float)
        if x.ndim != 1 or x.size < 2:
            raise ValueError("need at least two particles (x_0 = 0 plus one free)")
        if not np.all(np.isfinite(x)):
            raise ValueError("positions must be finite")
        if x[0] != 0.0:
            raise ValueError(f"x_0 must be pinned at 0, got {x[0]!r}")
        if np.any(np.diff(x) <= 0.0):
            raise CollisionError("positions must be strictly increasing")
        if not np.isfinite(self.gamma) or self.gamma <= 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma!r}")
        x.setflags(write=False)
        object.__setattr__(self, "positions", x)

    @property
    def n(self) -> int:
        return self.positions.size - 1


def energy(cfg: ParticleConfiguration, V, U) -> float:
    x = cfg.positions
    n = cfg.n
    if np.min(np.diff(x)) * cfg.gamma < _MIN_GAP:
        raise CollisionError("particles too close for a singular kernel")
    inter = (cfg.gamma / n**2) * backend.pair_energy(x, cfg.gamma, V)
    conf = float(np.sum(U.evaluate(x))) / n
    return inter + conf


def gradient(cfg: ParticleConfiguration, V, U) -> np.ndarray:
    """dE_n/dx_i for all i (entry 0 is reported but x_0 stays pinned)."""
    x = cfg.positions
    n = cfg.n
    g = (cfg.gamma**2 / n**2) * backend.pair_gradient(x, cfg.gamma, V)
    return g + U.derivative(x) / n


def hessian(cfg: ParticleConfiguration, V, U) -> np.ndarray:
    x = cfg.positions
    n = cfg.n
    H = (cfg.gamma**3 / n**2) * backend.pair_hessian(x, cfg.gamma, V)
    H[np.diag_indices_from(H)] += U.second_derivative(x) / n
    return H


def _max_step(x, d) -> float:
    """Largest α with x + αd still strictly ordered (d_0 = 0)."""
    gaps = np.diff(x)
    dgaps = np.diff(d)
    shrink = dgaps < 0.0
    if not np.any(shrink):
        return np.inf
    return float(np.min(-gaps[shrink] / dgaps[shrink]))


@dataclasses.dataclass
class MinimizeInfo:
    iterations: int
    grad_norm: float
    energy: float
    newton_steps: int
    fallback_steps: int


def minimize(
    cfg: ParticleConfiguration,
    V,
    U,
    tol: float = None,
    max_iter: int = 10_000,
):
    """Damped Newton minimization of E_n at fixed x_0 = 0.

    Converged when the max-norm of the free gradient drops below `tol`
    (default 1e-12 · max(1, γ²/n), roughly machine noise of the gradient
    assembly).  Steps are capped to preserve the ordering; if the Newton
    direction stalls, a gradient step with the same safeguard is tried.
    Raises IterationLimitError (carrying the best iterate) at the cap.
    """
    n = cfg.n
    gamma = cfg.gamma
    if tol is None:
        tol = 1e-12 * max(1.0, gamma * gamma / n) * max(1.0, n)
    x = cfg.positions.copy()
    e = energy(ParticleConfiguration(x, gamma), V, U)
    newton_steps = fallback_steps = 0
    for it in range(max_iter):
        g = gradient(ParticleConfiguration(x, gamma), V, U)
        gf = g[1:]
        gnorm = float(np.max(np.abs(gf)))
        if gnorm <= tol:
            return ParticleConfiguration(x, gamma), MinimizeInfo(
                it, gnorm, e, newton_steps, fallback_steps
            )
        H = hessian(ParticleConfiguration(x, gamma), V, U)[1:, 1:]
        d = np.zeros_like(x)
        try:
            cf = linalg.cho_factor(H, check_finite=False)
            d[1:] = -linalg.cho_solve(cf, gf, check_finite=False)
            newton = True
        except linalg.LinAlgError:
            d[1:] = -gf
            newton = False
        # line search with ordering safeguard
        amax = _max_step(x, d)
        alpha = min(1.0, 0.95 * amax)
        slope = float(np.dot(gf, d[1:]))
        if slope >= 0.0:  # not a descent direction; fall back to gradient
            d = np.zeros_like(x)
            d[1:] = -gf
            amax = _max_step(x, d)
            alpha = min(1.0, 0.95 * amax)
            slope = -float(np.dot(gf, gf))
            newton = False
        noise = 1e-13 * max(abs(e), 1.0)
        accepted = False
        while alpha > 1e-16:
            x_try = x + alpha * d
            if np.min(np.diff(x_try)) * gamma > _MIN_GAP:
                try:
                    e_try = energy(ParticleConfiguration(x_try, gamma), V, U)
                except CollisionError:
                    e_try = np.inf
                # once the predicted decrease is below energy rounding the
                # Armijo test carries no information; take the (ordering-
                # capped) Newton step and let the gradient test decide
                if -alpha * slope <= noise and np.isfinite(e_try):
                    x, e = x_try, e_try
                    accepted = True
                    break
                if e_try <= e + 1e-4 * alpha * slope:
                    x, e = x_try, e_try
                    accepted = True
                    break
            alpha *= 0.5
        if not accepted:
            raise IterationLimitError(
                f"line search failed at iteration {it} (|grad| = {gnorm:.3e})",
                best=ParticleConfiguration(x, gamma),
                residual=gnorm,
            )
        if newton:
            newton_steps += 1
        else:
            fallback_steps += 1
    g = gradient(ParticleConfiguration(x, gamma), V, U)
    gnorm = float(np.max(np.abs(g[1:])))
    raise IterationLimitError(
        f"no convergence in {max_iter} iterations (|grad| = {gnorm:.3e}, tol = {tol:.3e})",
        best=ParticleConfiguration(x, gamma),
        residual=gnorm,
    )


def quantile_init(
    cd,
    n: int,
    gamma: float,
    nu=None,
    grid_points: int = 2**18,
) -> ParticleConfiguration:
    """Equal-mass initializer: consecutive gaps each carry mass γ/n.

    Works in zoomed coordinates z = γx against the target density
    q(z) = ν(z) + ρ*(z/γ) (ν optional, given as a GridMeasure); positions
    are the quantiles Q^{-1}(i γ/n).  If the total available mass runs out
    (possible when ν carries negative mass), remaining particles continue
    with uniform zoomed spacing γ^{3/2}/n.
    """
    z_hi = gamma * cd.x_max
    if nu is not None:
        z_hi = max(z_hi, nu.L)
    z = np.linspace(0.0, z_hi, grid_points + 1)
    q = cd.rho(z / gamma)
    if nu is not None:
        q = q + np.interp(z, nu.x, nu.values, left=0.0, right=0.0)
    if np.min(q) < -1e-12:
        raise ValueError("target density ν + ρ̃* is negative; cannot take quantiles")
    q = np.maximum(q, 0.0)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (q[1:] + q[:-1]) * np.diff(z))])
    targets = np.arange(n + 1) * (gamma / n)
    total = cum[-1]
    j_last = int(np.searchsorted(targets, total * (1.0 + 1e-12), side="right")) - 1
    zq = np.interp(targets[: j_last + 1], cum, z)
    if j_last < n:
        tail = zq[-1] + np.arange(1, n - j_last + 1) * gamma**1.5 / n
        zq = np.concatenate([zq, tail])
    # trapezoid inversion can produce ties on flat stretches; nudge them apart
    gaps = np.diff(zq)
    min_gap = max(1e-12 * max(z_hi, 1.0), 2.0 * _MIN_GAP / gamma)
    bad = gaps < min_gap
    if np.any(bad):
        zq = np.concatenate([[zq[0]], zq[0] + np.cumsum(np.maximum(gaps, min_gap))])
    zq[0] = 0.0
    return ParticleConfiguration(zq / gamma, gamma)


def density_crosses(cfg: ParticleConfiguration):
    """Central-difference empirical density at the interior particles.

    Each particle carries mass 1/n; the local density estimate at x_i is
    2/(n (x_{i+1} - x_{i-1})).  Returns (positions, values).
    """
    x = cfg.positions
    n = cfg.n
    if n < 2:
        raise ValueError("need at least two gaps for a crossing estimate")
    vals = 2.0 / (n * (x[2:] - x[:-2]))
    return x[1:-1].copy(), vals
