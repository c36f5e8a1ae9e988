"""Confining potentials on the half line [0, inf).

A confinement U is continuous, bounded below with min U = 0, and grows at
infinity (so that [C - U]^+ has finite mass for every C).  Families:

  * linear:    U(x) = s x, slope s > 0
  * quadratic: U(x) = (x - b)^2 - min_{[0,inf)} (x - b)^2
  * table:     monotone cubic through samples, shifted so min = 0, extended
               past the last sample with the end slope (must be positive).
"""

from __future__ import annotations

import dataclasses

import numpy as np
from scipy import interpolate

__all__ = ["ConfiningPotential", "make_confinement"]


@dataclasses.dataclass(frozen=True)
class ConfiningPotential:
    """Confinement with derivatives and a growth witness.

    `level_upper(C)` returns an x beyond which U >= C everywhere, used to
    bracket level sets when solving for the equilibrium height.
    """

    name: str
    evaluate: callable
    derivative: callable
    second_derivative: callable
    level_upper: callable
    params: tuple = ()


def _linear(slope: float) -> ConfiningPotential:
    if slope <= 0:
        raise ValueError(f"linear confinement needs slope > 0, got {slope}")
    return ConfiningPotential(
        name=f"linear:{slope:g}",
        evaluate=lambda x: slope * np.asarray(x, dtype=float),
        derivative=lambda x: np.full_like(np.asarray(x, dtype=float), slope),
        second_derivative=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        level_upper=lambda C: C / slope,
        params=(slope,),
    )


def _quadratic(b: float) -> ConfiningPotential:
    shift = 0.0 if b >= 0 else b * b  # min over [0, inf) of (x-b)^2
    return ConfiningPotential(
        name=f"quadratic:{b:g}",
        evaluate=lambda x: (np.asarray(x, dtype=float) - b) ** 2 - shift,
        derivative=lambda x: 2.0 * (np.asarray(x, dtype=float) - b),
        second_derivative=lambda x: np.full_like(np.asarray(x, dtype=float), 2.0),
        level_upper=lambda C: max(b, 0.0) + np.sqrt(max(C + shift, 0.0)) + 1.0,
        params=(b,),
    )


def _table(x, u, name: str) -> ConfiningPotential:
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if x.ndim != 1 or x.size < 4 or np.any(np.diff(x) <= 0):
        raise ValueError("confinement table needs >= 4 strictly increasing abscissae")
    if x[0] != 0.0:
        raise ValueError("confinement table must start at x = 0")
    u = u - np.min(u)  # normalize min to 0
    pch = interpolate.PchipInterpolator(x, u, extrapolate=False)
    dp = pch.derivative()
    dpp = pch.derivative(2)
    x_hi = float(x[-1])
    u_hi = float(u[-1])
    slope_end = float(dp(x_hi))
    if slope_end <= 0 or u_hi < np.max(u):
        raise ValueError(
            "confinement table must be increasing at its right end so the "
            "linear extension grows"
        )

    def ev(z):
        z = np.asarray(z, dtype=float)
        inside = np.nan_to_num(pch(np.clip(z, 0.0, x_hi)))
        return np.where(z <= x_hi, inside, u_hi + slope_end * (z - x_hi))

    def d1(z):
        z = np.asarray(z, dtype=float)
        inside = np.nan_to_num(dp(np.clip(z, 0.0, x_hi)))
        return np.where(z <= x_hi, inside, slope_end)

    def d2(z):
        z = np.asarray(z, dtype=float)
        inside = np.nan_to_num(dpp(np.clip(z, 0.0, x_hi)))
        return np.where(z <= x_hi, inside, 0.0)

    def level_upper(C):
        if C <= u_hi:
            return x_hi + 1.0
        return x_hi + (C - u_hi) / slope_end + 1.0

    return ConfiningPotential(
        name=name,
        evaluate=ev,
        derivative=d1,
        second_derivative=d2,
        level_upper=level_upper,
    )


def make_confinement(spec: str) -> ConfiningPotential:
    """Build a confinement from 'linear:s', 'quadratic:b' or 'table:path'."""
    if spec.startswith("linear:"):
        return _linear(float(spec.split(":", 1)[1]))
    if spec.startswith("quadratic:"):
        return _quadratic(float(spec.split(":", 1)[1]))
    if spec.startswith("table:"):
        path = spec.split(":", 1)[1]
        data = np.loadtxt(path, delimiter=",", comments="#")
        if data.ndim != 2 or data.shape[1] != 2:
            raise ValueError(f"confinement table {path!r} must have two columns x,U")
        return _table(data[:, 0], data[:, 1], name=f"table:{path}")
    raise ValueError(f"unknown confinement spec {spec!r}")
