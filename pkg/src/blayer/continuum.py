"""Continuum equilibrium density and its energies.

The macroscopic equilibrium density for unit-mass confinement U is
ρ*(x) = [C_U - U(x)]^+ where the height C_U is fixed by ∫ρ* = 1.  Two
energies matter:

  * the local limit  E(ρ) = ½∫ρ² + ∫Uρ, and
  * the finite-blur energy at interaction range 1/γ,
    E^γ(ρ) = ½∬ γV(γ(x-y)) ρ(x)ρ(y) dx dy + ∫Uρ,

whose gap γ(E_n - E^γ(ρ*)) is the object the boundary-layer functional
describes.  E^γ's double integral is computed spectrally (piecewise-linear
sampling whose transform is known in closed form, summed over aliasing
zones so the lattice sum equals the exact integral of a periodized kernel)
and cross-checked against a graded-mesh autocorrelation quadrature.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np
from scipy import integrate, optimize

from . import quadrature
from .errors import TwoRouteMismatch

__all__ = [
    "ContinuumDensity",
    "solve_continuum",
    "energy_E",
    "energy_Egamma",
    "rho_bar",
]


@dataclasses.dataclass(frozen=True)
class ContinuumDensity:
    """Equilibrium density ρ* = [C_U - U]^+ with its height and support.

    `support` is a tuple of disjoint intervals (a, b); `kinks` lists points
    where ρ* is not smooth (support endpoints plus any non-smooth points of
    U inside the support).  `rho0` = ρ*(0).
    """

    C_U: float
    rho0: float
    support: tuple
    kinks: tuple
    U: object

    def rho(self, x):
        x = np.asarray(x, dtype=float)
        vals = np.maximum(self.C_U - self.U.evaluate(x), 0.0)
        inside = np.zeros(x.shape, dtype=bool)
        for a, b in self.support:
            inside |= (x >= a) & (x <= b)
        return np.where(inside, vals, 0.0)

    @property
    def x_max(self) -> float:
        return self.support[-1][1]


def _support_intervals(U, C, n_scan: int = 8192):
    """Disjoint intervals of {x >= 0 : U(x) < C}, endpoints by root polish."""
    hi = float(U.level_upper(C)) + 1.0
    xs = np.linspace(0.0, hi, n_scan + 1)
    f = U.evaluate(xs) - C
    below = f < 0.0
    if not np.any(below):
        return ()
    intervals = []
    idx = 0
    while idx <= n_scan:
        if not below[idx]:
            idx += 1
            continue
        j = idx
        while j + 1 <= n_scan and below[j + 1]:
            j += 1
        if idx == 0:
            a = 0.0
        else:
            a = optimize.brentq(
                lambda t: float(U.evaluate(np.array([t]))[0]) - C,
                xs[idx - 1],
                xs[idx],
                xtol=1e-15,
                rtol=8.9e-16,
            )
        if j == n_scan:
            b = xs[-1]  # cannot happen: level_upper guarantees f > 0 at hi
        else:
            b = optimize.brentq(
                lambda t: float(U.evaluate(np.array([t]))[0]) - C,
                xs[j],
                xs[j + 1],
                xtol=1e-15,
                rtol=8.9e-16,
            )
        intervals.append((a, b))
        idx = j + 1
    return tuple(intervals)


def _mass(U, C) -> float:
    total = 0.0
    for a, b in _support_intervals(U, C):
        edges = np.linspace(a, b, 17)
        nodes, weights = quadrature.gauss_panels(edges, order=32)
        total += float(np.dot(weights, np.maximum(C - U.evaluate(nodes), 0.0)))
    return total


def solve_continuum(U, tol: float = 1e-12) -> ContinuumDensity:
    """Find C_U with ∫[C_U - U]^+ = 1 and assemble the density."""
    lo, hi = 0.0, 1.0
    while _mass(U, hi) < 1.0:
        hi *= 2.0
        if hi > 1e12:
            raise RuntimeError("could not bracket equilibrium height; U grows too slowly?")
    C = optimize.brentq(lambda c: _mass(U, c) - 1.0, lo, hi, xtol=1e-15, rtol=8.9e-16)
    resid = abs(_mass(U, C) - 1.0)
    if resid > tol:
        raise RuntimeError(f"mass residual {resid:.3e} exceeds tol {tol:.1e}")
    support = _support_intervals(U, C)
    kinks = set()
    for a, b in support:
        kinks.update((a, b))
    rho0 = max(C - float(U.evaluate(np.zeros(1))[0]), 0.0)
    return ContinuumDensity(
        C_U=float(C),
        rho0=float(rho0),
        support=support,
        kinks=tuple(sorted(kinks)),
        U=U,
    )


def rho_bar(cd: ContinuumDensity):
    """ρ̄: ρ* extended to the left of the barrier by its boundary value."""

    def f(x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0.0, cd.rho0, cd.rho(x))

    return f


# ----------------------------------------------------------------------
# energies
# ----------------------------------------------------------------------

def energy_E(rho, U=None) -> float:
    """Local energy E(ρ) = ½∫ρ² + ∫Uρ.

    `rho` is either a ContinuumDensity (integrated per support interval with
    composite Simpson) or a pair (x, values) of grid samples, in which case
    `U` must be supplied and Simpson is applied on the given grid.
    """
    if isinstance(rho, ContinuumDensity):
        total = 0.0
        for a, b in rho.support:
            xs = np.linspace(a, b, 2**14 + 1)
            r = rho.rho(xs)
            total += float(
                integrate.simpson(0.5 * r * r + rho.U.evaluate(xs) * r, x=xs)
            )
        return total
    xs, vals = rho
    xs = np.asarray(xs, dtype=float)
    vals = np.asarray(vals, dtype=float)
    if U is None:
        raise ValueError("grid-sampled density needs an explicit confinement")
    if np.any(vals < -1e-12):
        raise ValueError("density must be nonnegative")
    mass = float(integrate.simpson(vals, x=xs))
    if abs(mass - 1.0) > 1e-6:
        raise ValueError(f"density mass {mass:.8f} is not 1")
    return float(integrate.simpson(0.5 * vals * vals + U.evaluate(xs) * vals, x=xs))


def _wedge_ft(u):
    """∫_0^1 (1 - t) e^{-iut} dt, vectorized and stable near u = 0."""
    u = np.asarray(u, dtype=float)
    out = np.empty(u.shape, dtype=complex)
    small = np.abs(u) < 1e-3
    us = u[small]
    phi1 = 1.0 - 1j * us / 2.0 - us**2 / 6.0 + 1j * us**3 / 24.0 + us**4 / 120.0
    phi2 = 0.5 - 1j * us / 3.0 - us**2 / 8.0 + 1j * us**3 / 30.0 + us**4 / 144.0
    out[small] = phi1 - phi2
    ub = u[~small]
    e = np.exp(-1j * ub)
    p1 = (1.0 - e) / (1j * ub)
    p2 = (p1 - e) / (1j * ub)
    out[~small] = p1 - p2
    return out


def _spectral_double_integral(
    cd: ContinuumDensity,
    V,
    gamma: float,
    n_cells: int = 2**14,
    pad: int = 8,
    zones: int = 8,
) -> float:
    """D = ∬ γV(γ(x-y)) ρ(x)ρ(y) = ∫ v(ω/γ) |ρ̂(ω)|² dω.

    ρ is sampled on n_cells+1 uniform nodes covering its support and
    interpolated piecewise-linearly; the hat expansion's transform is
    h sinc²(hω) Ĝ(ω) minus the spurious left wedge that the hat at x = 0
    adds on [-h, 0] (ρ* generally jumps at the barrier).  Ĝ is one FFT,
    periodic in ω, so higher frequencies come for free: the lattice sum over
    `zones` Nyquist zones equals the exact periodized-kernel integral up to
    an exponentially small alias plus an O(Ω^-2) truncation tail.
    """
    x_max = cd.x_max
    h = x_max / n_cells
    k = np.arange(n_cells + 1)
    f = cd.rho(k * h)
    n_fft = pad * n_cells
    g_hat = np.fft.fft(f, n=n_fft)
    d_omega = 1.0 / (n_fft * h)
    f0 = f[0]
    fK = f[-1]
    # ω = 0 term: mass of the reconstruction (hat sum minus the two wedges)
    mass_pl = h * float(np.sum(f)) - 0.5 * h * (f0 + fK)
    total = float(V.fourier(np.zeros(1))[0]) * mass_pl**2
    for zone in range(zones):
        j0 = 1 if zone == 0 else 0
        j = np.arange(j0, n_fft)
        omega = (j + zone * n_fft) * d_omega
        rho_hat = h * np.sinc(h * omega) ** 2 * g_hat[j]
        if f0 != 0.0:
            rho_hat -= f0 * h * np.conj(_wedge_ft(2.0 * np.pi * omega * h))
        if fK != 0.0:
            rho_hat -= (
                fK
                * h
                * _wedge_ft(2.0 * np.pi * omega * h)
                * np.exp(-2j * np.pi * omega * x_max)
            )
        total += 2.0 * float(
            np.dot(V.fourier(omega / gamma), np.abs(rho_hat) ** 2)
        )
    return total * d_omega


def _autocorrelation(cd: ContinuumDensity, u, order: int = 16):
    """A(u) = ∫ ρ(x) ρ(x+u) dx for u >= 0, panel-split at density kinks."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    x_max = cd.x_max
    kinks = np.asarray(cd.kinks)
    out = np.zeros_like(u)
    for i, ui in enumerate(u):
        hi = x_max - ui
        if hi <= 0.0:
            continue
        pts = {0.0, hi}
        for knk in kinks:
            if 0.0 < knk < hi:
                pts.add(float(knk))
            shifted = knk - ui
            if 0.0 < shifted < hi:
                pts.add(float(shifted))
        edges = np.asarray(sorted(pts))
        nodes, weights = quadrature.gauss_panels(edges, order)
        out[i] = float(np.dot(weights, cd.rho(nodes) * cd.rho(nodes + ui)))
    return out


def _direct_double_integral(cd: ContinuumDensity, V, gamma: float) -> float:
    """D by graded-mesh quadrature: 2∫_0^∞ γV(γu) A(u) du.

    Panels grade geometrically toward the kernel singularity at u = 0,
    capped at width 2/γ so each panel resolves the kernel's decay scale,
    and split at kink separations where A loses smoothness.
    """
    u_max = cd.x_max
    breaks = {0.0, u_max}
    kk = list(cd.kinks)
    for i, a in enumerate(kk):
        for b in kk[i + 1 :]:
            d = abs(b - a)
            if 0.0 < d < u_max:
                breaks.add(d)
    breaks = sorted(breaks)
    total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        if a == 0.0:
            edges = quadrature.graded_edges(
                a, b, "left", (b - a) * 2.0**-48, w_max=2.0 / gamma
            )
        else:
            edges = quadrature.graded_edges(a, b, "left", 2.0 / gamma, w_max=2.0 / gamma)
        nodes, weights = quadrature.gauss_panels(edges, order=16)
        vals = gamma * V.evaluate(gamma * nodes) * _autocorrelation(cd, nodes)
        total += float(np.dot(weights, vals))
    return 2.0 * total


def energy_Egamma(
    cd: ContinuumDensity,
    V,
    gamma: float,
    check_tol: float = 1e-5,
    return_parts: bool = False,
):
    """E^γ(ρ*) with the spectral route, cross-checked against direct quadrature.

    Raises TwoRouteMismatch (carrying both interaction values) if the two
    routes disagree by more than `check_tol` relatively.
    """
    d_spec = _spectral_double_integral(cd, V, gamma)
    d_dir = _direct_double_integral(cd, V, gamma)
    scale = max(abs(d_spec), abs(d_dir), 1e-300)
    if abs(d_spec - d_dir) / scale > check_tol:
        raise TwoRouteMismatch(
            f"interaction double integral routes disagree beyond {check_tol:g}: "
            f"spectral={d_spec!r} direct={d_dir!r}",
            d_spec,
            d_dir,
        )
    pot = 0.0
    for a, b in cd.support:
        xs = np.linspace(a, b, 2**14 + 1)
        pot += float(integrate.simpson(cd.U.evaluate(xs) * cd.rho(xs), x=xs))
    val = 0.5 * d_spec + pot
    if return_parts:
        return val, {"D_spectral": d_spec, "D_direct": d_dir, "potential": pot}
    return val
