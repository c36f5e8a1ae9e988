"""Repulsive interaction kernels.

Every kernel V is even, nonnegative, non-increasing and convex on (0, inf),
normalized to unit mass, with an integrable singularity |x|^-a (a = 0 means
logarithmic) at the origin.  Besides pointwise values and two derivatives,
a kernel carries its tail integral g(x) = ∫_x^∞ V and its Fourier transform
v(ω) = ∫ V(x) e^{-2πixω} dx (so v(0) = 1).

Built-in families:
  * wall     -- V(x) = c (x coth x - log|2 sinh x|), the kernel produced by
                integrating out the transverse direction of a 2d log gas
                confined to a half plane; a = 0, exponential decay.
  * power:a  -- V(x) = c_a |x|^-a e^{-|x|} for a in [0, 1).
  * table    -- cubic monotone interpolation of user-supplied samples.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np
from scipy import integrate, interpolate, special

from . import quadrature

__all__ = [
    "InteractionPotential",
    "RegularizedPotential",
    "AssumptionReport",
    "make_potential",
    "make_wall_potential",
    "make_power_potential",
    "make_table_potential",
    "tail_integral",
    "regularize",
    "verify_assumptions",
]

_PI2 = math.pi * math.pi
# Wall kernel raw mass is π²/3; this factor normalizes it to 1.
WALL_NORM = 3.0 / _PI2


# ----------------------------------------------------------------------
# wall kernel, raw (unnormalized) branches
# ----------------------------------------------------------------------

def _wall_raw(x):
    """x coth x - log|2 sinh x| for x > 0, numerically stable on all scales.

    Rewritten in terms of t = e^{-2x} as 2xt/(1-t) - log(1-t).  For small x
    the distance 1-t is formed with expm1 (no cancellation); for x >= 1/2
    t itself is small and the same expression is evaluated directly from t,
    which stays fully accurate down to the underflow threshold.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < 0.5
    xs = x[small]
    em = -np.expm1(-2.0 * xs)  # 1 - e^{-2x}
    safe = np.where(em > 0, em, 1.0)
    vals = 2.0 * xs * (1.0 - safe) / safe - np.log(safe)
    out[small] = np.where(em > 0, vals, np.inf)
    xl = x[~small]
    t = np.exp(-2.0 * xl)
    out[~small] = 2.0 * xl * t / (1.0 - t) - np.log1p(-t)
    return out


def _wall_raw_d1(x):
    """d/dx of the raw wall kernel: -x / sinh(x)^2."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < 18.0
    xs = x[small]
    with np.errstate(divide="ignore"):
        out[small] = -xs / np.sinh(xs) ** 2
    xl = x[~small]
    out[~small] = -4.0 * xl * np.exp(-2.0 * xl)
    return out


def _wall_raw_d2(x):
    """Second derivative: (2x cosh x - sinh x) / sinh(x)^3."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < 18.0
    xs = x[small]
    sh = np.sinh(xs)
    safe = np.where(sh > 0, sh, 1.0)
    vals = (2.0 * xs * np.cosh(xs) - safe) / safe**3
    out[small] = np.where(sh > 0, vals, np.inf)
    xl = x[~small]
    out[~small] = 4.0 * (2.0 * xl - 1.0) * np.exp(-2.0 * xl)
    return out


def _wall_raw_tail(x):
    """g_raw(x) = ∫_x^∞ raw wall kernel = -x log(1-e^{-2x}) + Li2(e^{-2x}).

    spence(z) from scipy is Li2(1-z), so Li2(e^{-2x}) = spence(1-e^{-2x}).
    Beyond x = 7 the expansion in t = e^{-2x} (through t^3) is used instead,
    since spence near argument 1 cannot resolve Li2(t) relatively.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < 7.0
    xs = x[small]
    em = -np.expm1(-2.0 * xs)  # 1 - e^{-2x}
    safe = np.where(em > 0, em, 1.0)
    vals = -xs * np.log(safe) + special.spence(safe)
    out[small] = np.where(em > 0, vals, _PI2 / 6.0)
    xl = x[~small]
    t = np.exp(-2.0 * xl)
    out[~small] = (
        (xl + 1.0) * t
        + (0.5 * xl + 0.25) * t * t
        + (xl / 3.0 + 1.0 / 9.0) * t**3
    )
    return out


def _wall_raw_fourier(omega):
    """v_raw(ω) = (1/(2ω)) (coth y - y/sinh² y) with y = π²ω, even in ω.

    The bracket vanishes linearly at 0; a series in y keeps full accuracy
    there and the hyperbolic functions are replaced by their limits once
    they would overflow.
    """
    omega = np.abs(np.asarray(omega, dtype=float))
    y = _PI2 * omega
    out = np.empty_like(y)
    small = y < 0.1
    ys = y[small] ** 2
    # (coth y - y/sinh²y)/(2y) * π², series coefficients of (coth y - y csch²y)/y
    out[small] = _PI2 * (
        1.0 / 3.0 - ys * (2.0 / 45.0 - ys * (2.0 / 315.0 - ys * (4.0 / 4725.0)))
    )
    mid = ~small & (y < 18.0)
    ym = y[mid]
    phi = 1.0 / np.tanh(ym) - ym / np.sinh(ym) ** 2
    out[mid] = phi / (2.0 * omega[mid])
    big = y >= 18.0
    out[big] = 1.0 / (2.0 * omega[big])
    return out


# ----------------------------------------------------------------------
# kernel container
# ----------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class InteractionPotential:
    """Normalized repulsive kernel with derivatives, tail and transform.

    evaluate/derivative/second_derivative act on |x| (the kernel is even;
    `derivative` returns dV/dx for x > 0, which is what the pairwise force
    sums need).  `tail` is g(x) = ∫_x^∞ V;  `fourier` is v(ω) with v(0) = 1.
    `lam`/`delta`: convexity floor V'' >= lam on (0, delta).
    `x_decay`: beyond this, V is numerically negligible.
    `kernel_id`: 'wall', 'power' or 'table' (used to pick compiled loops).
    """

    name: str
    a: float
    lam: float
    delta: float
    x_decay: float
    kernel_id: str
    evaluate: callable
    derivative: callable
    second_derivative: callable
    tail: callable
    fourier: callable
    params: tuple = ()


def make_wall_potential() -> InteractionPotential:
    c = WALL_NORM
    d2_at_delta = float(c * _wall_raw_d2(np.array([1.0]))[0])
    return InteractionPotential(
        name="wall",
        a=0.0,
        lam=d2_at_delta,  # V'' is decreasing on (0,1], so the inf sits at 1
        delta=1.0,
        x_decay=40.0,
        kernel_id="wall",
        evaluate=lambda x: c * _wall_raw(np.abs(np.asarray(x, dtype=float))),
        derivative=lambda x: c * _wall_raw_d1(np.abs(np.asarray(x, dtype=float))),
        second_derivative=lambda x: c
        * _wall_raw_d2(np.abs(np.asarray(x, dtype=float))),
        tail=lambda x: c * _wall_raw_tail(np.asarray(x, dtype=float)),
        fourier=lambda w: c * _wall_raw_fourier(w),
    )


def make_power_potential(a: float) -> InteractionPotential:
    """V(x) = c_a |x|^{-a} e^{-|x|}, c_a = 1 / (2 Γ(1-a)), for a in [0, 1)."""
    if not 0.0 <= a < 1.0:
        raise ValueError(f"power kernel exponent must be in [0,1), got {a}")
    c = 1.0 / (2.0 * special.gamma(1.0 - a))

    def ev(x):
        x = np.abs(np.asarray(x, dtype=float))
        with np.errstate(divide="ignore"):
            return c * x**-a * np.exp(-x)

    def d1(x):
        x = np.abs(np.asarray(x, dtype=float))
        with np.errstate(divide="ignore"):
            return -c * np.exp(-x) * x ** (-a - 1.0) * (a + x)

    def d2(x):
        x = np.abs(np.asarray(x, dtype=float))
        with np.errstate(divide="ignore"):
            return c * np.exp(-x) * x ** (-a - 2.0) * (a * (a + 1.0) + 2.0 * a * x + x * x)

    def tail(x):
        # ∫_x^∞ t^{-a} e^{-t} dt = Γ(1-a) Q(1-a, x), Q the regularized
        # upper incomplete gamma; gammaincc(0, x) would be invalid, but
        # a < 1 keeps 1-a > 0.
        x = np.asarray(x, dtype=float)
        return c * special.gamma(1.0 - a) * special.gammaincc(1.0 - a, np.maximum(x, 0.0))

    def fourier(w):
        # closed form: ∫ |x|^{-a} e^{-|x|} e^{-2πixω} dx
        #   = 2 Γ(1-a) cos((1-a) arctan(2πω)) (1+4π²ω²)^{-(1-a)/2}
        w = np.asarray(w, dtype=float)
        t = 2.0 * np.pi * w
        return np.cos((1.0 - a) * np.arctan(t)) * (1.0 + t * t) ** (-(1.0 - a) / 2.0)

    # V'' decreasing on (0, 1]: floor at delta = 1
    lam = float(d2(np.array([1.0]))[0])
    return InteractionPotential(
        name=f"power:{a:g}",
        a=a,
        lam=lam,
        delta=1.0,
        x_decay=45.0,
        kernel_id="power",
        evaluate=ev,
        derivative=d1,
        second_derivative=d2,
        tail=tail,
        fourier=fourier,
        params=(a, c),
    )


def make_table_potential(x, v, name: str = "table") -> InteractionPotential:
    """Kernel interpolated from samples (x_i, V_i) on x >= 0.

    Monotone cubic interpolation keeps nonnegativity and monotonicity of the
    data; outside the table the kernel is extended by an exponential fit to
    the last two samples (decay) and by the first sample value (flat) toward
    zero, so the result is bounded: a = 0 with C = V(x_0).
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.ndim != 1 or x.size < 4 or np.any(np.diff(x) <= 0):
        raise ValueError("table kernel needs >= 4 strictly increasing abscissae")
    if x[0] < 0:
        raise ValueError("table kernel abscissae must be >= 0")
    if np.any(v < 0) or np.any(np.diff(v) > 0):
        raise ValueError("table kernel values must be nonnegative and non-increasing")
    pch = interpolate.PchipInterpolator(x, v, extrapolate=False)
    x_lo, x_hi = float(x[0]), float(x[-1])
    v_lo, v_hi = float(v[0]), float(v[-1])
    if v_hi > 0 and v[-2] > v_hi:
        rate = math.log(v[-2] / v_hi) / (x[-1] - x[-2])
    else:
        rate = 1.0

    def raw(z):
        z = np.abs(np.asarray(z, dtype=float))
        out = np.where(z <= x_lo, v_lo, 0.0)
        inside = (z > x_lo) & (z <= x_hi)
        out = np.where(inside, np.nan_to_num(pch(np.clip(z, x_lo, x_hi))), out)
        beyond = z > x_hi
        out = np.where(beyond, v_hi * np.exp(-rate * (z - x_hi)), out)
        return out

    mass_in = float(integrate.quad(lambda t: raw(np.array([t]))[0], x_lo, x_hi, limit=200)[0])
    mass = 2.0 * (v_lo * x_lo + mass_in + v_hi / rate if v_hi > 0 else v_lo * x_lo + mass_in)
    if mass <= 0:
        raise ValueError("table kernel has zero mass")
    c = 1.0 / mass
    dp = pch.derivative()
    dpp = pch.derivative(2)

    def ev(z):
        return c * raw(z)

    def d1(z):
        z = np.abs(np.asarray(z, dtype=float))
        out = np.zeros_like(z)
        inside = (z > x_lo) & (z <= x_hi)
        out = np.where(inside, np.nan_to_num(dp(np.clip(z, x_lo, x_hi))), out)
        beyond = z > x_hi
        out = np.where(beyond, -rate * v_hi * np.exp(-rate * (z - x_hi)), out)
        return c * out

    def d2(z):
        z = np.abs(np.asarray(z, dtype=float))
        out = np.zeros_like(z)
        inside = (z > x_lo) & (z <= x_hi)
        out = np.where(inside, np.nan_to_num(dpp(np.clip(z, x_lo, x_hi))), out)
        beyond = z > x_hi
        out = np.where(beyond, rate * rate * v_hi * np.exp(-rate * (z - x_hi)), out)
        return c * out

    x_decay = x_hi + (50.0 / rate if v_hi > 0 else 0.0)

    def tail(z):
        z = np.atleast_1d(np.asarray(z, dtype=float))
        out = np.empty_like(z)
        for i, zi in enumerate(z):
            zi = max(zi, 0.0)
            if zi >= x_hi:
                out[i] = (v_hi / rate) * math.exp(-rate * (zi - x_hi)) if v_hi > 0 else 0.0
            else:
                out[i] = integrate.quad(
                    lambda t: raw(np.array([t]))[0], zi, x_hi, limit=200
                )[0] + (v_hi / rate if v_hi > 0 else 0.0)
        return c * out

    def fourier(w):
        return quadrature.cosine_transform(ev, w, x_decay)

    # convexity floor estimated on a grid of (0, 1]
    zz = np.linspace(1e-3, 1.0, 512)
    lam = float(min(np.min(d2(zz)), 0.0))
    return InteractionPotential(
        name=name,
        a=0.0,
        lam=max(lam, 0.0),
        delta=1.0,
        x_decay=max(x_decay, 1.0),
        kernel_id="table",
        evaluate=ev,
        derivative=d1,
        second_derivative=d2,
        tail=tail,
        fourier=fourier,
    )


def make_potential(spec: str, table_loader=None) -> InteractionPotential:
    """Build a kernel from a textual spec: 'wall', 'power:a' or 'table:path'."""
    if spec == "wall":
        return make_wall_potential()
    if spec.startswith("power:"):
        return make_power_potential(float(spec.split(":", 1)[1]))
    if spec.startswith("table:"):
        path = spec.split(":", 1)[1]
        data = np.loadtxt(path, delimiter=",", comments="#")
        if data.ndim != 2 or data.shape[1] != 2:
            raise ValueError(f"kernel table {path!r} must have two columns x,V")
        return make_table_potential(data[:, 0], data[:, 1], name=f"table:{path}")
    raise ValueError(f"unknown kernel spec {spec!r}")


# ----------------------------------------------------------------------
# tail integral and regularization
# ----------------------------------------------------------------------

def tail_integral(V: InteractionPotential, x):
    """g(x) = ∫_x^∞ V.  Uses the kernel's closed form when present."""
    if V.tail is not None:
        return V.tail(np.asarray(x, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    for i, xi in enumerate(x):
        out[i] = integrate.quad(
            lambda t: float(V.evaluate(np.array([t]))[0]),
            max(xi, 0.0),
            V.x_decay,
            limit=400,
        )[0]
    return out


@dataclasses.dataclass(frozen=True)
class RegularizedPotential:
    """Split V = V_beta + W_beta at scale beta.

    V_beta replaces V on [0, beta) by the parabola matching value and slope
    at beta with curvature lam (V's convexity floor), so V_beta is still
    convex, even, and touches V from below; W_beta = V - V_beta >= 0 is
    supported in [-beta, beta].
    """

    base: InteractionPotential
    beta: float
    v_at_beta: float
    dv_at_beta: float
    lam: float

    def evaluate_smooth(self, x):
        x = np.abs(np.asarray(x, dtype=float))
        inner = (
            self.v_at_beta
            + (x - self.beta) * self.dv_at_beta
            + 0.5 * self.lam * (x - self.beta) ** 2
        )
        return np.where(x < self.beta, inner, self.base.evaluate(x))

    def evaluate_remainder(self, x):
        x = np.abs(np.asarray(x, dtype=float))
        out = self.base.evaluate(x) - self.evaluate_smooth(x)
        return np.where(x < self.beta, out, 0.0)

    def smooth_at_zero(self) -> float:
        return float(
            self.v_at_beta - self.beta * self.dv_at_beta + 0.5 * self.lam * self.beta**2
        )

    def remainder_mass(self) -> float:
        xb = np.array([self.beta])
        # ∫_{-β}^{β} W = 2 [∫_0^β V - (∫_0^β V_β)]
        int_v = float(self.base.tail(np.zeros(1))[0] - self.base.tail(xb)[0])
        b = self.beta
        int_vb = (
            self.v_at_beta * b - 0.5 * b * b * self.dv_at_beta + self.lam * b**3 / 6.0
        )
        return 2.0 * (int_v - int_vb)


def regularize(V: InteractionPotential, beta: float) -> RegularizedPotential:
    if not 0.0 < beta <= V.delta:
        raise ValueError(f"beta must lie in (0, delta={V.delta}], got {beta}")
    xb = np.array([beta])
    return RegularizedPotential(
        base=V,
        beta=beta,
        v_at_beta=float(V.evaluate(xb)[0]),
        dv_at_beta=float(V.derivative(xb)[0]),
        lam=V.lam,
    )


# ----------------------------------------------------------------------
# assumption checks
# ----------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class AssumptionReport:
    """Outcome of the structural checks on a kernel.

    `checks` maps a check name to (passed, constant, detail); `constant`
    is the empirical constant witnessing the bound where applicable.
    """

    kernel: str
    checks: dict

    @property
    def all_passed(self) -> bool:
        return all(item[0] for item in self.checks.values())

    def lines(self):
        out = [f"kernel: {self.kernel}"]
        for key, (ok, const, detail) in self.checks.items():
            tag = "PASS" if ok else "FAIL"
            cs = f" const={const:.6g}" if const is not None else ""
            out.append(f"  [{tag}] {key}{cs}: {detail}")
        out.append(f"overall: {'PASS' if self.all_passed else 'FAIL'}")
        return out


def verify_assumptions(V: InteractionPotential, n_grid: int = 2000) -> AssumptionReport:
    """Check the structural hypotheses a kernel must satisfy.

    Evenness, nonnegativity, monotone decay, convexity (with the (0, delta)
    floor lam), unit mass, finite first moment, the |x|^-a singularity bound
    near 0, and strict positivity of the Fourier transform with an ω^-2
    lower envelope.
    """
    checks = {}
    xs = np.geomspace(1e-8, V.x_decay, n_grid)

    vp = V.evaluate(xs)
    vm = V.evaluate(-xs)
    err = float(np.max(np.abs(vp - vm) / np.maximum(np.abs(vp), 1e-300)))
    checks["even"] = (err < 1e-12, None, f"max relative asymmetry {err:.2e}")

    neg = float(np.min(vp))
    checks["nonnegative"] = (neg >= -1e-14, None, f"min V = {neg:.2e}")

    d1 = V.derivative(xs)
    worst = float(np.max(d1))
    checks["non_increasing"] = (worst <= 1e-12, None, f"max V' on (0,inf) = {worst:.2e}")

    d2 = V.second_derivative(xs)
    worst2 = float(np.min(d2))
    checks["convex"] = (worst2 >= -1e-10, None, f"min V'' on (0,inf) = {worst2:.2e}")

    inner = xs[xs <= V.delta]
    floor = float(np.min(V.second_derivative(inner)))
    checks["convexity_floor"] = (
        floor >= V.lam - 1e-9 * max(abs(V.lam), 1.0),
        floor,
        f"min V'' on (0,{V.delta:g}) = {floor:.6g} vs lam = {V.lam:.6g}",
    )

    mass = 2.0 * float(tail_integral(V, np.zeros(1))[0])
    checks["unit_mass"] = (abs(mass - 1.0) < 1e-8, mass, f"∫V = {mass:.12g}")

    m1 = quadrature.composite_gl(
        lambda t: t * V.evaluate(t),
        np.concatenate([[0.0], np.geomspace(1e-6, V.x_decay, 40)]),
        refine=(0.0,),
    )
    checks["first_moment"] = (np.isfinite(m1) and m1 > 0, 2.0 * m1, f"∫|x|V = {2*m1:.6g}")

    zz = np.geomspace(1e-10, 0.5, 400)
    if V.a == 0.0:
        bound = 1.0 + np.abs(np.log(zz))
    else:
        bound = zz**-V.a
    cs = float(np.max(V.evaluate(zz) / bound))
    checks["singularity_bound"] = (
        np.isfinite(cs),
        cs,
        f"max V/bound on (0,1/2) = {cs:.6g} (a = {V.a:g})",
    )

    ww = np.concatenate([[0.0], np.geomspace(1e-4, 100.0, 600)])
    fv = V.fourier(ww)
    envelope = np.minimum(1.0, np.where(ww > 1.0, ww, 1.0) ** -2)
    cmin = float(np.min(fv / envelope))
    checks["fourier_positive"] = (
        cmin > 0.0,
        cmin,
        f"min v(ω)/min(1,ω^-2) on [0,100] = {cmin:.6g}",
    )

    return AssumptionReport(kernel=V.name, checks=checks)
