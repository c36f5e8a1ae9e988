"""Interaction kernels: values, derivatives, tails, Fourier transforms.

Frozen oracles below were computed independently with 40-digit arithmetic
from the defining formulas (x coth x - log(2 sinh x) for the barrier kernel,
its exact derivatives, tail integrals by adaptive quadrature, and the cosine
transform by oscillatory quadrature), then rounded to double precision.
"""

import numpy as np
import pytest

from blayer import (
    make_potential,
    make_power_potential,
    make_table_potential,
    make_wall_potential,
    regularize,
    tail_integral,
    verify_assumptions,
)
from blayer.quadrature import cosine_transform

# x -> (V(x), V'(x), V''(x), tail(x)) for the normalized barrier kernel
WALL_ORACLE = {
    0.125: (0.72613684452113621, -2.4190827401012883, 19.554042471328256, 0.37130329141690056),
    0.5: (0.3163202322906315, -0.55970242988027334, 1.3029351078739263, 0.19395666759612202),
    1.0: (0.13935170795222219, -0.22008835355743096, 0.3578791947392873, 0.086819905282593059),
    3.0: (0.005286321093510336, -0.0090863937697878077, 0.015234305159501916, 0.0030170747360818926),
    10.0: (1.3156827082205081e-8, -2.506062306660761e-8, 4.7615184033169635e-8, 6.8916713216870664e-9),
    25.0: (2.9899752284489525e-21, -5.8626965263704951e-21, 1.149088519168617e-20, 1.5243010968563287e-21),
}
WALL_FOURIER_ORACLE = {
    0.0: 1.0,
    0.5: 0.30368462525699538,
    2.0: 0.075990887731753287,
    10.0: 0.015198177546349854,
}
WALL_LAM = 0.3578791947392873


def test_wall_pointwise_against_frozen_oracle():
    V = make_wall_potential()
    for x, (v, d1, d2, t) in WALL_ORACLE.items():
        xa = np.array([x])
        assert abs(V.evaluate(xa)[0] - v) <= 1e-14 * abs(v)
        assert abs(V.derivative(xa)[0] - d1) <= 1e-13 * abs(d1)
        assert abs(V.second_derivative(xa)[0] - d2) <= 1e-13 * abs(d2)
        assert abs(V.tail(xa)[0] - t) <= 1e-12 * abs(t)


def test_wall_fourier_against_frozen_oracle():
    V = make_wall_potential()
    for w, vw in WALL_FOURIER_ORACLE.items():
        got = V.fourier(np.array([w]))[0]
        assert abs(got - vw) <= 1e-12 * max(abs(vw), 1.0)


def test_wall_metadata():
    V = make_wall_potential()
    assert V.a == 0.0
    assert V.delta == 1.0
    assert abs(V.lam - WALL_LAM) <= 1e-13


def test_wall_evenness_and_symmetry_of_derivative():
    V = make_wall_potential()
    x = np.linspace(0.01, 20.0, 57)
    assert np.allclose(V.evaluate(-x), V.evaluate(x), rtol=0, atol=0)


def test_wall_branches_join_smoothly():
    # branch points of the stable evaluations: no jumps at x = 0.5, 7, 18
    V = make_wall_potential()
    for x0 in (0.5, 7.0, 18.0):
        lo = np.array([x0 * (1.0 - 2**-40)])
        hi = np.array([x0 * (1.0 + 2**-40)])
        for f in (V.evaluate, V.derivative, V.second_derivative, V.tail):
            a, b = f(lo)[0], f(hi)[0]
            assert abs(a - b) <= 1e-10 * max(abs(a), abs(b))


def test_wall_tail_consistent_with_quadrature_of_v():
    # tail(a) - tail(b) = integral of V over [a, b], both branches covered
    from blayer.quadrature import composite_gl

    V = make_wall_potential()
    for a, b in ((0.2, 1.0), (1.0, 5.0), (5.0, 9.0), (9.0, 14.0)):
        diff = float(V.tail(np.array([a]))[0] - V.tail(np.array([b]))[0])
        ref = composite_gl(lambda t: V.evaluate(t), [a, b])
        # both sides are differences of O(1e-4..1) quantities, so allow a
        # few ulps of those rather than of the (possibly tiny) difference
        scale = max(abs(ref), float(V.tail(np.array([a]))[0]))
        assert abs(diff - ref) < 1e-12 * scale


def test_power_kernel_closed_forms():
    from scipy.special import gamma as Gamma

    a = 0.5
    V = make_power_potential(a)
    c = 1.0 / (2.0 * Gamma(1.0 - a))
    x = np.array([0.3, 1.0, 4.0])
    assert np.allclose(V.evaluate(x), c * x**-a * np.exp(-x), rtol=1e-14)
    # unit mass and Fourier normalization
    assert abs(tail_integral(V, 0.0) - 0.5) < 1e-12
    assert abs(V.fourier(np.zeros(1))[0] - 1.0) < 1e-13
    # closed-form transform vs numeric cosine transform
    # the graded quadrature leaves a ~1e-8 floor from the |x|^{-1/2}
    # singularity guard; the closed form is exact, so compare loosely
    w = np.array([0.0, 0.3, 1.5, 6.0])
    num = cosine_transform(lambda t: V.evaluate(t), w, x_max=60.0)
    assert np.max(np.abs(num - V.fourier(w))) < 1e-7


def test_make_potential_specs():
    assert make_potential("wall").name == "wall"
    assert make_potential("power:0.25").a == 0.25
    with pytest.raises(Exception):
        make_potential("power:1.5")  # a must lie in [0, 1)
    with pytest.raises(Exception):
        make_potential("nonsense")


def test_table_potential_roundtrip():
    # tabulated kernels are bounded, so sample away from the singularity;
    # the table is renormalized to unit mass, so a truncated table of a
    # singular kernel reproduces the shape up to one constant scale factor
    V = make_wall_potential()
    x = np.geomspace(0.05, 30.0, 4001)
    T = make_table_potential(x, V.evaluate(x))
    xs = np.linspace(0.1, 20.0, 101)
    ratio = T.evaluate(xs) / V.evaluate(xs)
    assert np.ptp(ratio) < 1e-5 * float(np.mean(ratio))
    assert T.a == 0.0


def test_regularization_split_identities():
    V = make_wall_potential()
    rng = np.random.default_rng(3)
    x = rng.uniform(0.0, 3.0, 200)
    for beta in (0.1, 0.01, 0.001):
        R = regularize(V, beta)
        vb = R.evaluate_smooth(x)
        wb = R.evaluate_remainder(x)
        # exact split, ordering and support
        assert np.allclose(vb + wb, V.evaluate(x), rtol=1e-13, atol=1e-15)
        assert np.all(wb >= -1e-15)
        assert np.all(vb >= -1e-15)
        assert np.all(vb <= V.evaluate(x) + 1e-15)
        outside = np.abs(x) > beta
        assert np.all(wb[outside] == 0.0)
        # V^beta peaks at the origin and is non-increasing
        z = np.linspace(0.0, 2.0, 400)
        vz = R.evaluate_smooth(z)
        assert R.smooth_at_zero() >= np.max(vz) - 1e-13
        assert np.all(np.diff(vz) <= 1e-13)


def test_regularize_rejects_bad_beta():
    V = make_wall_potential()
    with pytest.raises(ValueError):
        regularize(V, 0.0)
    with pytest.raises(ValueError):
        regularize(V, 2.0)  # beyond the convexity radius delta = 1


def test_structural_assumptions_wall_and_power():
    for V in (make_wall_potential(), make_power_potential(0.5)):
        report = verify_assumptions(V)
        assert report.all_passed, "\n".join(report.lines())
