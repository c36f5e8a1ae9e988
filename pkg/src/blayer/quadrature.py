"""Graded-panel Gauss quadrature helpers.

The interaction kernels handled here are integrable but singular at the
origin (logarithmic or |x|^-a), and the densities they are convolved with
are only piecewise smooth.  All routines therefore work on explicit panel
decompositions: panel edges are placed at every known kink, and panels are
geometrically refined toward singular points, which gives near-spectral
accuracy for kernel singularities with any exponent a in [0, 1).
"""

from __future__ import annotations

import functools

import numpy as np

__all__ = [
    "gauss_panels",
    "graded_edges",
    "composite_gl",
    "conv_kernel_density",
    "cosine_transform",
]


@functools.lru_cache(maxsize=8)
def _leggauss(order: int):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return nodes, weights


def gauss_panels(edges, order: int = 12):
    """Gauss-Legendre nodes/weights on the panels defined by `edges`."""
    edges = np.asarray(edges, dtype=float)
    t, w = _leggauss(order)
    a = edges[:-1]
    half = 0.5 * (edges[1:] - a)
    nodes = (a + half)[:, None] + half[:, None] * t[None, :]
    weights = half[:, None] * w[None, :]
    return nodes.ravel(), weights.ravel()


def graded_edges(
    a: float,
    b: float,
    toward: str,
    w0: float,
    ratio: float = 2.0,
    w_max: float = np.inf,
):
    """Panel edges on [a, b], width growing geometrically away from one end.

    `w0` is the width of the panel touching the graded end; widths grow by
    `ratio` (capped at `w_max`, useful when the integrand also has a fixed
    variation scale away from the singularity) until the interval is covered.
    """
    length = b - a
    if length <= 0.0:
        return np.array([a, b])
    w0 = min(max(w0, length * 1e-16), length)
    offs = [0.0]
    w = w0
    while offs[-1] < length:
        offs.append(min(offs[-1] + min(w, w_max), length))
        w *= ratio
    offs = np.asarray(offs)
    if toward == "left":
        return a + offs
    return b - offs[::-1]


def composite_gl(f, splits, order: int = 16, refine=(), grade_panels: int = 40):
    """Integrate f over [splits[0], splits[-1]] with panels split at `splits`.

    Sub-intervals whose endpoint appears in `refine` are geometrically graded
    toward that endpoint (for integrable endpoint singularities or
    boundary-layer behaviour); the rest use a single Gauss panel.
    """
    splits = np.asarray(sorted(set(splits)), dtype=float)
    refine = set(refine)
    total = 0.0
    for a, b in zip(splits[:-1], splits[1:]):
        if a in refine and b in refine:
            m = 0.5 * (a + b)
            edges = np.concatenate(
                [
                    graded_edges(a, m, "left", (m - a) * 2.0**-grade_panels),
                    graded_edges(m, b, "right", (b - m) * 2.0**-grade_panels)[1:],
                ]
            )
        elif a in refine:
            edges = graded_edges(a, b, "left", (b - a) * 2.0**-grade_panels)
        elif b in refine:
            edges = graded_edges(a, b, "right", (b - a) * 2.0**-grade_panels)
        else:
            edges = np.array([a, b])
        nodes, weights = gauss_panels(edges, order)
        total += float(np.dot(weights, f(nodes)))
    return total


def _panel_edges_for_point(a: float, b: float, y: float, grade_panels: int):
    """Edges on [a, b] graded toward the end closest to y.

    When y coincides with an endpoint the grading resolves the kernel
    singularity there; when y is merely close, the initial width is tied to
    the distance so the kernel's rapid variation is still resolved.
    """
    d_a, d_b = abs(y - a), abs(y - b)
    length = b - a
    # absolute floor: panels thinner than a few ulps of the endpoint would
    # round their Gauss nodes onto the singular point itself
    floor = max(abs(a), abs(b)) * 2.0**-36
    if d_a <= d_b:
        w0 = max(0.5 * d_a, length * 2.0**-grade_panels, floor)
        return graded_edges(a, b, "left", w0)
    w0 = max(0.5 * d_b, length * 2.0**-grade_panels, floor)
    return graded_edges(a, b, "right", w0)


def conv_kernel_density(
    kernel,
    density,
    y,
    lo: float,
    hi: float,
    kinks=(),
    order: int = 12,
    grade_panels: int = 48,
    chunk: int = 256,
):
    """(kernel * density)(y) = ∫_lo^hi kernel(y - z) density(z) dz, pointwise.

    `kernel` must be even and vectorized (it receives |y - z|); `density`
    vectorized on [lo, hi].  `kinks` lists interior points where the density
    is not smooth; they become mandatory panel edges, as does y itself.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    base = sorted({float(lo), float(hi), *(float(k) for k in kinks if lo < k < hi)})
    out = np.empty_like(y)
    for start in range(0, y.size, chunk):
        ys = y[start : start + chunk]
        nodes_parts, weight_parts, ypos_parts, owner_parts = [], [], [], []
        for j, yj in enumerate(ys):
            pts = list(base)
            # an evaluation point essentially on top of an existing split is
            # not inserted: the grading toward that split already resolves it
            if lo < yj < hi and min(abs(yj - p) for p in pts) > abs(yj) * 2.0**-36:
                pts = sorted(pts + [yj])
            for a, b in zip(pts[:-1], pts[1:]):
                edges = _panel_edges_for_point(a, b, yj, grade_panels)
                nodes, weights = gauss_panels(edges, order)
                nodes_parts.append(nodes)
                weight_parts.append(weights)
                ypos_parts.append(np.full(nodes.size, yj))
                owner_parts.append(np.full(nodes.size, j, dtype=np.intp))
        nodes = np.concatenate(nodes_parts)
        weights = np.concatenate(weight_parts)
        ypos = np.concatenate(ypos_parts)
        owner = np.concatenate(owner_parts)
        vals = kernel(np.abs(ypos - nodes)) * density(nodes)
        out[start : start + chunk] = np.bincount(
            owner, weights=weights * vals, minlength=ys.size
        )
    return out


def cosine_transform(f, omega, x_max: float, order: int = 12, grade_panels: int = 40):
    """2 ∫_0^∞ f(x) cos(2π x ω) dx for an even, decaying f singular at 0.

    Integration is truncated at x_max (caller picks it from the kernel's
    decay); panels are graded toward 0 and then sized to resolve the fastest
    oscillation present in `omega`.
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    w_max = float(np.max(np.abs(omega))) if omega.size else 0.0
    x0 = min(0.5, x_max)
    edges0 = graded_edges(0.0, x0, "left", x0 * 2.0**-grade_panels)
    width = min(1.0, 0.25 / w_max) if w_max > 0 else x_max
    n_uniform = max(1, int(np.ceil((x_max - x0) / width)))
    edges1 = np.linspace(x0, x_max, n_uniform + 1)
    edges = np.concatenate([edges0, edges1[1:]])
    nodes, weights = gauss_panels(edges, order)
    fw = f(nodes) * weights
    return 2.0 * (np.cos(2.0 * np.pi * np.outer(omega, nodes)) @ fw)
