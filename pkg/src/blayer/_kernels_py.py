"""Pure-numpy fallback for the pairwise reductions.

Same contracts as the compiled module, but taking the kernel's vectorized
callables; works for any kernel family.  Rows are processed in blocks to
bound peak memory at large n.
"""

import numpy as np

_BLOCK = 256


def pair_energy(x, gamma, V):
    """sum over i > j of V(gamma (x_i - x_j))."""
    n = x.shape[0]
    total = 0.0
    for i0 in range(1, n, _BLOCK):
        i1 = min(i0 + _BLOCK, n)
        rows = np.arange(i0, i1)
        z = gamma * (x[i0:i1, None] - x[None, :])
        mask = np.arange(n)[None, :] < rows[:, None]
        vals = V.evaluate(np.where(mask, z, 1.0))
        total += float(np.sum(vals[mask]))
    return total


def pair_gradient(x, gamma, V):
    """out[i] = sum_{j<i} V'(gamma(x_i-x_j)) - sum_{j>i} V'(gamma(x_j-x_i))."""
    n = x.shape[0]
    out = np.zeros(n)
    for i0 in range(0, n, _BLOCK):
        i1 = min(i0 + _BLOCK, n)
        rows = np.arange(i0, i1)
        z = gamma * (x[i0:i1, None] - x[None, :])
        offdiag = np.arange(n)[None, :] != rows[:, None]
        d = V.derivative(np.where(offdiag, np.abs(z), 1.0))
        out[i0:i1] = np.sum(np.where(offdiag, np.sign(z) * d, 0.0), axis=1)
    return out


def pair_hessian(x, gamma, V):
    """H[i,i] = sum_{j!=i} V''(gamma|x_i-x_j|), H[i,j] = -V''(gamma|x_i-x_j|)."""
    n = x.shape[0]
    out = np.empty((n, n))
    for i0 in range(0, n, _BLOCK):
        i1 = min(i0 + _BLOCK, n)
        rows = np.arange(i0, i1)
        z = gamma * np.abs(x[i0:i1, None] - x[None, :])
        offdiag = np.arange(n)[None, :] != rows[:, None]
        w = V.second_derivative(np.where(offdiag, z, 1.0))
        out[i0:i1] = np.where(offdiag, -w, 0.0)
    np.fill_diagonal(out, -out.sum(axis=1))
    return out
