"""Compare the compiled pairwise kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [n ...]

Times pair_energy / pair_gradient / pair_hessian on random ordered
configurations for both backends and reports the speedup and the maximum
relative disagreement.  The fallback is always timed through
blayer._kernels_py; the compiled path is skipped if the extension is not
built.
"""

import sys
import time

import numpy as np


def _time(fn, *args, repeats=5):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(sizes):
    from blayer import _kernels_py, backend, make_wall_potential

    V = make_wall_potential()
    rng = np.random.default_rng(0)
    print(f"compiled extension available: {backend.COMPILED}")
    header = f"{'n':>6} {'op':>13} {'compiled':>12} {'fallback':>12} {'speedup':>8} {'max rel diff':>13}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        x = np.concatenate([[0.0], np.cumsum(rng.uniform(0.2, 1.5, n) / n)])
        gamma = n**0.25
        ops = [
            ("pair_energy", backend.pair_energy, _kernels_py.pair_energy),
            ("pair_gradient", backend.pair_gradient, _kernels_py.pair_gradient),
            ("pair_hessian", backend.pair_hessian, _kernels_py.pair_hessian),
        ]
        for name, fast, slow in ops:
            t_py, r_py = _time(slow, x, gamma, V)
            if backend.COMPILED:
                t_c, r_c = _time(fast, x, gamma, V)
                diff = np.max(np.abs(np.asarray(r_c) - np.asarray(r_py)))
                scale = np.max(np.abs(np.asarray(r_py)))
                print(
                    f"{n:>6} {name:>13} {t_c * 1e3:>10.2f}ms {t_py * 1e3:>10.2f}ms "
                    f"{t_py / t_c:>7.1f}x {diff / scale:>13.2e}"
                )
            else:
                print(f"{n:>6} {name:>13} {'-':>12} {t_py * 1e3:>10.2f}ms")


if __name__ == "__main__":
    main([int(a) for a in sys.argv[1:]] or [500, 2000, 5000])
