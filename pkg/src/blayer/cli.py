"""Command-line front end.

Subcommands:

  continuum          solve for C_U and ρ*, write a summary and a ρ* table
  minimize           run the discrete minimizer for every configured n
  boundary-layer     solve the obstacle problem for ν*, write the profile
  sweep              full Γ-trend sweep: one CSV row per (n, γ_n) plus a
                     JSON-lines log of solver residuals
  compare            plot-data CSVs (x, crosses, ρ*^γ) for completed runs
  verify-assumptions structural checks on the interaction kernel

Common flags: --config FILE, --out DIR, --threads N, --seed N.  The
BLAYER_THREADS environment variable is the fallback for --threads.  Exit
codes: 0 success, 1 solver failure, 2 configuration error.  All files are
written atomically (temp file + rename) and floats carry 17 significant
digits, so reruns with the same config produce byte-identical output.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import tempfile

__all__ = ["main"]


def _fmt(x) -> str:
    if isinstance(x, float):
        return "%.17g" % x
    return str(x)


def _write_atomic(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _write_csv(path: str, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    _write_atomic(path, "\n".join(lines) + "\n")


def _write_summary(path: str, items):
    _write_atomic(path, "".join(f"{k} = {_fmt(v)}\n" for k, v in items))


def _set_threads(threads):
    if threads is None:
        threads = os.environ.get("BLAYER_THREADS")
    if threads is None:
        return
    t = str(int(threads))
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, t)


def _load(args):
    """Config + model objects.  Imports are deferred so that --threads can
    cap the BLAS pool before numpy is first loaded."""
    from .config import ExperimentConfig, load_config
    from .confinement import make_confinement
    from .potentials import make_potential

    if args.config is not None:
        cfg = load_config(args.config)
    else:
        cfg = ExperimentConfig()
    if args.out is not None:
        cfg = dataclasses.replace(cfg, out=args.out)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    V = make_potential(cfg.kernel)
    U = make_confinement(cfg.confinement)
    return cfg, V, U


def _positions_path(out: str, n: int) -> str:
    return os.path.join(out, f"positions_n{n}.csv")


def _save_positions(out: str, cfg_particles, info):
    n = cfg_particles.n
    _write_csv(
        _positions_path(out, n),
        ["i", "x"],
        [(i, float(x)) for i, x in enumerate(cfg_particles.positions)],
    )
    return {
        "n": n,
        "gamma": cfg_particles.gamma,
        "grad_norm": info.grad_norm,
        "iterations": info.iterations,
    }


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def _cmd_continuum(args) -> int:
    import numpy as np

    from .continuum import energy_E, solve_continuum

    cfg, V, U = _load(args)
    cd = solve_continuum(U)
    _write_summary(
        os.path.join(cfg.out, "continuum_summary.txt"),
        [
            ("C_U", cd.C_U),
            ("rho0", cd.rho0),
            ("x_max", cd.x_max),
            ("support", ";".join("%.17g:%.17g" % iv for iv in cd.support)),
            ("energy", energy_E(cd)),
        ],
    )
    xs = np.linspace(0.0, cd.x_max * 1.25, 2049)
    _write_csv(
        os.path.join(cfg.out, "continuum_density.csv"),
        ["x", "rho"],
        zip(xs.tolist(), cd.rho(xs).tolist()),
    )
    return 0


def _cmd_minimize(args) -> int:
    from .continuum import solve_continuum
    from .discrete import minimize, quantile_init

    cfg, V, U = _load(args)
    cd = solve_continuum(U)
    summary = []
    for row in cfg.rows(V.a):
        n, gamma = row["n"], row["gamma"]
        x0 = quantile_init(cd, n, gamma)
        xstar, info = minimize(x0, V, U)
        _save_positions(cfg.out, xstar, info)
        summary.append((n, gamma, info.energy, info.grad_norm, info.iterations))
    _write_csv(
        os.path.join(cfg.out, "minimize_summary.csv"),
        ["n", "gamma", "energy", "grad_norm", "iterations"],
        summary,
    )
    return 0


def _cmd_boundary_layer(args) -> int:
    from .boundary_layer import minimize_F
    from .continuum import solve_continuum

    cfg, V, U = _load(args)
    cd = solve_continuum(U)
    prof = minimize_F(V, cd.rho0, L=cfg.L, K=cfg.K, tol=cfg.tol)
    _write_summary(
        os.path.join(cfg.out, "boundary_layer_summary.txt"),
        [
            ("F", prof.F),
            ("rho0", prof.rho0),
            ("total_mass", prof.nu.total_mass()),
            ("kkt_residual", prof.kkt_residual),
            ("complementarity", prof.complementarity),
            ("iterations", prof.iterations),
        ],
    )
    _write_csv(
        os.path.join(cfg.out, "boundary_layer_profile.csv"),
        ["x", "nu"],
        zip(prof.nu.x.tolist(), prof.nu.values.tolist()),
    )
    return 0


def _cmd_sweep(args) -> int:
    from .boundary_layer import minimize_F
    from .continuum import solve_continuum
    from .diagnostics import gamma_sweep

    cfg, V, U = _load(args)
    cd = solve_continuum(U)
    prof = minimize_F(V, cd.rho0, L=cfg.L, K=cfg.K, tol=cfg.tol)
    log_rows = []
    csv_rows = []
    header = [
        "n", "gamma", "in_regime", "E_n", "F_n",
        "T1", "T2", "T3", "T4", "T5",
        "F_limit", "F_gap_to_limit", "vague_distance", "error",
    ]

    def on_row(row):
        log_rows.append(
            {
                "n": row["n"],
                "gamma": row["gamma"],
                "grad_norm": row.get("grad_norm"),
                "iterations": row.get("iterations"),
                "term_residual": row.get("term_residual"),
                "error": row.get("error"),
            }
        )

    rows = gamma_sweep(
        V, cd, cfg.rows(V.a), profile=prof, vague_M=cfg.vague_M, on_row=on_row
    )
    failed = False
    for row in rows:
        err = row.get("error", "")
        if err:
            failed = True
        csv_rows.append(
            [
                row["n"], row["gamma"], int(row["in_regime"]),
                row.get("E_n", float("nan")), row.get("F_n", float("nan")),
                row.get("T1", float("nan")), row.get("T2", float("nan")),
                row.get("T3", float("nan")), row.get("T4", float("nan")),
                row.get("T5", float("nan")),
                prof.F, row.get("F_gap_to_limit", float("nan")),
                row.get("vague_distance", float("nan")), err,
            ]
        )
        pos = row.pop("positions", None)
        if pos is not None:
            _write_csv(
                _positions_path(cfg.out, row["n"]),
                ["i", "x"],
                [(i, float(x)) for i, x in enumerate(pos)],
            )
    _write_csv(os.path.join(cfg.out, "sweep.csv"), header, csv_rows)
    _write_atomic(
        os.path.join(cfg.out, "sweep_log.jsonl"),
        "".join(json.dumps(r, sort_keys=True) + "\n" for r in log_rows),
    )
    return 1 if failed else 0


def _cmd_compare(args) -> int:
    import numpy as np

    from .boundary_layer import minimize_F, profile_rho_star_gamma
    from .continuum import solve_continuum
    from .discrete import ParticleConfiguration, density_crosses, minimize, quantile_init

    cfg, V, U = _load(args)
    cd = solve_continuum(U)
    prof = minimize_F(V, cd.rho0, L=cfg.L, K=cfg.K, tol=cfg.tol)
    for row in cfg.rows(V.a):
        n, gamma = row["n"], row["gamma"]
        path = _positions_path(cfg.out, n)
        if os.path.exists(path):
            xs = np.loadtxt(path, delimiter=",", skiprows=1, usecols=1)
            xstar = ParticleConfiguration(xs, gamma)
        else:
            xstar, _ = minimize(quantile_init(cd, n, gamma), V, U)
        xc, crosses = density_crosses(xstar)
        rsg = profile_rho_star_gamma(prof, cd, gamma)
        _write_csv(
            os.path.join(cfg.out, f"compare_n{n}.csv"),
            ["x", "crosses", "rho_star_gamma"],
            zip(xc.tolist(), crosses.tolist(), rsg(xc).tolist()),
        )
    return 0


def _cmd_verify_assumptions(args) -> int:
    from .potentials import verify_assumptions

    cfg, V, U = _load(args)
    report = verify_assumptions(V)
    text = "\n".join(report.lines()) + "\n"
    sys.stdout.write(text)
    _write_atomic(os.path.join(cfg.out, "assumptions.txt"), text)
    return 0 if report.all_passed else 1


# ----------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blayer",
        description="barrier boundary layers of repelling-particle minimizers",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "continuum": _cmd_continuum,
        "minimize": _cmd_minimize,
        "boundary-layer": _cmd_boundary_layer,
        "sweep": _cmd_sweep,
        "compare": _cmd_compare,
        "verify-assumptions": _cmd_verify_assumptions,
    }
    for name, fn in commands.items():
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="experiment config file")
        p.add_argument("--out", default=None, help="output directory override")
        p.add_argument("--threads", type=int, default=None,
                       help="cap BLAS/OpenMP threads (fallback: BLAYER_THREADS)")
        p.add_argument("--seed", type=int, default=None, help="seed override")
        p.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    _set_threads(args.threads)
    from .errors import BlayerError, ConfigError

    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except BlayerError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
