"""Command-line interface: simulate, certify, operators.

Exit codes: 0 success, 1 verdict contradiction, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import json
import sys
import warnings
from pathlib import Path

import click
import numpy as np

from . import __version__
from .config import ConfigError, build_potential, initial_state, parse_config
from .conservation import classify
from .lagrangian import inverse_legendre, legendre, step_second_order
from .mesh import Boundary, decay_margin, inner_product
from .operators import build_dtilde0, compute_c, dtilde0_symbol
from .suites import CERTIFY_SUITES, build_functionals, run_suite
from .systems import IntegrationError, nls_system, step_midpoint, step_rk4, wave_system

EXIT_OK = 0
EXIT_CONTRADICTION = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

SUMMARY_SCHEMA_VERSION = 1


@click.group()
@click.version_option(__version__)
def main():
    """Semidiscrete canonical lattice systems: simulation and certification."""


@main.command()
@click.option(
    "--config", "config_path", required=True, type=click.Path(exists=True),
    help="INI-style run configuration file.",
)
@click.option(
    "--formulation",
    type=click.Choice(["canonical", "lagrangian"]),
    default="canonical",
    show_default=True,
    help="Integrate the canonical pair or (wave only) the second-order form.",
)
def simulate(config_path, formulation):
    """Run one configured simulation and write trajectory/functional CSVs."""
    try:
        cfg = parse_config(Path(config_path).read_text())
    except ConfigError as exc:
        for line in exc.errors:
            click.echo(f"config error: {line}", err=True)
        sys.exit(EXIT_CONFIG)

    if formulation == "lagrangian" and cfg.system != "wave":
        click.echo("config error: lagrangian formulation applies to the wave "
                   "system only", err=True)
        sys.exit(EXIT_CONFIG)

    potential = build_potential(cfg)
    sys_spec = (wave_system if cfg.system == "wave" else nls_system)(potential)
    try:
        functionals = build_functionals(cfg, sys_spec)
        state = initial_state(cfg)
    except (KeyError, ValueError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)

    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    n_steps = int(round(cfg.t_end / cfg.dt))

    times = [state.t]
    samples = [[f.value(state.t, state.v, state.w)] for f in functionals]
    try:
        with open(outdir / "trajectory.csv", "w") as traj:
            cols = ",".join(f"j{j}" for j in range(cfg.n_points))
            traj.write(f"t,field,{cols}\n")

            def snapshot(st):
                for kind, fld in (("v", st.v), ("w", st.w)):
                    row = ",".join(f"{val:.17g}" for val in fld.values)
                    traj.write(f"{st.t:.17g},{kind},{row}\n")
                if st.mesh.boundary is Boundary.COMPACT_SUPPORT:
                    margin = max(decay_margin(st.v), decay_margin(st.w))
                    if margin > cfg.decay_threshold:
                        warnings.warn(
                            f"decay margin {margin:.3e} exceeds threshold "
                            f"{cfg.decay_threshold:.3e} at t={st.t:.6g}"
                        )

            snapshot(state)
            second_order = inverse_legendre(state) if formulation == "lagrangian" else None
            for step in range(1, n_steps + 1):
                if formulation == "lagrangian":
                    second_order = step_second_order(
                        potential, second_order, cfg.dt, cfg.integrator,
                        cfg.newton_tol, cfg.max_iter,
                    )
                    state = legendre(second_order)
                elif cfg.integrator == "midpoint":
                    state = step_midpoint(
                        sys_spec, state, cfg.dt, cfg.newton_tol, cfg.max_iter
                    )
                else:
                    state = step_rk4(sys_spec, state, cfg.dt)
                if step % cfg.stride == 0 or step == n_steps:
                    snapshot(state)
                    times.append(state.t)
                    for vals, f in zip(samples, functionals):
                        vals.append(f.value(state.t, state.v, state.w))
    except IntegrationError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)

    with open(outdir / "functionals.csv", "w") as fcsv:
        fcsv.write("t," + ",".join(f.name for f in functionals) + "\n")
        for i, t in enumerate(times):
            row = ",".join(f"{vals[i]:.17g}" for vals in samples)
            fcsv.write(f"{t:.17g},{row}\n")

    reports = [
        classify(f.name, np.array(times), np.array(vals), cfg.tol,
                 affine_permitted=not f.time_dependent)
        for f, vals in zip(functionals, samples)
    ]
    summary = {
        "schema_version": SUMMARY_SCHEMA_VERSION,
        "formulation": formulation,
        "config": {
            "system": cfg.system, "potential": cfg.potential,
            "coefficient": cfg.coefficient, "h": cfg.h,
            "n_points": cfg.n_points, "x0": cfg.x0,
            "boundary": cfg.boundary.value, "integrator": cfg.integrator,
            "dt": cfg.dt, "t_end": cfg.t_end, "newton_tol": cfg.newton_tol,
            "dtilde_p": cfg.dtilde_p, "dtilde_tol": cfg.dtilde_tol,
            "stride": cfg.stride, "tolerance": cfg.tol,
        },
        "reports": [
            {
                "name": r.name,
                "drift_raw": r.drift_raw,
                "drift_affine": r.drift_affine,
                "affine_permitted": r.affine_permitted,
                "verdict": r.verdict.value,
            }
            for r in reports
        ],
    }
    (outdir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    for r in reports:
        click.echo(f"{r.name}: {r.verdict.value} (drift {r.drift_abs:.3e})")
    sys.exit(EXIT_OK)


@main.command()
@click.argument("names", nargs=-1)
@click.option("--list", "list_suites", is_flag=True, help="List available suites.")
@click.option("--fast", is_flag=True, help="Short-horizon smoke variant.")
def certify(names, list_suites, fast):
    """Run predefined certification suites; nonzero exit on contradiction."""
    if list_suites:
        for name in sorted(CERTIFY_SUITES):
            click.echo(name)
        sys.exit(EXIT_OK)
    if not names:
        click.echo("config error: give suite names or --list", err=True)
        sys.exit(EXIT_CONFIG)
    all_passed = True
    for name in names:
        if name not in CERTIFY_SUITES:
            click.echo(
                f"config error: unknown suite {name!r}; try certify --list",
                err=True,
            )
            sys.exit(EXIT_CONFIG)
        try:
            outcome = run_suite(name, fast=fast)
        except IntegrationError as exc:
            click.echo(f"numerical failure in suite {name}: {exc}", err=True)
            sys.exit(EXIT_NUMERICAL)
        click.echo(outcome.summary())
        all_passed &= outcome.passed
    sys.exit(EXIT_OK if all_passed else EXIT_CONTRADICTION)


@main.group()
def operators():
    """Inspect and verify the nonlocal shift-series operator."""


@operators.command()
@click.option("--p", "P", default=64, show_default=True, type=int)
@click.option("--tol", default=1e-12, show_default=True, type=float)
def dump(P, tol):
    """Emit (p, c_p, tail bound) as CSV."""
    if P < 0 or tol <= 0:
        click.echo("config error: need p >= 0 and tol > 0", err=True)
        sys.exit(EXIT_CONFIG)
    from . import _series

    series = compute_c(P, tol)
    click.echo("p,c_p,tail_estimate")
    for p, (cp, k_stop) in enumerate(zip(series.c, series.stop_indices)):
        click.echo(f"{p},{cp:.17g},{_series.tail_bound(p, int(k_stop)):.6g}")
    sys.exit(EXIT_OK)


@operators.command()
@click.option("--p", "P", default=16, show_default=True, type=int)
@click.option("--tol", default=1e-10, show_default=True, type=float)
def verify(P, tol):
    """Run skew-adjointness and Fourier-symbol checks on the operator."""
    if P < 1 or tol <= 0:
        click.echo("config error: need p >= 1 and tol > 0", err=True)
        sys.exit(EXIT_CONFIG)
    from .mesh import Mesh, LatticeField

    op = build_dtilde0(P, tol)
    series = compute_c(P, tol)
    rng = np.random.default_rng(0)
    ok = True

    for n in (64, 256):
        mesh = Mesh(h=0.1, n_points=n)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            for _ in range(5):
                u = LatticeField(mesh, rng.normal(size=n))
                v = LatticeField(mesh, rng.normal(size=n))
                defect = abs(
                    inner_product(v, op.apply(u)) + inner_product(u, op.apply(v))
                )
                norm = np.linalg.norm(u.values) * np.linalg.norm(v.values)
                if defect >= 1e-13 * norm:
                    ok = False
                    click.echo(f"skew-adjointness FAILED on n={n}: {defect:.3e}")
        click.echo(f"skew-adjointness on n={n}: ok")

    h = 0.1
    for kh in (0.2, 0.5, 1.0):
        kappa = kh / h
        err = abs(dtilde0_symbol(series, kappa, h) - kappa)
        click.echo(f"symbol error at kappa*h={kh}: {err:.3e}")
        if err > 0.05 * kappa:
            ok = False
            click.echo(f"symbol accuracy FAILED at kappa*h={kh}")

    sys.exit(EXIT_OK if ok else EXIT_CONTRADICTION)


if __name__ == "__main__":
    main()
