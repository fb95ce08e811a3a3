"""Command-line front end.

Exit codes: 0 success, 1 validation/config error, 2 numerical failure.
"""

import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .basic import build_basic_generator, enumerate_basic
from .generator import GeneratorBuildError
from .metrics import reports_to_csv
from .params import (MODEL_BASIC, MODEL_RESERVATION, MODELS, ParamError,
                     load_params)
from .reservation import build_reservation_generator, enumerate_reservation
from .sim import ConfigInvalid, SimConfig, simulate
from .solver import (DEFAULT_DIRECT_TOL, SolverError, export_pi_csv,
                     solve_direct, solve_uniformization)
from .sweep import (SweepError, SweepSpec, report_complexity,
                    reservation_count_report, run_sweep, solve_model)

_VALIDATION_ERRORS = (ParamError, ConfigInvalid)
_NUMERICAL_ERRORS = (SolverError, SweepError, GeneratorBuildError)


def _run(action):
    try:
        return action()
    except _VALIDATION_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except _NUMERICAL_ERRORS as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(2)


def _models(model: str):
    if model == "both":
        return MODELS
    return (model,)


params_option = click.option("--params", "params_file", required=True,
                             type=click.Path(exists=True, dir_okay=False),
                             help="JSON file with the system parameters.")
model_option = click.option("--model", default="both",
                            type=click.Choice([MODEL_BASIC, MODEL_RESERVATION,
                                               "both"]),
                            show_default=True)
tol_option = click.option("--tol", default=DEFAULT_DIRECT_TOL, show_default=True,
                          help="Residual tolerance for the direct solve.")
out_option = click.option("--out", "out_dir", type=click.Path(file_okay=False),
                          required=True, help="Output directory.")


@click.group()
@click.version_option(version=__version__, prog_name="crnaccess")
def main():
    """Prioritized cognitive-radio channel-access models and tooling."""


@main.command()
@params_option
def validate(params_file):
    """Check a parameter file against the model invariants."""
    p = _run(lambda: load_params(params_file))
    click.echo(f"OK: M={p.M} k={p.k} M_rp={p.M_rp} M1_prime={p.M1_prime} "
               f"M_r2={p.M_r2} m={p.m} n={p.n} (M1={p.M1}, M2={p.M2})")


@main.command(name="enumerate")
@params_option
@model_option
@click.option("--export-generator", "export_dir",
              type=click.Path(file_okay=False),
              help="Also write `src dst rate label` dumps to this directory.")
def enumerate_cmd(params_file, model, export_dir):
    """Enumerate state spaces and report their sizes."""
    p = _run(lambda: load_params(params_file))

    def action():
        for name in _models(model):
            if name == MODEL_BASIC:
                space = enumerate_basic(p)
                gen = build_basic_generator(p, space)
                click.echo(f"basic: {len(space)} states")
            else:
                space = enumerate_reservation(p)
                gen = build_reservation_generator(p, space)
                click.echo(reservation_count_report(p)["message"])
            if export_dir:
                out = Path(export_dir)
                out.mkdir(parents=True, exist_ok=True)
                path = out / f"generator_{name}.txt"
                path.write_text(gen.export_triples(), encoding="utf-8")
                click.echo(f"wrote {path}")

    _run(action)


@main.command()
@params_option
@model_option
@tol_option
@out_option
def solve(params_file, model, tol, out_dir):
    """Solve stationary distributions by both methods and export pi as CSV."""
    p = _run(lambda: load_params(params_file))

    def action():
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name in _models(model):
            space, gen, dist, _ = solve_model(p, name, tol=tol)
            uni = solve_uniformization(gen)
            gap = float(np.abs(dist.pi - uni.pi).max())
            path = out / f"pi_{name}.csv"
            path.write_text(export_pi_csv(space, dist.pi), encoding="utf-8")
            click.echo(f"{name}: {len(space)} states, residual "
                       f"{dist.residual_inf:.3e}, method agreement {gap:.3e}, "
                       f"wrote {path}")

    _run(action)


@main.command()
@params_option
@model_option
@tol_option
@out_option
def metrics(params_file, model, tol, out_dir):
    """Compute capacity, utilization, blocking and handoff metrics."""
    p = _run(lambda: load_params(params_file))

    def action():
        reports = []
        for name in _models(model):
            _, _, _, report = solve_model(p, name, tol=tol)
            reports.append(report)
            click.echo(f"{name}: U={report.U:.6g} rho_1={report.rho_1:.6g} "
                       f"rho_2={report.rho_2:.6g} Pb_1={report.Pb_1:.6g} "
                       f"Pb_2={report.Pb_2:.6g}")
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / "metrics.csv"
        path.write_text(reports_to_csv(reports), encoding="utf-8")
        click.echo(f"wrote {path}")

    _run(action)


@main.command(name="simulate")
@params_option
@model_option
@out_option
@click.option("--horizon", default=1e6, show_default=True,
              help="Simulated seconds per replication.")
@click.option("--warmup", default=1e4, show_default=True,
              help="Discarded prefix in seconds.")
@click.option("--replications", default=10, show_default=True)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--cross-check", is_flag=True,
              help="Verify simulator event tables against the generator first.")
def simulate_cmd(params_file, model, out_dir, horizon, warmup, replications,
                 seed, cross_check):
    """Run the discrete-event simulation oracle."""
    p = _run(lambda: load_params(params_file))

    def action():
        cfg = SimConfig(horizon=horizon, warmup=warmup,
                        replications=replications, seed=seed)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name in _models(model):
            est = simulate(p, name, cfg, cross_check=cross_check)
            json_path = out / f"sim_{name}.json"
            json_path.write_text(est.to_json(), encoding="utf-8")
            csv_path = out / f"sim_{name}.csv"
            csv_path.write_text(est.csv_text(p), encoding="utf-8")
            click.echo(f"{name}: U={est.metrics_mean['U']:.6g} "
                       f"(ci {est.metrics_ci['U']:.2e}), wrote {json_path} "
                       f"and {csv_path}")

    _run(action)


@main.command()
@params_option
@out_option
@tol_option
@click.option("--axis", default="lambda_s", show_default=True,
              type=click.Choice(["lambda_s", "mu_s"]))
@click.option("--start", required=True, type=float)
@click.option("--stop", required=True, type=float)
@click.option("--steps", required=True, type=int)
@click.option("--model", default="both",
              type=click.Choice([MODEL_BASIC, MODEL_RESERVATION, "both"]),
              show_default=True)
@click.option("--with-simulation", is_flag=True)
@click.option("--horizon", default=1e6, show_default=True)
@click.option("--warmup", default=1e4, show_default=True)
@click.option("--replications", default=10, show_default=True)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--workers", default=1, show_default=True)
@click.option("--no-figures", is_flag=True, help="Skip PNG rendering.")
def sweep(params_file, out_dir, tol, axis, start, stop, steps, model,
          with_simulation, horizon, warmup, replications, seed, workers,
          no_figures):
    """Sweep an SU rate axis and write metric CSVs, figures and a manifest."""
    p = _run(lambda: load_params(params_file))

    def action():
        sim_cfg = None
        if with_simulation:
            sim_cfg = SimConfig(horizon=horizon, warmup=warmup,
                                replications=replications, seed=seed)
        spec = SweepSpec(axis=axis, start=start, stop=stop, steps=steps,
                         models=_models(model), with_simulation=with_simulation,
                         sim=sim_cfg)
        written = run_sweep(p, spec, out_dir, tol=tol, workers=workers,
                            figures=not no_figures)
        for name in sorted(written):
            click.echo(f"wrote {written[name]}")

    _run(action)


@main.command()
@params_option
@click.option("--m-max", default=12, show_default=True,
              help="Report state counts for M = 0..m-max.")
def complexity(params_file, m_max):
    """Closed-form state counts versus enumerated counts, per M."""
    p = _run(lambda: load_params(params_file))

    def action():
        rows = report_complexity(p, range(0, m_max + 1))
        header = (f"{'M':>3} {'basic_formula':>14} {'basic_enum':>11} "
                  f"{'match':>6} {'resv_formula':>13} {'resv_general':>13} "
                  f"{'resv_enum':>10} {'match':>6} {'ratio/M^3:6':>12} "
                  f"{'ratio/M^3:3':>12}")
        click.echo(header)
        def ratio(value):
            return f"{value:.4f}" if value is not None else "-"

        for row in rows:
            enum_res = row["enumerated_reservation"]
            click.echo(
                f"{row['M']:>3} {row['formula_basic']:>14} "
                f"{row['enumerated_basic']:>11} "
                f"{str(row['basic_match']):>6} "
                f"{row['formula_reservation']:>13} "
                f"{row['formula_reservation_general']:>13} "
                f"{enum_res if enum_res is not None else '-':>10} "
                f"{str(row['reservation_match']):>6} "
                f"{ratio(row['ratio_basic']):>12} "
                f"{ratio(row['ratio_reservation']):>12}")

    _run(action)


if __name__ == "__main__":
    main()
