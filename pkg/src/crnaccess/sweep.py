"""Parameter sweeps over SU arrival/service rates, CSV emission, complexity."""

import csv
import dataclasses
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .basic import build_basic_generator, enumerate_basic
from .metrics import (BLOCKING_COLUMNS, CAPACITY_COLUMNS, HANDOFF_COLUMNS,
                      UTILIZATION_COLUMNS, MetricsReport, compute_metrics,
                      fmt_float, state_count_basic, state_count_reservation,
                      state_count_reservation_formula)
from .params import MODEL_BASIC, MODEL_RESERVATION, MODELS, ParamError, SystemParams
from .reservation import build_reservation_generator, enumerate_reservation
from .sim import SimConfig, SimEstimate, simulate, validate_config
from .solver import DEFAULT_DIRECT_TOL, solve_direct

AXIS_LAMBDA_S = "lambda_s"
AXIS_MU_S = "mu_s"

FAMILIES = (("capacity", CAPACITY_COLUMNS),
            ("utilization", UTILIZATION_COLUMNS),
            ("blocking", BLOCKING_COLUMNS),
            ("handoff", HANDOFF_COLUMNS))


class SweepError(RuntimeError):
    """A grid point failed; the message names the point and model."""


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    start: float
    stop: float
    steps: int
    models: tuple = MODELS
    with_simulation: bool = False
    sim: SimConfig | None = None

    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


def validate_spec(spec: SweepSpec) -> SweepSpec:
    if spec.axis not in (AXIS_LAMBDA_S, AXIS_MU_S):
        raise ParamError(f"unknown sweep axis '{spec.axis}'")
    if not spec.start < spec.stop:
        raise ParamError("sweep start >= stop")
    if spec.steps < 2:
        raise ParamError("sweep steps < 2")
    if not spec.models:
        raise ParamError("no model selected")
    for model in spec.models:
        if model not in MODELS:
            raise ParamError(f"unknown model '{model}'")
    if spec.with_simulation:
        if spec.sim is None:
            raise ParamError("with_simulation set but no simulation config")
        validate_config(spec.sim)
    return spec


def solve_model(p: SystemParams, model: str, tol: float = DEFAULT_DIRECT_TOL):
    """Build, solve and report one model; returns (space, gen, dist, report)."""
    if model == MODEL_BASIC:
        space = enumerate_basic(p)
        gen = build_basic_generator(p, space)
    else:
        space = enumerate_reservation(p)
        gen = build_reservation_generator(p, space)
    dist = solve_direct(gen, tol=tol)
    report = compute_metrics(space.states, dist.pi, p, model)
    return space, gen, dist, report


@dataclass
class PointResult:
    value: float
    model: str
    report: MetricsReport
    estimate: SimEstimate | None = None


def _point_seed(base_seed: int, point_idx: int, model_idx: int) -> int:
    seq = np.random.SeedSequence([base_seed, point_idx, model_idx])
    return int(seq.generate_state(1)[0])


def _eval_point(args) -> PointResult:
    p, spec, tol, value, point_idx, model = args
    try:
        _, _, _, report = solve_model(p, model, tol=tol)
        estimate = None
        if spec.with_simulation:
            cfg = dataclasses.replace(
                spec.sim, seed=_point_seed(spec.sim.seed, point_idx,
                                           MODELS.index(model)))
            estimate = simulate(p, model, cfg)
        return PointResult(value=value, model=model, report=report,
                           estimate=estimate)
    except Exception as exc:
        raise SweepError(
            f"grid point {spec.axis}={value:g} model={model}: {exc}") from exc


def evaluate_sweep(p: SystemParams, spec: SweepSpec,
                   tol: float = DEFAULT_DIRECT_TOL, workers: int = 1):
    """All grid point results in grid-then-model order."""
    validate_spec(spec)
    jobs = []
    for point_idx, value in enumerate(spec.grid()):
        point_params = dataclasses.replace(p, **{spec.axis: float(value)})
        for model in spec.models:
            jobs.append((point_params, spec, tol, float(value), point_idx, model))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_eval_point, jobs))
    return [_eval_point(job) for job in jobs]


def _family_csv(results, columns, with_sim: bool) -> str:
    header = ["model", "lambda_s", "mu_s"] + list(columns)
    if with_sim:
        header += [f"sim_{c}" for c in columns] + [f"ci_{c}" for c in columns]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for res in results:
        report = res.report
        row = [report.model, fmt_float(report.lambda_s), fmt_float(report.mu_s)]
        row += [fmt_float(getattr(report, c)) for c in columns]
        if with_sim:
            est = res.estimate
            mean = est.metrics_mean if est else {}
            ci = est.metrics_ci if est else {}
            row += [fmt_float(mean.get(c)) for c in columns]
            row += [fmt_float(ci.get(c)) for c in columns]
        writer.writerow(row)
    return buf.getvalue()


def run_sweep(p: SystemParams, spec: SweepSpec, out_dir,
              tol: float = DEFAULT_DIRECT_TOL, workers: int = 1,
              figures: bool = True) -> dict:
    """Evaluate the sweep and write CSVs, manifest and figures to out_dir.

    Returns {name: path} for everything written.  Output bytes are a pure
    function of (params, spec, tol), so repeated runs are identical.
    """
    results = evaluate_sweep(p, spec, tol=tol, workers=workers)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = {}
    for name, columns in FAMILIES:
        path = out / f"{name}.csv"
        path.write_text(_family_csv(results, columns, spec.with_simulation),
                        encoding="utf-8")
        written[name] = path
    if figures:
        from .plots import render_sweep_figures
        for name, path in render_sweep_figures(out, spec, results).items():
            written[name] = path

    manifest = {
        "tool": "crnaccess",
        "version": __version__,
        "params": p.to_dict(),
        "sweep": {
            "axis": spec.axis,
            "start": spec.start,
            "stop": spec.stop,
            "steps": spec.steps,
            "models": list(spec.models),
            "with_simulation": spec.with_simulation,
            "sim": None if spec.sim is None else {
                "horizon": spec.sim.horizon, "warmup": spec.sim.warmup,
                "replications": spec.sim.replications, "seed": spec.sim.seed},
        },
        "tol": tol,
        "outputs": sorted(path.name for path in written.values()),
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n",
                             encoding="utf-8")
    written["manifest"] = manifest_path
    return written


def reservation_count_report(p: SystemParams) -> dict:
    """Enumerated reservation state count against the closed-form value.

    The closed form assumes two PU-reserved channels; the reachable set is
    authoritative, so a mismatch is reported, not repaired.
    """
    enumerated = len(enumerate_reservation(p))
    formula = state_count_reservation(p.M)
    general = state_count_reservation_formula(p.M, p.M_rp)
    match = enumerated == formula
    if match:
        message = f"reservation states: {enumerated} (matches closed form)"
    else:
        message = (f"reservation states: enumerated {enumerated} vs closed form "
                   f"{formula} (difference {enumerated - formula:+d}; "
                   f"general form at M_rp={p.M_rp}: {general})")
    return {"enumerated": enumerated, "formula": formula,
            "formula_general": general, "match": match, "message": message}


def report_complexity(p: SystemParams, m_values) -> list:
    """Per-M state-count table: closed forms, enumerations, cubic ratios."""
    rows = []
    for M in m_values:
        pm = dataclasses.replace(p, M=int(M))
        formula_basic = state_count_basic(M)
        enum_basic = len(enumerate_basic(pm)) if M >= 0 else None
        formula_res = state_count_reservation(M)
        general_res = state_count_reservation_formula(M, p.M_rp)
        if pm.M1 >= 0 and pm.M2 >= 0 and M >= 1:
            enum_res = len(enumerate_reservation(pm))
        else:
            enum_res = None
        rows.append({
            "M": M,
            "formula_basic": formula_basic,
            "enumerated_basic": enum_basic,
            "basic_match": enum_basic == formula_basic,
            "formula_reservation": formula_res,
            "formula_reservation_general": general_res,
            "enumerated_reservation": enum_res,
            "reservation_match": enum_res == formula_res,
            "ratio_basic": (formula_basic / (M**3 / 6)) if M > 0 else None,
            "ratio_reservation": (formula_res / (M**3 / 3)) if M > 0 else None,
        })
    return rows
