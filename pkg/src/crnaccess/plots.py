"""Figure rendering for sweep output: one panel per metric family."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .metrics import (BLOCKING_COLUMNS, CAPACITY_COLUMNS, HANDOFF_COLUMNS,
                      UTILIZATION_COLUMNS)
from .params import MODEL_BASIC

_AXIS_LABEL = {"lambda_s": "SU arrival rate (calls/sec)",
               "mu_s": "SU service rate (calls/sec)"}
_YLABEL = {"capacity": "capacity (completed requests/sec)",
           "utilization": "spectrum utilization",
           "blocking": "blocking probability",
           "handoff": "handoff probability"}
_COLUMN_TAG = {"rho_1": "SU-1", "rho_2": "SU-2", "rho_r1": "SU-R1",
               "U": "", "Pb_1": "SU-1", "Pb_2": "SU-2", "Pb_r1": "SU-R1",
               "Ph_1": "SU-1", "Ph_2": "SU-2", "Ph_r1": "SU-R1"}

FAMILY_COLUMNS = (("capacity", CAPACITY_COLUMNS),
                  ("utilization", UTILIZATION_COLUMNS),
                  ("blocking", BLOCKING_COLUMNS),
                  ("handoff", HANDOFF_COLUMNS))


def _curve_label(model: str, column: str) -> str:
    tag = _COLUMN_TAG[column]
    return f"{model} {tag}".strip()


def render_sweep_figures(out_dir, spec, results) -> dict:
    """Render capacity/utilization/blocking/handoff PNGs next to the CSVs.

    Analytical metrics are drawn as lines; simulation estimates, when
    present, as error bars (95% CI).  Output bytes are deterministic for
    identical inputs.
    """
    grid = list(spec.grid())
    by_model = {}
    for res in results:
        by_model.setdefault(res.model, []).append(res)

    written = {}
    for family, columns in FAMILY_COLUMNS:
        fig, ax = plt.subplots(figsize=(7.0, 4.5))
        for model in spec.models:
            rows = by_model.get(model, [])
            for column in columns:
                if model == MODEL_BASIC and column.endswith("_r1"):
                    continue
                ys = [getattr(r.report, column) for r in rows]
                style = "-o" if model == MODEL_BASIC else "--s"
                line, = ax.plot(grid, ys, style, markersize=4,
                                label=_curve_label(model, column))
                if spec.with_simulation:
                    means = [r.estimate.metrics_mean.get(column) for r in rows]
                    cis = [r.estimate.metrics_ci.get(column) for r in rows]
                    if all(v is not None for v in means):
                        ax.errorbar(grid, means, yerr=cis, fmt="x",
                                    color=line.get_color(), capsize=3,
                                    linestyle="none",
                                    label=_curve_label(model, column) + " (sim)")
        ax.set_xlabel(_AXIS_LABEL[spec.axis])
        ax.set_ylabel(_YLABEL[family])
        ax.grid(True, alpha=0.4)
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = out_dir / f"{family}.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written[f"{family}_figure"] = path
    return written
