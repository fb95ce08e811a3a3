"""Performance metrics computed from a distribution over a state space.

All functions are pure in (states, pi, params); pi may be any probability
vector over the listed states, which keeps the same code usable for exact
stationary vectors and for empirical occupancy estimates.
"""

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

from . import basic as basic_chain
from . import reservation as res_chain
from .params import MODEL_BASIC, MODEL_RESERVATION, SystemParams

#: column order of the metrics CSV; basic-model rows leave *_r1 fields empty
CSV_COLUMNS = ["model", "lambda_s", "mu_s",
               "rho_1", "rho_2", "rho_r1", "U",
               "Pb_r1", "Pb_1", "Pb_2",
               "Ph_r1", "Ph_1", "Ph_2"]

METRIC_COLUMNS = CSV_COLUMNS[3:]

CAPACITY_COLUMNS = ["rho_1", "rho_2", "rho_r1"]
UTILIZATION_COLUMNS = ["U"]
BLOCKING_COLUMNS = ["Pb_r1", "Pb_1", "Pb_2"]
HANDOFF_COLUMNS = ["Ph_r1", "Ph_1", "Ph_2"]


def capacity(states, pi, p: SystemParams, model: str) -> dict:
    """Completed service requests per second, per SU class.

    The reservation model weights class-2 completions by aggregated
    channel count (m per wide user, n per narrow user).
    """
    if model == MODEL_BASIC:
        rho1 = sum(s.j1 * prob for s, prob in zip(states, pi)) * p.mu_s
        rho2 = sum(s.j2 * prob for s, prob in zip(states, pi)) * p.mu_s
        return {"rho_1": float(rho1), "rho_2": float(rho2)}
    rho_r1 = sum(z.j1_r * prob for z, prob in zip(states, pi)) * p.mu_s
    rho1 = sum(z.j1 * prob for z, prob in zip(states, pi)) * p.mu_s
    rho2 = sum((p.m * z.jm + p.n * z.jn) * prob
               for z, prob in zip(states, pi)) * p.mu_s
    return {"rho_r1": float(rho_r1), "rho_1": float(rho1), "rho_2": float(rho2)}


def utilization(states, pi, p: SystemParams, model: str) -> float:
    """Mean fraction of occupied channels."""
    if model == MODEL_BASIC:
        return float(sum(s.occupied * prob for s, prob in zip(states, pi)) / p.M)
    return float(sum(z.occupied(p) * prob for z, prob in zip(states, pi)) / p.M)


def _blocking_predicates(model: str):
    if model == MODEL_BASIC:
        return {"Pb_1": basic_chain.su1_blocked, "Pb_2": basic_chain.su2_blocked}
    return {"Pb_r1": res_chain.su_r1_blocked,
            "Pb_1": res_chain.su1_blocked,
            "Pb_2": res_chain.su2_blocked}


def blocking(states, pi, p: SystemParams, model: str) -> dict:
    """Per-class blocking probability.

    Each blocked state contributes lambda_s*pi / ((k-i)*lambda_p +
    lambda_s), i.e. the class arrival rate over the total arrival rate
    into that state.  The blocked-state sets come from the chain
    builders' own arrival predicates.
    """
    preds = _blocking_predicates(model)
    acc = {name: 0.0 for name in preds}
    if p.lambda_s <= 0.0:
        return acc
    for s, prob in zip(states, pi):
        denom = (p.k - s.i) * p.lambda_p + p.lambda_s
        for name, pred in preds.items():
            if pred(p, s):
                acc[name] += p.lambda_s * prob / denom
    return acc


def handoff(states, pi, p: SystemParams, blocking_probs: dict, model: str):
    """Per-class handoff probability.

    Summation conditions per class:
      basic class 1:        idle > 0, j1 >= 1;               f = j1
      basic class 2:        idle > 0, j2 >= 1;               f = j1 + j2
      reservation SU-R1:    idle > 0, i >= M_rp, j1_r >= 1;  f = j1_r
      reservation class 1:  idle > 0, i >= M_rp, j1 >= 1;    f = j1_r + j1
      reservation class 2:  idle > 0, i >= M_rp, j2 >= 1;    f = j1_r + j1 + j2
    Each term is f/(M-i) * (k-i)*lambda_p * pi / ((k-i)*lambda_p +
    lambda_s); the class total is divided by 1 - Pb(class).

    Returns (probabilities, degenerate) where degenerate lists classes
    whose blocking probability is 1 (handoff reported as 0 there).
    """
    if model == MODEL_BASIC:
        specs = {"Ph_1": (lambda s: s.j1 >= 1, lambda s: s.j1, "Pb_1"),
                 "Ph_2": (lambda s: s.j2 >= 1, lambda s: s.j1 + s.j2, "Pb_2")}
        gate = lambda s: s.idle(p.M) > 0
    else:
        specs = {"Ph_r1": (lambda z: z.j1_r >= 1, lambda z: z.j1_r, "Pb_r1"),
                 "Ph_1": (lambda z: z.j1 >= 1, lambda z: z.j1_r + z.j1, "Pb_1"),
                 "Ph_2": (lambda z: z.j2 >= 1,
                          lambda z: z.j1_r + z.j1 + z.j2, "Pb_2")}
        gate = lambda z: z.idle(p) > 0 and z.i >= p.M_rp

    sums = {name: 0.0 for name in specs}
    for s, prob in zip(states, pi):
        if not gate(s):
            continue
        pu_rate = (p.k - s.i) * p.lambda_p
        if pu_rate <= 0.0:
            continue
        denom = pu_rate + p.lambda_s
        for name, (present, f, _) in specs.items():
            if present(s):
                sums[name] += f(s) / (p.M - s.i) * pu_rate * prob / denom

    result, degenerate = {}, []
    for name, (_, _, pb_name) in specs.items():
        pb = blocking_probs[pb_name]
        if pb >= 1.0:
            result[name] = 0.0
            degenerate.append(name)
        else:
            result[name] = sums[name] / (1.0 - pb)
    return result, tuple(degenerate)


def state_count_basic(M: int) -> int:
    """Closed-form basic state count M^3/6 + M^2 + 11M/6 + 1."""
    value = (Fraction(M**3, 6) + Fraction(M**2) + Fraction(11 * M, 6) + 1)
    if value.denominator != 1:
        raise ValueError(f"non-integer state count {value} at M={M}")
    return int(value)


def state_count_reservation(M: int) -> int:
    """Closed-form reservation state count M^3/3 + 3M^2/2 - 23M/6 - 7.

    The cubic assumes two PU-reserved channels; use
    state_count_reservation_formula for other reservation sizes.
    """
    value = (Fraction(M**3, 3) + Fraction(3 * M**2, 2)
             - Fraction(23 * M, 6) - 7)
    if value.denominator != 1:
        raise ValueError(f"non-integer state count {value} at M={M}")
    return int(value)


def state_count_reservation_formula(M: int, M_rp: int) -> int:
    """Reservation count as the explicit double sum, for any M_rp."""
    inner = sum(2 * v for v in range(M_rp, M - M_rp + 1)) + (M - M_rp)
    return (M_rp + 1) * inner + sum(w * w for w in range(1, M - M_rp + 1))


@dataclass(frozen=True)
class MetricsReport:
    """One row of metrics for one model at one parameter point."""

    model: str
    lambda_s: float
    mu_s: float
    rho_1: float
    rho_2: float
    U: float
    Pb_1: float
    Pb_2: float
    Ph_1: float
    Ph_2: float
    rho_r1: float | None = None
    Pb_r1: float | None = None
    Ph_r1: float | None = None
    degenerate: tuple = ()

    def metric_values(self) -> dict:
        """Metric columns in CSV order (reservation-only ones may be None)."""
        return {name: getattr(self, name) for name in METRIC_COLUMNS}

    def csv_row(self) -> list:
        row = [self.model, fmt_float(self.lambda_s), fmt_float(self.mu_s)]
        row.extend(fmt_float(v) for v in self.metric_values().values())
        return row


def fmt_float(x) -> str:
    """CSV float format: 12 significant digits, empty for missing."""
    if x is None:
        return ""
    return f"{x:.12g}"


def compute_metrics(states, pi, p: SystemParams, model: str) -> MetricsReport:
    """Capacity, utilization, blocking and handoff in one report."""
    caps = capacity(states, pi, p, model)
    util = utilization(states, pi, p, model)
    blk = blocking(states, pi, p, model)
    hof, degenerate = handoff(states, pi, p, blk, model)
    return MetricsReport(
        model=model,
        lambda_s=p.lambda_s,
        mu_s=p.mu_s,
        rho_1=caps["rho_1"],
        rho_2=caps["rho_2"],
        rho_r1=caps.get("rho_r1"),
        U=util,
        Pb_1=blk["Pb_1"],
        Pb_2=blk["Pb_2"],
        Pb_r1=blk.get("Pb_r1"),
        Ph_1=hof["Ph_1"],
        Ph_2=hof["Ph_2"],
        Ph_r1=hof.get("Ph_r1"),
        degenerate=degenerate,
    )


def reports_to_csv(reports) -> str:
    """Serialize reports to the metrics CSV schema."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for report in reports:
        writer.writerow(report.csv_row())
    return buf.getvalue()
