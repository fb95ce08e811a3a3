"""Discrete-event simulation oracle for both access models.

The simulator races exponential clocks over the count vector.  Its
per-state event rules are written directly from the event tables as a
second, independent code path from the generator builders; the
`verify_event_tables` helper cross-references the two and is the tie
between the analytical and empirical routes.

Blocked arrivals are sampled as state-preserving pseudo-events so that
blocking can be counted empirically; they do not alter the occupancy law
of the chain.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import t as student_t

from .metrics import CSV_COLUMNS, METRIC_COLUMNS, compute_metrics, fmt_float
from .params import MODEL_BASIC, MODEL_RESERVATION, SystemParams
from .states import BasicState, ReservationState, StateSpace

try:
    from numba import njit
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False


class ConfigInvalid(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    horizon: float
    warmup: float = 0.0
    replications: int = 10
    seed: int = 0


def validate_config(cfg: SimConfig) -> SimConfig:
    if not cfg.horizon > 0:
        raise ConfigInvalid("horizon not positive")
    if cfg.warmup < 0:
        raise ConfigInvalid("warmup negative")
    if not cfg.warmup < cfg.horizon:
        raise ConfigInvalid("warmup < horizon violated")
    if cfg.replications < 1:
        raise ConfigInvalid("replications < 1")
    return cfg


@dataclass(frozen=True)
class EventKind:
    """Accounting classification of one simulated event type."""

    name: str
    label: str | None          # generator edge label, None for pseudo-events
    changes_state: bool
    arrival: str | None = None
    blocked: bool = False
    completes: str | None = None
    drops: str | None = None
    handoff: bool = False
    degrade: bool = False
    upgrade: bool = False


def _kinds(*specs):
    return tuple(EventKind(**spec) for spec in specs)


BASIC_KINDS = _kinds(
    dict(name="pu_arrival_idle", label="PuArrivalIdle", changes_state=True,
         arrival="pu"),
    dict(name="pu_arrival_handoff", label="PuArrivalHandoff",
         changes_state=True, arrival="pu", handoff=True),
    dict(name="pu_arrival_drop_su2", label="PuArrivalDropSu2",
         changes_state=True, arrival="pu", drops="su2"),
    dict(name="pu_arrival_drop_su1", label="PuArrivalDropSu1",
         changes_state=True, arrival="pu", drops="su1"),
    dict(name="pu_departure", label="PuDeparture", changes_state=True,
         completes="pu"),
    dict(name="su1_arrival", label="Su1Arrival", changes_state=True,
         arrival="su1"),
    dict(name="su1_arrival_drop_su2", label="Su1ArrivalDropSu2",
         changes_state=True, arrival="su1", drops="su2"),
    dict(name="su1_blocked", label=None, changes_state=False,
         arrival="su1", blocked=True),
    dict(name="su1_departure", label="Su1Departure", changes_state=True,
         completes="su1"),
    dict(name="su2_arrival", label="Su2Arrival", changes_state=True,
         arrival="su2"),
    dict(name="su2_blocked", label=None, changes_state=False,
         arrival="su2", blocked=True),
    dict(name="su2_departure", label="Su2Departure", changes_state=True,
         completes="su2"),
)

RESERVATION_KINDS = _kinds(
    dict(name="pu_arrival_reserved", label="PuArrivalReserved",
         changes_state=True, arrival="pu"),
    dict(name="pu_arrival_unreserved", label="PuArrivalUnreserved",
         changes_state=True, arrival="pu"),
    dict(name="pu_arrival_handoff", label="PuArrivalHandoff",
         changes_state=True, arrival="pu", handoff=True),
    dict(name="pu_arrival_degrade_su2", label="PuArrivalDegradeSu2",
         changes_state=True, arrival="pu", degrade=True),
    dict(name="pu_arrival_drop_sur1", label="PuArrivalDropSuR1",
         changes_state=True, arrival="pu", drops="su_r1"),
    dict(name="pu_arrival_drop_su1", label="PuArrivalDropSu1",
         changes_state=True, arrival="pu", drops="su1"),
    dict(name="pu_arrival_drop_su2", label="PuArrivalDropSu2",
         changes_state=True, arrival="pu", drops="su2"),
    dict(name="pu_departure", label="PuDeparture", changes_state=True,
         completes="pu"),
    dict(name="sur1_arrival", label="SuR1Arrival", changes_state=True,
         arrival="su_r1"),
    dict(name="sur1_arrival_degrade_su2", label="SuR1ArrivalDegradeSu2",
         changes_state=True, arrival="su_r1", degrade=True),
    dict(name="sur1_arrival_drop_su2", label="SuR1ArrivalDropSu2",
         changes_state=True, arrival="su_r1", drops="su2"),
    dict(name="sur1_arrival_drop_su1", label="SuR1ArrivalDropSu1",
         changes_state=True, arrival="su_r1", drops="su1"),
    dict(name="sur1_blocked", label=None, changes_state=False,
         arrival="su_r1", blocked=True),
    dict(name="sur1_departure", label="SuR1Departure", changes_state=True,
         completes="su_r1"),
    dict(name="su1_arrival", label="Su1Arrival", changes_state=True,
         arrival="su1"),
    dict(name="su1_arrival_degrade_su2", label="Su1ArrivalDegradeSu2",
         changes_state=True, arrival="su1", degrade=True),
    dict(name="su1_arrival_drop_su2", label="Su1ArrivalDropSu2",
         changes_state=True, arrival="su1", drops="su2"),
    dict(name="su1_blocked", label=None, changes_state=False,
         arrival="su1", blocked=True),
    dict(name="su1_departure", label="Su1Departure", changes_state=True,
         completes="su1"),
    dict(name="su2_arrival_aggregate", label="Su2ArrivalAggregate",
         changes_state=True, arrival="su2"),
    dict(name="su2_arrival_degrade", label="Su2ArrivalDegrade",
         changes_state=True, arrival="su2", degrade=True),
    dict(name="su2_arrival_min_width", label="Su2ArrivalMinWidth",
         changes_state=True, arrival="su2"),
    dict(name="su2_blocked", label=None, changes_state=False,
         arrival="su2", blocked=True),
    dict(name="su2_departure_simple", label="Su2DepartureSimple",
         changes_state=True, completes="su2"),
    dict(name="su2_departure_upgrade", label="Su2DepartureUpgrade",
         changes_state=True, completes="su2", upgrade=True),
)

SU_CLASSES = {MODEL_BASIC: ("su1", "su2"),
              MODEL_RESERVATION: ("su_r1", "su1", "su2")}


def _basic_events(p: SystemParams, s: BasicState):
    """Enabled events and rates at one basic-model state."""
    i, j1, j2 = s
    idle = p.M - i - j1 - j2
    k = {kind.name: c for c, kind in enumerate(BASIC_KINDS)}
    ev = []
    pu = (p.k - i) * p.lambda_p
    if pu > 0.0:
        if idle > 0:
            ev.append((pu * idle / (p.M - i), BasicState(i + 1, j1, j2),
                       k["pu_arrival_idle"]))
            if j1 + j2 > 0:
                ev.append((pu * (j1 + j2) / (p.M - i),
                           BasicState(i + 1, j1, j2), k["pu_arrival_handoff"]))
        elif j2 > 0:
            ev.append((pu, BasicState(i + 1, j1, j2 - 1),
                       k["pu_arrival_drop_su2"]))
        elif j1 > 0:
            ev.append((pu, BasicState(i + 1, j1 - 1, j2),
                       k["pu_arrival_drop_su1"]))
    if i > 0:
        ev.append((i * p.mu_p, BasicState(i - 1, j1, j2), k["pu_departure"]))
    if p.lambda_s > 0.0:
        if idle > 0:
            ev.append((p.lambda_s, BasicState(i, j1 + 1, j2), k["su1_arrival"]))
        elif j2 > 0:
            ev.append((p.lambda_s, BasicState(i, j1 + 1, j2 - 1),
                       k["su1_arrival_drop_su2"]))
        else:
            ev.append((p.lambda_s, s, k["su1_blocked"]))
        if idle > 0:
            ev.append((p.lambda_s, BasicState(i, j1, j2 + 1), k["su2_arrival"]))
        else:
            ev.append((p.lambda_s, s, k["su2_blocked"]))
    if j1 > 0:
        ev.append((j1 * p.mu_s, BasicState(i, j1 - 1, j2), k["su1_departure"]))
    if j2 > 0:
        ev.append((j2 * p.mu_s, BasicState(i, j1, j2 - 1), k["su2_departure"]))
    return ev


def _reservation_events(p: SystemParams, z: ReservationState):
    """Enabled events and rates at one reservation-model state."""
    i, j1r, j1, jm, jn = z
    j2 = jm + jn
    used = i + j1r + j1 + p.m * jm + p.n * jn
    idle = p.M - used
    budget = p.m * jm + p.n * jn
    k = {kind.name: c for c, kind in enumerate(RESERVATION_KINDS)}
    ev = []

    pu = (p.k - i) * p.lambda_p
    if pu > 0.0:
        if idle > 0 and i < p.M_rp:
            ev.append((pu, ReservationState(i + 1, j1r, j1, jm, jn),
                       k["pu_arrival_reserved"]))
        elif idle > 0:
            ev.append((pu * (p.M - i - j1r - j1 - j2) / (p.M - i),
                       ReservationState(i + 1, j1r, j1, jm, jn),
                       k["pu_arrival_unreserved"]))
            if j1r + j1 + j2 > 0:
                ev.append((pu * (j1r + j1 + j2) / (p.M - i),
                           ReservationState(i + 1, j1r, j1, jm, jn),
                           k["pu_arrival_handoff"]))
        elif jm > 0:
            if p.m > p.n:  # shrinking frees m-n >= 1 channels for the PU
                ev.append((pu, ReservationState(i + 1, j1r, j1, jm - 1, jn + 1),
                           k["pu_arrival_degrade_su2"]))
        else:
            share = j1r + j1 + p.n * jn
            if share > 0:
                if j1r > 0:
                    ev.append((pu * j1r / share,
                               ReservationState(i + 1, j1r - 1, j1, jm, jn),
                               k["pu_arrival_drop_sur1"]))
                if j1 > 0:
                    ev.append((pu * j1 / share,
                               ReservationState(i + 1, j1r, j1 - 1, jm, jn),
                               k["pu_arrival_drop_su1"]))
                if jn > 0:
                    ev.append((pu * p.n * jn / share,
                               ReservationState(i + 1, j1r, j1, jm, jn - 1),
                               k["pu_arrival_drop_su2"]))
    if i > 0:
        ev.append((i * p.mu_p, ReservationState(i - 1, j1r, j1, jm, jn),
                   k["pu_departure"]))

    if p.lambda_s > 0.0:
        # returned class-1 arrivals
        if j1r >= p.M1_prime:
            ev.append((p.lambda_s, z, k["sur1_blocked"]))
        elif idle > 0:
            ev.append((p.lambda_s, ReservationState(i, j1r + 1, j1, jm, jn),
                       k["sur1_arrival"]))
        elif jm > 0 and p.m > p.n:
            ev.append((p.lambda_s,
                       ReservationState(i, j1r + 1, j1, jm - 1, jn + 1),
                       k["sur1_arrival_degrade_su2"]))
        elif jm == 0 and jn > p.M_r2:
            ev.append((p.lambda_s,
                       ReservationState(i, j1r + 1, j1, jm, jn - 1),
                       k["sur1_arrival_drop_su2"]))
        elif jm == 0 and j1 > 0:
            ev.append((p.lambda_s,
                       ReservationState(i, j1r + 1, j1 - 1, jm, jn),
                       k["sur1_arrival_drop_su1"]))
        else:
            ev.append((p.lambda_s, z, k["sur1_blocked"]))
        # class-1 arrivals
        if j1 >= p.M1:
            ev.append((p.lambda_s, z, k["su1_blocked"]))
        elif idle > 0:
            ev.append((p.lambda_s, ReservationState(i, j1r, j1 + 1, jm, jn),
                       k["su1_arrival"]))
        elif jm > 0 and p.m > p.n:
            ev.append((p.lambda_s,
                       ReservationState(i, j1r, j1 + 1, jm - 1, jn + 1),
                       k["su1_arrival_degrade_su2"]))
        elif jm == 0 and jn > p.M_r2:
            ev.append((p.lambda_s,
                       ReservationState(i, j1r, j1 + 1, jm, jn - 1),
                       k["su1_arrival_drop_su2"]))
        else:
            ev.append((p.lambda_s, z, k["su1_blocked"]))
        # class-2 arrivals
        if p.m == p.n:
            if idle >= p.n and budget + p.n <= p.M2:
                ev.append((p.lambda_s,
                           ReservationState(i, j1r, j1, jm, jn + 1),
                           k["su2_arrival_aggregate"]))
            else:
                ev.append((p.lambda_s, z, k["su2_blocked"]))
        elif idle >= p.m and budget + p.m <= p.M2:
            ev.append((p.lambda_s, ReservationState(i, j1r, j1, jm + 1, jn),
                       k["su2_arrival_aggregate"]))
        elif (jm > 0 and used + 2 * p.n - p.m <= p.M
              and budget + 2 * p.n - p.m <= p.M2):
            ev.append((p.lambda_s,
                       ReservationState(i, j1r, j1, jm - 1, jn + 2),
                       k["su2_arrival_degrade"]))
        elif p.su2_min_width_admission and idle >= p.n and budget + p.n <= p.M2:
            ev.append((p.lambda_s, ReservationState(i, j1r, j1, jm, jn + 1),
                       k["su2_arrival_min_width"]))
        else:
            ev.append((p.lambda_s, z, k["su2_blocked"]))

    if j1r > 0:
        ev.append((j1r * p.mu_s, ReservationState(i, j1r - 1, j1, jm, jn),
                   k["sur1_departure"]))
    if j1 > 0:
        ev.append((j1 * p.mu_s, ReservationState(i, j1r, j1 - 1, jm, jn),
                   k["su1_departure"]))
    if j2 > 0:
        if jn == 0:
            ev.append((j2 * p.mu_s, ReservationState(i, j1r, j1, jm - 1, jn),
                       k["su2_departure_simple"]))
        elif (p.m > p.n and jn >= 2
              and used + p.m - 2 * p.n <= p.M
              and budget + p.m - 2 * p.n <= p.M2):
            ev.append((j2 * p.mu_s,
                       ReservationState(i, j1r, j1, jm + 1, jn - 2),
                       k["su2_departure_upgrade"]))
        else:
            ev.append((j2 * p.mu_s, ReservationState(i, j1r, j1, jm, jn - 1),
                       k["su2_departure_simple"]))
    return ev


def _model_tools(model: str):
    if model == MODEL_BASIC:
        return _basic_events, BASIC_KINDS, BasicState(0, 0, 0)
    if model == MODEL_RESERVATION:
        return _reservation_events, RESERVATION_KINDS, ReservationState(0, 0, 0, 0, 0)
    raise ConfigInvalid(f"unknown model '{model}'")


def sim_state_space(p: SystemParams, model: str) -> StateSpace:
    """Closure of the simulator's own event rules from the empty state."""
    events_fn, _, start = _model_tools(model)
    seen = {start}
    stack = [start]
    while stack:
        s = stack.pop()
        for _, target, _ in events_fn(p, s):
            if target not in seen:
                seen.add(target)
                stack.append(target)
    return StateSpace(seen)


def _flatten(p: SystemParams, model: str, space: StateSpace):
    events_fn, kinds, _ = _model_tools(model)
    n = len(space)
    rows = [events_fn(p, s) for s in space]
    width = max(len(r) for r in rows)
    cum = np.zeros((n, width))
    targets = np.zeros((n, width), dtype=np.int64)
    kind_codes = np.zeros((n, width), dtype=np.int64)
    counts = np.zeros(n, dtype=np.int64)
    totals = np.zeros(n)
    for q, row in enumerate(rows):
        acc = 0.0
        counts[q] = len(row)
        for e, (rate, target, code) in enumerate(row):
            acc += rate
            cum[q, e] = acc
            targets[q, e] = space.index_of(target)
            kind_codes[q, e] = code
        totals[q] = acc
    return cum, targets, kind_codes, counts, totals, len(kinds)


def _trajectory(seed, horizon, warmup, start, cum, targets, kinds, counts, totals,
                n_kinds):
    """Reference kernel; the numba version below is compiled from the same body."""
    np_random = np.random.RandomState(seed)
    n = cum.shape[0]
    occ = np.zeros(n)
    kcnt = np.zeros(n_kinds, dtype=np.int64)
    s = start
    t = 0.0
    warm_state = start
    while True:
        total = totals[s]
        if total <= 0.0:
            lo = t if t > warmup else warmup
            if horizon > lo:
                occ[s] += horizon - lo
            return occ, kcnt, warm_state, s
        dt = -math.log(1.0 - np_random.random_sample()) / total
        t2 = t + dt
        lo = t if t > warmup else warmup
        hi = t2 if t2 < horizon else horizon
        if hi > lo:
            occ[s] += hi - lo
        if t <= warmup < t2:
            warm_state = s
        if t2 >= horizon:
            return occ, kcnt, warm_state, s
        u = np_random.random_sample() * total
        e = 0
        last = counts[s] - 1
        while e < last and cum[s, e] < u:
            e += 1
        if t2 > warmup:
            kcnt[kinds[s, e]] += 1
        s = targets[s, e]
        t = t2


if _HAVE_NUMBA:
    @njit(cache=True)
    def _trajectory_numba(seed, horizon, warmup, start, cum, targets, kinds,
                          counts, totals, n_kinds):  # pragma: no cover - jitted
        np.random.seed(seed)
        n = cum.shape[0]
        occ = np.zeros(n)
        kcnt = np.zeros(n_kinds, dtype=np.int64)
        s = start
        t = 0.0
        warm_state = start
        while True:
            total = totals[s]
            if total <= 0.0:
                lo = t if t > warmup else warmup
                if horizon > lo:
                    occ[s] += horizon - lo
                return occ, kcnt, warm_state, s
            dt = -np.log(1.0 - np.random.random()) / total
            t2 = t + dt
            lo = t if t > warmup else warmup
            hi = t2 if t2 < horizon else horizon
            if hi > lo:
                occ[s] += hi - lo
            if t <= warmup < t2:
                warm_state = s
            if t2 >= horizon:
                return occ, kcnt, warm_state, s
            u = np.random.random() * total
            e = 0
            last = counts[s] - 1
            while e < last and cum[s, e] < u:
                e += 1
            if t2 > warmup:
                kcnt[kinds[s, e]] += 1
            s = targets[s, e]
            t = t2


def _run_trajectory(*args):
    if _HAVE_NUMBA:
        return _trajectory_numba(*args)
    return _trajectory(*args)


@dataclass(frozen=True)
class ReplicationRecord:
    seed: int
    kind_counts: tuple
    state_at_warmup: tuple
    final_state: tuple


@dataclass
class SimEstimate:
    """Empirical occupancy and metric estimates with 95% confidence bounds."""

    model: str
    config: SimConfig
    states: tuple
    pi_hat: np.ndarray
    metrics_mean: dict
    metrics_ci: dict
    counters: dict
    raw_ratios: dict
    records: list
    rep_pi: np.ndarray = field(repr=False, default=None)
    rep_metrics: dict = field(repr=False, default_factory=dict)

    def to_json(self) -> str:
        doc = {
            "model": self.model,
            "config": {"horizon": self.config.horizon,
                       "warmup": self.config.warmup,
                       "replications": self.config.replications,
                       "seed": self.config.seed},
            "states": [list(s) for s in self.states],
            "pi_hat": [float(v) for v in self.pi_hat],
            "metrics": {name: {"mean": self.metrics_mean[name],
                               "ci_halfwidth": self.metrics_ci[name]}
                        for name in sorted(self.metrics_mean)},
            "counters": self.counters,
            "raw_ratios": self.raw_ratios,
            "replications": [{"seed": r.seed,
                              "state_at_warmup": list(r.state_at_warmup),
                              "final_state": list(r.final_state),
                              "kind_counts": list(r.kind_counts)}
                             for r in self.records],
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    def csv_text(self, p: SystemParams) -> str:
        """Metrics CSV schema plus ci_* columns."""
        header = CSV_COLUMNS + [f"ci_{name}" for name in METRIC_COLUMNS]
        row = [self.model, fmt_float(p.lambda_s), fmt_float(p.mu_s)]
        row += [fmt_float(self.metrics_mean.get(name)) for name in METRIC_COLUMNS]
        row += [fmt_float(self.metrics_ci.get(name)) for name in METRIC_COLUMNS]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerow(row)
        return buf.getvalue()


def _class_counts(model: str, state) -> dict:
    if model == MODEL_BASIC:
        return {"su1": state.j1, "su2": state.j2}
    return {"su_r1": state.j1_r, "su1": state.j1, "su2": state.jm + state.jn}


def aggregate_counters(model: str, kind_counts) -> dict:
    """Fold raw kind counts into per-class arrival/block/drop/... totals."""
    _, kinds, _ = _model_tools(model)
    classes = ("pu",) + SU_CLASSES[model]
    agg = {c: {"arrivals": 0, "blocks": 0, "admissions": 0, "completions": 0,
               "drops": 0} for c in classes}
    handoffs = degrades = upgrades = 0
    for kind, count in zip(kinds, kind_counts):
        count = int(count)
        if kind.arrival:
            agg[kind.arrival]["arrivals"] += count
            if kind.blocked:
                agg[kind.arrival]["blocks"] += count
            else:
                agg[kind.arrival]["admissions"] += count
        if kind.completes:
            agg[kind.completes]["completions"] += count
        if kind.drops:
            agg[kind.drops]["drops"] += count
        if kind.handoff:
            handoffs += count
        if kind.degrade:
            degrades += count
        if kind.upgrade:
            upgrades += count
    agg["events"] = {"handoffs": handoffs, "degrades": degrades,
                     "upgrades": upgrades}
    return agg


def verify_event_tables(p: SystemParams, model: str) -> int:
    """Cross-reference simulator event rules against the generator builder.

    For every simulator-reachable state, the state-changing event set
    (target, label, rate) must match the generator row exactly.  Returns
    the number of states checked; raises AssertionError on any mismatch.
    """
    from . import basic as basic_chain
    from . import reservation as res_chain

    if model == MODEL_BASIC:
        chain_space = basic_chain.enumerate_basic(p)
        gen = basic_chain.build_basic_generator(p, chain_space)
    else:
        chain_space = res_chain.enumerate_reservation(p)
        gen = res_chain.build_reservation_generator(p, chain_space)

    events_fn, kinds, _ = _model_tools(model)
    space = sim_state_space(p, model)
    for s in space:
        if s not in chain_space:
            raise AssertionError(f"simulator state {s} missing from chain space")
        src = chain_space.index_of(s)
        gen_row = sorted((tuple(chain_space[dst]), ev.value, rate)
                         for dst, ev, rate in gen.labeled_edges(src))
        sim_row = sorted((tuple(target), kinds[code].label, rate)
                         for rate, target, code in events_fn(p, s)
                         if kinds[code].changes_state)
        if len(gen_row) != len(sim_row):
            raise AssertionError(
                f"event count mismatch at {s}: generator {gen_row}, "
                f"simulator {sim_row}")
        for (gt, gl, gr), (st, sl, sr) in zip(gen_row, sim_row):
            if gt != st or gl != sl or abs(gr - sr) > 1e-12:
                raise AssertionError(
                    f"event mismatch at {s}: generator {(gt, gl, gr)}, "
                    f"simulator {(st, sl, sr)}")
    return len(space)


def replication_seeds(base_seed: int, replications: int):
    """Independent per-replication seeds from one splittable root."""
    children = np.random.SeedSequence(base_seed).spawn(replications)
    return [int(c.generate_state(1)[0]) for c in children]


def simulate(p: SystemParams, model: str, cfg: SimConfig,
             cross_check: bool = False) -> SimEstimate:
    """Run the replicated race-of-exponentials simulation.

    Metrics are evaluated by plugging each replication's occupancy
    estimate into the same formulas used analytically, then averaged
    across replications with Student-t 95% intervals.
    """
    validate_config(cfg)
    if cross_check:
        verify_event_tables(p, model)

    events_fn, kinds, start = _model_tools(model)
    space = sim_state_space(p, model)
    cum, targets, kind_codes, counts, totals, n_kinds = _flatten(p, model, space)
    start_idx = space.index_of(start)
    observed = cfg.horizon - cfg.warmup

    seeds = replication_seeds(cfg.seed, cfg.replications)
    rep_pi = np.zeros((cfg.replications, len(space)))
    rep_metrics = {name: [] for name in METRIC_COLUMNS}
    records = []
    total_counts = np.zeros(n_kinds, dtype=np.int64)
    for r, seed in enumerate(seeds):
        occ, kcnt, warm_idx, final_idx = _run_trajectory(
            seed, cfg.horizon, cfg.warmup, start_idx,
            cum, targets, kind_codes, counts, totals, n_kinds)
        rep_pi[r] = occ / observed
        total_counts += kcnt
        report = compute_metrics(space.states, rep_pi[r], p, model)
        for name, value in report.metric_values().items():
            if value is not None:
                rep_metrics[name].append(value)
        records.append(ReplicationRecord(
            seed=seed, kind_counts=tuple(int(c) for c in kcnt),
            state_at_warmup=tuple(space[warm_idx]),
            final_state=tuple(space[final_idx])))

    pi_hat = rep_pi.mean(axis=0)
    reps = cfg.replications
    tcrit = float(student_t.ppf(0.975, reps - 1)) if reps > 1 else float("nan")
    metrics_mean, metrics_ci = {}, {}
    for name, values in rep_metrics.items():
        if not values:
            metrics_mean[name] = None
            metrics_ci[name] = None
            continue
        arr = np.asarray(values)
        metrics_mean[name] = float(arr.mean())
        if reps > 1:
            metrics_ci[name] = float(tcrit * arr.std(ddof=1) / math.sqrt(reps))
        else:
            metrics_ci[name] = float("nan")

    counters = aggregate_counters(model, total_counts)
    ratios = {}
    su_adm = 0
    for c in SU_CLASSES[model]:
        arr = counters[c]["arrivals"]
        ratios[f"block_ratio_{c}"] = (counters[c]["blocks"] / arr) if arr else 0.0
        su_adm += counters[c]["admissions"]
    ratios["handoff_per_admission"] = (
        counters["events"]["handoffs"] / su_adm if su_adm else 0.0)

    return SimEstimate(model=model, config=cfg, states=space.states,
                       pi_hat=pi_hat, metrics_mean=metrics_mean,
                       metrics_ci=metrics_ci, counters=counters,
                       raw_ratios=ratios, records=records,
                       rep_pi=rep_pi,
                       rep_metrics={k: np.asarray(v)
                                    for k, v in rep_metrics.items()})


def check_conservation(model: str, record: ReplicationRecord) -> dict:
    """Per-class accounting identities for one replication.

    For every SU class: arrivals = blocks + admissions, and
    admissions + in-service-at-warmup = completions + drops +
    in-service-at-end.  Returns the per-class defects (all zero when the
    counters are consistent).
    """
    _, kinds, _ = _model_tools(model)
    agg = aggregate_counters(model, record.kind_counts)
    if model == MODEL_BASIC:
        warm = _class_counts(model, BasicState(*record.state_at_warmup))
        final = _class_counts(model, BasicState(*record.final_state))
    else:
        warm = _class_counts(model, ReservationState(*record.state_at_warmup))
        final = _class_counts(model, ReservationState(*record.final_state))
    defects = {}
    for c in SU_CLASSES[model]:
        a = agg[c]
        defects[f"{c}_arrivals"] = a["arrivals"] - a["blocks"] - a["admissions"]
        defects[f"{c}_flow"] = (a["admissions"] + warm[c]
                                - a["completions"] - a["drops"] - final[c])
    return defects
