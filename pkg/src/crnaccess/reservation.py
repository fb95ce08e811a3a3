"""Reservation/aggregation chain: reachability enumeration and generator.

States are Z(i, j1_r, j1, jm, jn).  Channel usage is
Mx = i + j1_r + j1 + m*jm + n*jn, idle = M - Mx.  The state space is
defined by breadth-first closure from the empty state under the event
rows below, so the transition rules are the single source of truth.

PU arrival (total rate c' = (k-i)*lambda_p):
  idle > 0, i < M_rp          -> i+1 at c' (reserved pool filled first)
  idle > 0, M_rp <= i < M     -> i+1 at a' = (M-(i+j1_r+j1+j2))/(M-i) * c'
                                 and at b' = (j1_r+j1+j2)/(M-i) * c'
                                 (b' is the SU-handoff share; j2 = jm+jn)
  idle = 0, jm > 0            -> (i+1, jm-1, jn+1) at c' (an m-wide SU-2
                                 releases channels instead of dropping)
  idle = 0, jm = 0            -> one occupant dropped; c' is split across
                                 the classes present in proportion to the
                                 channels they hold (j1_r : j1 : n*jn)

SU-R1 arrival (rate lambda_s, pool bound j1_r < M1_prime):
  idle > 0                        -> j1_r+1
  idle = 0, jm > 0                -> j1_r+1 with (jm-1, jn+1)
  idle = 0, jm = 0, jn > M_r2     -> j1_r+1 with jn-1 (SU-2 dropped)
  idle = 0, jm = 0, jn <= M_r2, j1 > 0 -> j1_r+1 with j1-1 (SU-1 dropped)
  otherwise blocked (no edge)

SU-1 arrival mirrors SU-R1 with bound j1 < M1 and no drop-SU-1 row.

SU-2 arrival (rate lambda_s, channel budget m*jm + n*jn <= M2):
  tried in order -- enter at width m; else an m-wide SU-2 shrinks and the
  newcomer enters at width n (jm-1, jn+2); else, when
  su2_min_width_admission is set, enter directly at width n; else blocked.
  With m == n the two widths coincide and all SUs-2 are kept in the jn
  coordinate.

Departures: PU at i*mu_p; SU-R1 at j1_r*mu_s; SU-1 at j1*mu_s; SU-2 at
j2*mu_s with a single edge per state -- when at least two width-n SUs
exist and the move is feasible, one of them takes over the departed
channels (jm+1, jn-2), otherwise a plain decrement.
"""

from collections import deque

from .generator import Event, Generator, GeneratorBuildError
from .params import SystemParams
from .states import ReservationState, StateSpace, reservation_feasible

EMPTY = ReservationState(0, 0, 0, 0, 0)


def _pu_arrival(p: SystemParams, z: ReservationState):
    """PU arrival rows enabled at z, as (target, Event, rate) entries."""
    i, j1r, j1, jm, jn = z
    c = (p.k - i) * p.lambda_p
    if c <= 0.0:
        return []
    idle = z.idle(p)
    if idle > 0:
        if i < p.M_rp:
            return [(ReservationState(i + 1, j1r, j1, jm, jn),
                     Event.PU_ARRIVAL_RESERVED, c)]
        users = j1r + j1 + z.j2
        out = [(ReservationState(i + 1, j1r, j1, jm, jn),
                Event.PU_ARRIVAL_UNRESERVED,
                c * (p.M - (i + users)) / (p.M - i))]
        if users > 0:
            out.append((ReservationState(i + 1, j1r, j1, jm, jn),
                        Event.PU_ARRIVAL_HANDOFF, c * users / (p.M - i)))
        return out
    if jm > 0:
        target = ReservationState(i + 1, j1r, j1, jm - 1, jn + 1)
        if reservation_feasible(target, p):
            return [(target, Event.PU_ARRIVAL_DEGRADE_SU2, c)]
        return []
    # full system, nobody to degrade: drop one occupant by channel share
    weights = (j1r, j1, p.n * jn)
    total = sum(weights)
    if total == 0:
        return []
    out = []
    if j1r > 0:
        out.append((ReservationState(i + 1, j1r - 1, j1, jm, jn),
                    Event.PU_ARRIVAL_DROP_SUR1, c * j1r / total))
    if j1 > 0:
        out.append((ReservationState(i + 1, j1r, j1 - 1, jm, jn),
                    Event.PU_ARRIVAL_DROP_SU1, c * j1 / total))
    if jn > 0:
        out.append((ReservationState(i + 1, j1r, j1, jm, jn - 1),
                    Event.PU_ARRIVAL_DROP_SU2, c * p.n * jn / total))
    return out


def su_r1_arrival(p: SystemParams, z: ReservationState):
    """Resolve an SU-R1 arrival: (target, Event) or None when blocked."""
    i, j1r, j1, jm, jn = z
    if j1r >= p.M1_prime:
        return None
    if z.idle(p) > 0:
        return ReservationState(i, j1r + 1, j1, jm, jn), Event.SUR1_ARRIVAL
    if jm > 0:
        target = ReservationState(i, j1r + 1, j1, jm - 1, jn + 1)
        if reservation_feasible(target, p):
            return target, Event.SUR1_ARRIVAL_DEGRADE_SU2
        return None
    if jn > p.M_r2:
        return (ReservationState(i, j1r + 1, j1, jm, jn - 1),
                Event.SUR1_ARRIVAL_DROP_SU2)
    if j1 > 0:
        return (ReservationState(i, j1r + 1, j1 - 1, jm, jn),
                Event.SUR1_ARRIVAL_DROP_SU1)
    return None


def su1_arrival(p: SystemParams, z: ReservationState):
    """Resolve an SU-1 arrival: (target, Event) or None when blocked."""
    i, j1r, j1, jm, jn = z
    if j1 >= p.M1:
        return None
    if z.idle(p) > 0:
        return ReservationState(i, j1r, j1 + 1, jm, jn), Event.SU1_ARRIVAL
    if jm > 0:
        target = ReservationState(i, j1r, j1 + 1, jm - 1, jn + 1)
        if reservation_feasible(target, p):
            return target, Event.SU1_ARRIVAL_DEGRADE_SU2
        return None
    if jn > p.M_r2:
        return (ReservationState(i, j1r, j1 + 1, jm, jn - 1),
                Event.SU1_ARRIVAL_DROP_SU2)
    return None


def su2_arrival(p: SystemParams, z: ReservationState):
    """Resolve an SU-2 arrival: (target, Event) or None when blocked."""
    i, j1r, j1, jm, jn = z
    idle = z.idle(p)
    budget = z.su2_channels(p)
    if p.m == p.n:
        # widths coincide: keep every SU-2 in the jn coordinate
        if idle >= p.n and budget + p.n <= p.M2:
            return (ReservationState(i, j1r, j1, jm, jn + 1),
                    Event.SU2_ARRIVAL_AGGREGATE)
        return None
    if idle >= p.m and budget + p.m <= p.M2:
        return (ReservationState(i, j1r, j1, jm + 1, jn),
                Event.SU2_ARRIVAL_AGGREGATE)
    if jm > 0:
        target = ReservationState(i, j1r, j1, jm - 1, jn + 2)
        if reservation_feasible(target, p):
            return target, Event.SU2_ARRIVAL_DEGRADE
    if p.su2_min_width_admission and idle >= p.n and budget + p.n <= p.M2:
        return (ReservationState(i, j1r, j1, jm, jn + 1),
                Event.SU2_ARRIVAL_MIN_WIDTH)
    return None


def su2_departure(p: SystemParams, z: ReservationState):
    """Resolve an SU-2 departure: (target, Event) or None when j2 = 0."""
    i, j1r, j1, jm, jn = z
    if z.j2 == 0:
        return None
    if jn == 0:
        return (ReservationState(i, j1r, j1, jm - 1, jn),
                Event.SU2_DEPARTURE_SIMPLE)
    if p.m > p.n and jn >= 2:
        target = ReservationState(i, j1r, j1, jm + 1, jn - 2)
        if reservation_feasible(target, p):
            return target, Event.SU2_DEPARTURE_UPGRADE
    return (ReservationState(i, j1r, j1, jm, jn - 1),
            Event.SU2_DEPARTURE_SIMPLE)


def su_r1_blocked(p: SystemParams, z: ReservationState) -> bool:
    return su_r1_arrival(p, z) is None


def su1_blocked(p: SystemParams, z: ReservationState) -> bool:
    return su1_arrival(p, z) is None


def su2_blocked(p: SystemParams, z: ReservationState) -> bool:
    return su2_arrival(p, z) is None


def reservation_transitions(p: SystemParams, z: ReservationState):
    """Labeled out-transitions of one state: list of (target, Event, rate)."""
    i, j1r, j1, jm, jn = z
    out = list(_pu_arrival(p, z))
    if i > 0:
        out.append((ReservationState(i - 1, j1r, j1, jm, jn),
                    Event.PU_DEPARTURE, i * p.mu_p))
    if p.lambda_s > 0.0:
        for resolve in (su_r1_arrival, su1_arrival, su2_arrival):
            hit = resolve(p, z)
            if hit is not None:
                out.append((hit[0], hit[1], p.lambda_s))
    if j1r > 0:
        out.append((ReservationState(i, j1r - 1, j1, jm, jn),
                    Event.SUR1_DEPARTURE, j1r * p.mu_s))
    if j1 > 0:
        out.append((ReservationState(i, j1r, j1 - 1, jm, jn),
                    Event.SU1_DEPARTURE, j1 * p.mu_s))
    dep = su2_departure(p, z)
    if dep is not None:
        out.append((dep[0], dep[1], z.j2 * p.mu_s))
    return out


def enumerate_reservation(p: SystemParams) -> StateSpace:
    """Breadth-first closure from the empty state, in lexicographic order."""
    seen = {EMPTY}
    queue = deque([EMPTY])
    while queue:
        z = queue.popleft()
        for target, event, _ in reservation_transitions(p, z):
            if not reservation_feasible(target, p):
                raise GeneratorBuildError(
                    f"infeasible target {target} from {z} via {event.value}")
            if target not in seen:
                seen.add(target)
                queue.append(target)
    return StateSpace(seen)


def build_reservation_generator(p: SystemParams, space: StateSpace) -> Generator:
    """Generator over `space` (from enumerate_reservation) with labeled rates."""
    gen = Generator(space)
    for src, z in enumerate(space):
        for target, event, rate in reservation_transitions(p, z):
            if not reservation_feasible(target, p) or target not in space:
                raise GeneratorBuildError(
                    f"infeasible target {target} from {z} via {event.value}")
            gen.add(src, space.index_of(target), event, rate)
    return gen
