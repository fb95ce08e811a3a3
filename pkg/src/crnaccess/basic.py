"""Basic random-access chain: state enumeration and generator construction.

Event rows at state (i, j1, j2), with idle = M - i - j1 - j2:

  PU arrival,  idle > 0            -> (i+1, j1, j2)    rate a = idle/(M-i) * (k-i)*lambda_p
  PU arrival,  idle > 0, SU moves  -> (i+1, j1, j2)    rate b = (j1+j2)/(M-i) * (k-i)*lambda_p
  PU arrival,  idle = 0, j2 > 0    -> (i+1, j1, j2-1)  rate c = (k-i)*lambda_p
  PU arrival,  idle = 0, j1 > 0, j2 = 0 -> (i+1, j1-1, j2)  rate c
  PU departure, i > 0              -> (i-1, j1, j2)    rate i*mu_p
  SU-1 arrival, idle > 0           -> (i, j1+1, j2)    rate lambda_s
  SU-1 arrival, idle = 0, j2 > 0   -> (i, j1+1, j2-1)  rate lambda_s
  SU-1 departure, j1 > 0           -> (i, j1-1, j2)    rate j1*mu_s
  SU-2 arrival, idle > 0           -> (i, j1, j2+1)    rate lambda_s
  SU-2 departure, j2 > 0           -> (i, j1, j2-1)    rate j2*mu_s

Blocked arrivals (SU-1 when idle = 0 and j2 = 0; SU-2 when idle = 0) are
lost calls: no edge is emitted.  Zero-rate rows (PU arrival at i = k, b
with no SUs present) are omitted.
"""

from .generator import Event, Generator, GeneratorBuildError
from .params import SystemParams
from .states import BasicState, StateSpace, basic_feasible


def enumerate_basic(p: SystemParams) -> StateSpace:
    """All (i, j1, j2) with i + j1 + j2 <= M and i <= min(M, k), lex order."""
    imax = min(p.M, p.k)
    states = [BasicState(i, j1, j2)
              for i in range(imax + 1)
              for j1 in range(p.M - i + 1)
              for j2 in range(p.M - i - j1 + 1)]
    return StateSpace(states)


def basic_transitions(p: SystemParams, s: BasicState):
    """Labeled out-transitions of one state: list of (target, Event, rate)."""
    i, j1, j2 = s
    idle = p.M - i - j1 - j2
    out = []

    c = (p.k - i) * p.lambda_p
    if c > 0.0:
        if idle > 0:
            out.append((BasicState(i + 1, j1, j2), Event.PU_ARRIVAL_IDLE,
                        c * idle / (p.M - i)))
            if j1 + j2 > 0:
                out.append((BasicState(i + 1, j1, j2), Event.PU_ARRIVAL_HANDOFF,
                            c * (j1 + j2) / (p.M - i)))
        elif j2 > 0:
            out.append((BasicState(i + 1, j1, j2 - 1),
                        Event.PU_ARRIVAL_DROP_SU2, c))
        elif j1 > 0:
            out.append((BasicState(i + 1, j1 - 1, j2),
                        Event.PU_ARRIVAL_DROP_SU1, c))
    if i > 0:
        out.append((BasicState(i - 1, j1, j2), Event.PU_DEPARTURE, i * p.mu_p))

    if p.lambda_s > 0.0:
        if idle > 0:
            out.append((BasicState(i, j1 + 1, j2), Event.SU1_ARRIVAL, p.lambda_s))
        elif j2 > 0:
            out.append((BasicState(i, j1 + 1, j2 - 1),
                        Event.SU1_ARRIVAL_DROP_SU2, p.lambda_s))
        if idle > 0:
            out.append((BasicState(i, j1, j2 + 1), Event.SU2_ARRIVAL, p.lambda_s))
    if j1 > 0:
        out.append((BasicState(i, j1 - 1, j2), Event.SU1_DEPARTURE, j1 * p.mu_s))
    if j2 > 0:
        out.append((BasicState(i, j1, j2 - 1), Event.SU2_DEPARTURE, j2 * p.mu_s))
    return out


def su1_blocked(p: SystemParams, s: BasicState) -> bool:
    """An arriving class-1 SU finds no idle channel and no SU-2 to preempt."""
    return s.idle(p.M) == 0 and s.j2 == 0


def su2_blocked(p: SystemParams, s: BasicState) -> bool:
    """An arriving class-2 SU finds no idle channel."""
    return s.idle(p.M) == 0


def build_basic_generator(p: SystemParams, space: StateSpace) -> Generator:
    """Generator over `space` (from enumerate_basic) with labeled rates."""
    gen = Generator(space)
    for src, s in enumerate(space):
        for target, event, rate in basic_transitions(p, s):
            if not basic_feasible(target, p) or target not in space:
                raise GeneratorBuildError(
                    f"infeasible target {target} from {s} via {event.value}")
            gen.add(src, space.index_of(target), event, rate)
    return gen
