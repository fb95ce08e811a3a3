"""State tuples of the two chains and the indexed state space."""

from typing import NamedTuple

from .params import SystemParams


class BasicState(NamedTuple):
    """Basic random-access state: i PUs, j1 class-1 SUs, j2 class-2 SUs."""

    i: int
    j1: int
    j2: int

    @property
    def occupied(self) -> int:
        return self.i + self.j1 + self.j2

    def idle(self, M: int) -> int:
        return M - self.occupied


class ReservationState(NamedTuple):
    """Reservation/aggregation state.

    i PUs, j1_r returned class-1 SUs, j1 class-1 SUs, jm class-2 SUs
    holding m channels each, jn class-2 SUs holding n channels each.
    """

    i: int
    j1_r: int
    j1: int
    jm: int
    jn: int

    @property
    def j2(self) -> int:
        """Number of class-2 SUs regardless of aggregation width."""
        return self.jm + self.jn

    def su2_channels(self, p: SystemParams) -> int:
        return p.m * self.jm + p.n * self.jn

    def occupied(self, p: SystemParams) -> int:
        return self.i + self.j1_r + self.j1 + self.su2_channels(p)

    def idle(self, p: SystemParams) -> int:
        return p.M - self.occupied(p)


def basic_feasible(s: BasicState, p: SystemParams) -> bool:
    return (s.i >= 0 and s.j1 >= 0 and s.j2 >= 0
            and s.i <= min(p.M, p.k)
            and s.occupied <= p.M)


def reservation_feasible(z: ReservationState, p: SystemParams) -> bool:
    return (min(z) >= 0
            and z.i <= min(p.M, p.k)
            and z.j1_r <= p.M1_prime
            and z.j1 <= p.M1
            and z.su2_channels(p) <= p.M2
            and z.occupied(p) <= p.M)


class StateSpace:
    """Deterministically ordered state list with a bijective index map.

    States are kept in lexicographic tuple order so matrix layouts and
    exported vectors are reproducible across runs.
    """

    def __init__(self, states):
        self.states = tuple(sorted(states))
        self.index = {s: q for q, s in enumerate(self.states)}
        if len(self.index) != len(self.states):
            raise ValueError("duplicate states in state space")

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __getitem__(self, q):
        return self.states[q]

    def index_of(self, s) -> int:
        return self.index[s]

    def __contains__(self, s) -> bool:
        return s in self.index
