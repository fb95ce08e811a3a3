"""Labeled sparse transition-rate matrix shared by both chain builders."""

from enum import Enum

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components


class Event(str, Enum):
    """Cause of a state change; one name per table row that moves the chain."""

    # basic random access
    PU_ARRIVAL_IDLE = "PuArrivalIdle"
    PU_ARRIVAL_HANDOFF = "PuArrivalHandoff"
    PU_ARRIVAL_DROP_SU2 = "PuArrivalDropSu2"
    PU_ARRIVAL_DROP_SU1 = "PuArrivalDropSu1"
    PU_DEPARTURE = "PuDeparture"
    SU1_ARRIVAL = "Su1Arrival"
    SU1_ARRIVAL_DROP_SU2 = "Su1ArrivalDropSu2"
    SU1_DEPARTURE = "Su1Departure"
    SU2_ARRIVAL = "Su2Arrival"
    SU2_DEPARTURE = "Su2Departure"
    # reservation / aggregation access
    PU_ARRIVAL_RESERVED = "PuArrivalReserved"
    PU_ARRIVAL_UNRESERVED = "PuArrivalUnreserved"
    PU_ARRIVAL_DEGRADE_SU2 = "PuArrivalDegradeSu2"
    PU_ARRIVAL_DROP_SUR1 = "PuArrivalDropSuR1"
    SUR1_ARRIVAL = "SuR1Arrival"
    SUR1_ARRIVAL_DEGRADE_SU2 = "SuR1ArrivalDegradeSu2"
    SUR1_ARRIVAL_DROP_SU2 = "SuR1ArrivalDropSu2"
    SUR1_ARRIVAL_DROP_SU1 = "SuR1ArrivalDropSu1"
    SUR1_DEPARTURE = "SuR1Departure"
    SU1_ARRIVAL_DEGRADE_SU2 = "Su1ArrivalDegradeSu2"
    SU2_ARRIVAL_AGGREGATE = "Su2ArrivalAggregate"
    SU2_ARRIVAL_DEGRADE = "Su2ArrivalDegrade"
    SU2_ARRIVAL_MIN_WIDTH = "Su2ArrivalMinWidth"
    SU2_DEPARTURE_SIMPLE = "Su2DepartureSimple"
    SU2_DEPARTURE_UPGRADE = "Su2DepartureUpgrade"


class GeneratorBuildError(RuntimeError):
    """A builder emitted a transition that violates state invariants (a bug)."""


class Generator:
    """Transition-rate matrix over a StateSpace.

    Off-diagonal entries are kept sparse, each carrying one or more labeled
    rates; the diagonal is implicit, q(s,s) = -sum of the off-diagonal row.
    """

    def __init__(self, space):
        self.space = space
        self.n = len(space)
        # per source row: dst index -> list of (Event, rate)
        self._rows = [dict() for _ in range(self.n)]

    def add(self, src: int, dst: int, event: Event, rate: float):
        if rate <= 0.0:
            raise GeneratorBuildError(f"nonpositive rate {rate} for {event}")
        if src == dst:
            raise GeneratorBuildError(f"self-loop emitted for {event}")
        self._rows[src].setdefault(dst, []).append((event, rate))

    def labeled_edges(self, src: int):
        """Yield (dst, event, rate) for every labeled rate out of src."""
        for dst in sorted(self._rows[src]):
            for event, rate in self._rows[src][dst]:
                yield dst, event, rate

    def rate(self, src: int, dst: int) -> float:
        """Total rate src -> dst (labels summed)."""
        return sum(r for _, r in self._rows[src].get(dst, ()))

    def out_rates(self, src: int) -> dict:
        return {dst: sum(r for _, r in labels)
                for dst, labels in self._rows[src].items()}

    def total_exit_rate(self, src: int) -> float:
        return sum(r for labels in self._rows[src].values() for _, r in labels)

    def to_dense(self) -> np.ndarray:
        q = np.zeros((self.n, self.n))
        for src in range(self.n):
            for dst, labels in self._rows[src].items():
                q[src, dst] = sum(r for _, r in labels)
            q[src, src] = -q[src].sum()
        return q

    def check(self, tol: float = 1e-12):
        """Assert row sums vanish and off-diagonals are nonnegative."""
        q = self.to_dense()
        off = q - np.diag(np.diag(q))
        if off.min() < 0:
            raise GeneratorBuildError("negative off-diagonal rate")
        worst = np.abs(q.sum(axis=1)).max()
        if worst > tol:
            raise GeneratorBuildError(f"row sum {worst:g} exceeds {tol:g}")

    def is_irreducible(self) -> bool:
        """True when the transition graph is strongly connected."""
        if self.n == 1:
            return True
        rows, cols = [], []
        for src in range(self.n):
            for dst in self._rows[src]:
                rows.append(src)
                cols.append(dst)
        adj = csr_matrix((np.ones(len(rows)), (rows, cols)),
                         shape=(self.n, self.n))
        ncomp, _ = connected_components(adj, directed=True, connection="strong")
        return ncomp == 1

    def export_triples(self) -> str:
        """Text dump `src dst rate label`, one line per labeled rate, sorted."""
        lines = []
        for src in range(self.n):
            for dst in sorted(self._rows[src]):
                for event, rate in sorted(self._rows[src][dst],
                                          key=lambda lr: lr[0].value):
                    lines.append(f"{src} {dst} {rate:.17g} {event.value}")
        return "\n".join(lines) + "\n"
