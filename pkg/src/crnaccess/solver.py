"""Stationary distribution of a generator by two independent methods."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .generator import Generator

DEFAULT_DIRECT_TOL = 1e-10
DEFAULT_POWER_TOL = 1e-12
DEFAULT_MAX_ITERS = 500_000


class SolverError(RuntimeError):
    pass


class SingularMatrix(SolverError):
    """The balance equations are rank-deficient (reducible chain)."""


class ResidualTooLarge(SolverError):
    def __init__(self, residual: float, tol: float):
        super().__init__(f"residual {residual:g} exceeds tolerance {tol:g}")
        self.residual = residual


class NoConvergence(SolverError):
    def __init__(self, iters: int):
        super().__init__(f"power iteration did not converge in {iters} iterations")
        self.iters = iters


class Method(str, Enum):
    DIRECT_LINEAR = "direct"
    UNIFORMIZATION = "uniformization"


@dataclass
class StationaryDistribution:
    pi: np.ndarray
    residual_inf: float
    method: Method


def _finish(pi: np.ndarray, q: np.ndarray, method: Method) -> StationaryDistribution:
    """Clamp tiny negatives, renormalize, and attach the residual."""
    low = pi.min()
    if low < -1e-14:
        raise SolverError(f"negative probability entry {low:g}")
    pi = np.where(pi < 0.0, 0.0, pi)
    pi = pi / pi.sum()
    residual = float(np.abs(pi @ q).max())
    return StationaryDistribution(pi=pi, residual_inf=residual, method=method)


def solve_direct(g: Generator, tol: float = DEFAULT_DIRECT_TOL) -> StationaryDistribution:
    """Solve the balance equations by dense LU with partial pivoting.

    One equation is replaced by the normalization sum(pi) = 1.
    """
    if g.n == 1:
        return StationaryDistribution(np.ones(1), 0.0, Method.DIRECT_LINEAR)
    q = g.to_dense()
    a = q.T.copy()
    a[-1, :] = 1.0
    b = np.zeros(g.n)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(str(exc)) from exc
    dist = _finish(pi, q, Method.DIRECT_LINEAR)
    if dist.residual_inf > tol:
        raise ResidualTooLarge(dist.residual_inf, tol)
    return dist


def solve_uniformization(g: Generator,
                         tol: float = DEFAULT_POWER_TOL,
                         max_iters: int = DEFAULT_MAX_ITERS) -> StationaryDistribution:
    """Power-iterate the uniformized chain T = I + Q/Lambda to its fixed point.

    Lambda is 1.05 times the largest exit rate, which keeps every diagonal
    of T strictly positive.  Iteration stops when successive vectors differ
    by less than `tol` in the infinity norm.
    """
    if g.n == 1:
        return StationaryDistribution(np.ones(1), 0.0, Method.UNIFORMIZATION)
    q = g.to_dense()
    lam = 1.05 * float(-np.diag(q).min())
    if lam <= 0.0:
        raise SingularMatrix("generator has no transitions")
    t = np.eye(g.n) + q / lam
    pi = np.full(g.n, 1.0 / g.n)
    for _ in range(max_iters):
        nxt = pi @ t
        delta = float(np.abs(nxt - pi).max())
        pi = nxt
        if delta < tol:
            return _finish(pi, q, Method.UNIFORMIZATION)
    raise NoConvergence(max_iters)


def balance_residual(g: Generator, pi: np.ndarray, idx: int) -> float:
    """Global balance defect at one state: |inflow - outflow|."""
    outflow = pi[idx] * g.total_exit_rate(idx)
    inflow = 0.0
    for src in range(g.n):
        if src != idx:
            inflow += pi[src] * g.rate(src, idx)
    return abs(inflow - outflow)


def export_pi_csv(space, pi: np.ndarray) -> str:
    """CSV text `state_tuple,probability` with 17 significant digits."""
    import csv
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["state_tuple", "probability"])
    for s, prob in zip(space, pi):
        writer.writerow([str(tuple(s)), f"{prob:.17g}"])
    return buf.getvalue()
