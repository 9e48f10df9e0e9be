"""Deterministic approximation of the monomer-dimer partition function.

Z(lam, G) is written as a telescoping product over a fixed elimination order
v_1, ..., v_2n (left part first, ascending index):

    ln Z(G) = sum_i -ln p(v_i | G - {v_1..v_{i-1}}),

where p(v | H) = Z(H - v) / Z(H) is the probability that v is unmatched.
Each p satisfies

    p(v | H) = 1 / (1 + lam * sum_{u in N(v)} p(u | H - v)),

which is unrolled to a finite depth.  At the truncation boundary the
recursion is fed either 1 or 1/(1 + lam * deg); because the map is
decreasing in its inputs, the two choices bracket the true value at every
depth.  Depth is doubled per factor until the bracket is tight enough or the
recursion is exact (depth >= 2n).
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import kernels
from .config import thread_count
from .graph import BipartiteGraph, Side, Vertex


class Boundary(enum.Enum):
    ALL_UNMATCHED = "all_unmatched"
    ALL_MATCHED = "all_matched"


@dataclass(frozen=True)
class DecayParams:
    """Truncation control.  ``depth`` fixes the depth and disables doubling."""

    delta: float = 0.05
    depth: int | None = None

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.depth is not None and self.depth < 0:
            raise ValueError(f"depth must be non-negative, got {self.depth}")


@dataclass(frozen=True)
class ApproxPartitionValue:
    log_value: float
    log_lo: float
    log_hi: float
    converged: bool
    depth_reached: int
    lam: float
    factor_depths: tuple[int, ...] = field(default=(), repr=False)

    @property
    def width(self) -> float:
        return self.log_hi - self.log_lo


def _bit(g: BipartiteGraph, v: Vertex) -> int:
    g._check_vertex(v)
    return v.index if v.side is Side.LEFT else g.n + v.index


def unmatched_bracket(
    g: BipartiteGraph, v: Vertex, lam: float, depth: int
) -> tuple[float, float]:
    """Both boundary estimates of p(v | g) at ``depth``, as ``(low, high)``."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    a, b = kernels.unmatched_bracket(g.vertex_masks(), 0, _bit(g, v), float(lam), depth)
    return (a, b) if a <= b else (b, a)


def unmatched_probability(
    g: BipartiteGraph,
    v: Vertex,
    lam: float,
    depth: int,
    boundary: Boundary = Boundary.ALL_UNMATCHED,
) -> float:
    if depth < 0:
        raise ValueError("depth must be non-negative")
    a, b = kernels.unmatched_bracket(g.vertex_masks(), 0, _bit(g, v), float(lam), depth)
    return a if boundary is Boundary.ALL_UNMATCHED else b


def choose_depth(n: int, max_degree: int, lam: float, delta: float) -> int:
    """Starting depth for the doubling driver.

    Uses the contraction rate 1 - 2/(1 + sqrt(1 + 4 lam Delta)) of the
    recursion as a heuristic; the driver, not this estimate, certifies the
    result.
    """
    cap = max(1, 2 * n)
    if delta >= 1:
        return 1
    rate = 1.0 - 2.0 / (1.0 + math.sqrt(1.0 + 4.0 * lam * max(max_degree, 1)))
    d = math.ceil(math.log(delta / (2 * max(n, 1))) / math.log(rate))
    return min(cap, max(1, d))


def _factor(adj, removed, v, lam, start, cap, tol, fixed):
    if not adj[v] & ~removed:
        return 0.0, 0.0, 0, True
    depth = fixed if fixed is not None else start
    while True:
        a, b = kernels.unmatched_bracket(adj, removed, v, lam, depth)
        lo, hi = (a, b) if a <= b else (b, a)
        width = math.log(hi) - math.log(lo)
        if fixed is not None or width <= tol or depth >= cap:
            break
        depth = min(2 * depth, cap)
    return -math.log(hi), -math.log(lo), depth, width <= tol


def partition_function_cd(
    g: BipartiteGraph,
    lam: float,
    params: DecayParams | None = None,
    threads: int | None = None,
) -> ApproxPartitionValue:
    """Certified bracket on ln Z(lam, g) from the truncated recursion.

    Converged means the total bracket width is at most ln(1 + delta), so the
    returned midpoint is within a factor sqrt(1 + delta) of Z.
    """
    if not lam > 0:
        raise ValueError(f"activity must be positive, got {lam}")
    params = params or DecayParams()
    lam = float(lam)
    n = g.n
    if n == 0:
        return ApproxPartitionValue(0.0, 0.0, 0.0, True, 0, lam)
    adj = g.vertex_masks()
    cap = 2 * n
    tol = math.log1p(params.delta) / (2 * n)
    start = choose_depth(n, g.max_degree, lam, params.delta)
    jobs = [(adj, (1 << v) - 1, v, lam, start, cap, tol, params.depth) for v in range(2 * n)]

    workers = thread_count() if threads is None else max(1, threads)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda job: _factor(*job), jobs))
    else:
        results = [_factor(*job) for job in jobs]

    log_lo = math.fsum(r[0] for r in results)
    log_hi = math.fsum(r[1] for r in results)
    converged = all(r[3] for r in results)
    depths = tuple(r[2] for r in results)
    return ApproxPartitionValue(
        log_value=0.5 * (log_lo + log_hi),
        log_lo=log_lo,
        log_hi=log_hi,
        converged=converged,
        depth_reached=max(depths),
        lam=lam,
        factor_depths=depths,
    )
