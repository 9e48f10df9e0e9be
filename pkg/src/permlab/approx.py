"""Permanent approximation through the monomer-dimer partition function.

Expander case: pick an activity lam large enough that Z(lam, G) / lam^n is
close to Perm(G), then approximate Z by correlation decay.

General case: test expansion with alpha = n^(-1/3).  On a certificate, use the
expander case.  On a poorly expanding set A, split

    Perm(G) = sum_{B subset N(A), |B| = |A|} Perm(A, B) * Perm(A^c, B^c)

and recurse on both factors of every term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

from . import config
from .exact import (
    ExactSizeError,
    has_perfect_matching,
    permanent_exact,
)
from .expansion import Certified, Violator, test_expansion
from .graph import BipartiteGraph, Side, induced_subgraph
from .monomer_dimer import DecayParams, partition_function_cd


class HeuristicCertificateError(RuntimeError):
    """Expansion could only be certified heuristically and unsound mode is off."""


class DecompositionBudgetError(RuntimeError):
    def __init__(self, message: str, trace: "TraceNode"):
        super().__init__(message)
        self.trace = trace


@dataclass
class ApproxResult:
    log_estimate: float
    guarantee_exponent: float
    exact: bool
    converged: bool = True
    parameters: dict = field(default_factory=dict)
    exact_value: int | None = None  # set whenever ``exact`` is

    @property
    def is_zero(self) -> bool:
        return self.log_estimate == -math.inf

    @property
    def estimate(self) -> float:
        return math.exp(self.log_estimate)

    @property
    def log_interval(self) -> tuple[float, float]:
        return (
            self.log_estimate - self.guarantee_exponent,
            self.log_estimate + self.guarantee_exponent,
        )


def _zero(**params) -> ApproxResult:
    return ApproxResult(-math.inf, 0.0, True, True, params, exact_value=0)


# activity selection and the two-sided bound ---------------------------------


def select_activity(
    epsilon: float, alpha: float, max_degree: int, c: float = config.CALIBRATION_C
) -> float:
    """Smallest lam with c*log(Delta)/(lam*log(1+alpha)) <= log(1+epsilon), floored above 10."""
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if max_degree < 1:
        raise ValueError(f"max degree must be at least 1, got {max_degree}")
    floor = math.nextafter(config.LAMBDA_FLOOR, math.inf)
    if max_degree == 1 or math.isinf(alpha):
        return floor
    lam = c * math.log(max_degree) / (math.log1p(alpha) * math.log1p(epsilon))
    return max(floor, lam)


@dataclass(frozen=True)
class CorollaryBounds:
    lower: float
    upper_log: float
    formula_only: bool


def corollary_bounds(
    n: int, lam: float, alpha: float, max_degree: int, c: float = config.CALIBRATION_C
) -> CorollaryBounds:
    """1 <= Z/(lam^n Perm) <= exp(c n log(Delta) / (lam log(1+alpha))).

    The lower bound is unconditional.  The upper one carries an unspecified
    constant, so it is reported with the calibration ``c`` and never asserted.
    """
    if not lam > 2 * math.e:
        raise ValueError(f"bound needs lam > 2e, got {lam}")
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if max_degree <= 1:
        return CorollaryBounds(1.0, 0.0, True)
    upper = c * n * math.log(max_degree) / (lam * math.log1p(alpha))
    return CorollaryBounds(1.0, upper, False)


# expander case ---------------------------------------------------------------


def approx_permanent_expander(
    g: BipartiteGraph,
    epsilon: float,
    alpha: float,
    c: float = config.CALIBRATION_C,
    lam: float | None = None,
    depth: int | None = None,
    threads: int | None = None,
) -> ApproxResult:
    """(1+eps)-style estimate of Perm(g) for an alpha-expander ``g``.

    ``lam`` overrides the activity selection; ``depth`` pins the truncation
    depth of the partition-function recursion.
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not alpha > 0:
        raise ValueError(f"graph is not an expander for alpha={alpha}")
    delta_max = g.max_degree
    if not has_perfect_matching(g):
        return _zero(epsilon=epsilon, alpha=alpha, max_degree=delta_max)
    if lam is None:
        lam = select_activity(epsilon, alpha, delta_max, c)
    elif not lam > 0:
        raise ValueError(f"activity must be positive, got {lam}")
    z = partition_function_cd(g, lam, DecayParams(delta=epsilon, depth=depth), threads)
    return ApproxResult(
        log_estimate=z.log_value - g.n * math.log(lam),
        guarantee_exponent=(g.n + 1) * math.log1p(epsilon),
        exact=False,
        converged=z.converged,
        parameters={
            "epsilon": epsilon,
            "lambda": lam,
            "alpha": alpha,
            "max_degree": delta_max,
            "depth": z.depth_reached,
            "calib_c": c,
            "zeta_log_interval": [z.log_lo, z.log_hi],
        },
    )


# general case ----------------------------------------------------------------


@dataclass
class ProductTerm:
    subset: tuple[int, ...]  # B, on the side opposite A
    inner: "TraceNode"  # (A, B)
    outer: "TraceNode"  # (A^c, B^c)


@dataclass
class TraceNode:
    """One subproblem of the decomposition.

    ``kind`` is ``base`` (exact), ``zero`` (no perfect matching), ``expander``
    (partition-function estimate) or ``violator`` (split over B-subsets).
    """

    n: int
    kind: str
    alpha: float | None = None
    side: str | None = None
    subset: tuple[int, ...] = ()
    neighborhood_size: int | None = None
    subsets_enumerated: int = 0
    terms: list[ProductTerm] = field(default_factory=list)
    lam: float | None = None
    depth: int | None = None

    def walk(self):
        yield self
        for t in self.terms:
            yield from t.inner.walk()
            yield from t.outer.walk()

    def count(self) -> int:
        return sum(1 for _ in self.walk())

    def height(self) -> int:
        if not self.terms:
            return 0
        return 1 + max(max(t.inner.height(), t.outer.height()) for t in self.terms)

    def summary(self) -> dict:
        kinds = {"base": 0, "zero": 0, "expander": 0, "violator": 0}
        for node in self.walk():
            kinds[node.kind] += 1
        return {"nodes": sum(kinds.values()), "height": self.height(), **kinds}

    def to_dict(self) -> dict:
        out = {"n": self.n, "kind": self.kind}
        if self.kind == "violator":
            out.update(
                alpha=self.alpha,
                side=self.side,
                subset=list(self.subset),
                neighborhood_size=self.neighborhood_size,
                subsets_enumerated=self.subsets_enumerated,
                terms=[
                    {"subset": list(t.subset), "inner": t.inner.to_dict(), "outer": t.outer.to_dict()}
                    for t in self.terms
                ],
            )
        elif self.kind == "expander":
            out.update(alpha=self.alpha, **{"lambda": self.lam, "depth": self.depth})
        return out


def _logsumexp(values: list[float]) -> float:
    finite = [v for v in values if v != -math.inf]
    if not finite:
        return -math.inf
    top = max(finite)
    return top + math.log(math.fsum(math.exp(v - top) for v in finite))


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def take(self, root: TraceNode) -> None:
        self.used += 1
        if self.used > self.limit:
            raise DecompositionBudgetError(
                f"decomposition exceeded {self.limit} nodes", root
            )


def approx_permanent_general(
    g: BipartiteGraph,
    epsilon: float,
    *,
    base_cap: int = config.BASE_CASE_CAP,
    expansion_cap: int = config.EXPANSION_CAP,
    c: float = config.CALIBRATION_C,
    alpha: float | None = None,
    unsound_fast: bool = False,
    node_budget: int = config.NODE_BUDGET,
    lam: float | None = None,
    depth: int | None = None,
    threads: int | None = None,
) -> tuple[ApproxResult, TraceNode]:
    """Expander-decomposition estimate of Perm(g) and its recursion trace.

    ``alpha`` overrides n^(-1/3) at the top level only; ``lam`` and ``depth``
    are passed to every expander-case leaf.
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if base_cap > config.EXACT_CAP:
        raise ExactSizeError(f"base-case cap {base_cap} exceeds exact cap {config.EXACT_CAP}")
    budget = _Budget(node_budget)
    holder: list[TraceNode] = []
    stats = {"converged": True, "max_depth": 0}

    def solve(h: BipartiteGraph, alpha_override: float | None):
        # returns (log estimate, guarantee exponent, exact integer or None, node)
        node = TraceNode(h.n, "base")
        if not holder:
            holder.append(node)
        budget.take(holder[0])
        if h.n <= base_cap:
            perm = permanent_exact(h)
            if perm == 0:
                node.kind = "zero"
                return -math.inf, 0.0, 0, node
            return math.log(perm), 0.0, perm, node
        if not has_perfect_matching(h):
            node.kind = "zero"
            return -math.inf, 0.0, 0, node

        a = alpha_override if alpha_override is not None else h.n ** (-1.0 / 3.0)
        node.alpha = a
        verdict = test_expansion(h, a, cap=expansion_cap)
        if isinstance(verdict, Certified):
            if verdict.heuristic and not unsound_fast:
                raise HeuristicCertificateError(
                    f"expansion of an n={h.n} subproblem is only heuristically certified; "
                    "pass unsound_fast=True to accept it"
                )
            res = approx_permanent_expander(
                h, epsilon, a, c=c, lam=lam, depth=depth, threads=threads
            )
            node.kind = "expander"
            node.lam = res.parameters.get("lambda")
            node.depth = res.parameters.get("depth")
            stats["converged"] &= res.converged
            stats["max_depth"] = max(stats["max_depth"], node.depth or 0)
            return res.log_estimate, res.guarantee_exponent, None, node

        assert isinstance(verdict, Violator)
        node.kind = "violator"
        node.side = verdict.side.value
        node.subset = verdict.subset
        node.neighborhood_size = verdict.neighborhood_size
        if verdict.hall_violation:
            node.kind = "zero"
            return -math.inf, 0.0, 0, node
        A = verdict.subset
        rest_a = [i for i in range(h.n) if i not in set(A)]
        logs = []
        worst = 0.0
        exact_sum: int | None = 0
        for B in combinations(verdict.neighborhood, len(A)):
            node.subsets_enumerated += 1
            rest_b = [j for j in range(h.n) if j not in set(B)]
            if verdict.side is Side.LEFT:
                inner_g = induced_subgraph(h, A, B)
                outer_g = induced_subgraph(h, rest_a, rest_b)
            else:
                inner_g = induced_subgraph(h, B, A)
                outer_g = induced_subgraph(h, rest_b, rest_a)
            li, gi, ei, ni = solve(inner_g, None)
            lo, go, eo, no = solve(outer_g, None)
            node.terms.append(ProductTerm(tuple(B), ni, no))
            if li == -math.inf or lo == -math.inf:
                continue
            logs.append(li + lo)
            worst = max(worst, gi + go)
            if exact_sum is not None and ei is not None and eo is not None:
                exact_sum += ei * eo
            else:
                exact_sum = None
        total = _logsumexp(logs)
        if total == -math.inf:
            return total, 0.0, 0, node
        return total, worst, exact_sum, node

    if not has_perfect_matching(g):
        root = TraceNode(g.n, "zero")
        return _zero(epsilon=epsilon, base_cap=base_cap), root

    log_est, guarantee, exact_value, root = solve(g, alpha)
    exact = exact_value is not None
    if exact and exact_value:
        log_est = math.log(exact_value)
    result = ApproxResult(
        log_estimate=log_est,
        guarantee_exponent=0.0 if exact else guarantee,
        exact=exact,
        exact_value=exact_value,
        converged=stats["converged"],
        parameters={
            "epsilon": epsilon,
            "alpha": root.alpha,
            "lambda": root.lam,
            "max_degree": g.max_degree,
            "depth": stats["max_depth"],
            "base_cap": base_cap,
            "calib_c": c,
            "unsound_fast": unsound_fast,
            "trace": root.summary(),
        },
    )
    return result, root


def product_identity_check(
    g: BipartiteGraph, subset: tuple[int, ...] | list[int], side: Side = Side.LEFT
) -> tuple[int, int]:
    """Both sides of the split identity, computed exactly.

    ``subset`` is A on ``side``; terms run over B subset N(A) with |B| = |A|.
    """
    A = tuple(sorted(set(subset)))
    if not A or len(A) >= g.n:
        raise ValueError("A must be a nonempty proper subset of one side")
    lhs = permanent_exact(g)
    nb = g.neighbor_mask(side, sum(1 << i for i in A))
    nbs = [j for j in range(g.n) if nb >> j & 1]
    rest_a = [i for i in range(g.n) if i not in A]
    rhs = 0
    for B in combinations(nbs, len(A)):
        rest_b = [j for j in range(g.n) if j not in B]
        if side is Side.LEFT:
            inner, outer = induced_subgraph(g, A, B), induced_subgraph(g, rest_a, rest_b)
        else:
            inner, outer = induced_subgraph(g, B, A), induced_subgraph(g, rest_b, rest_a)
        p = permanent_exact(inner)
        if p:
            rhs += p * permanent_exact(outer)
    return lhs, rhs
