"""Exponential-time exact computations used as ground truth and as base cases."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from . import kernels
from .graph import BipartiteGraph

DEFAULT_EXACT_CAP = 20


class ExactSizeError(ValueError):
    """Input too large for an exponential-time oracle."""


class NoPerfectMatchingError(ValueError):
    pass


def _check_cap(g: BipartiteGraph, cap: int | None) -> None:
    cap = DEFAULT_EXACT_CAP if cap is None else cap
    if g.n > cap:
        raise ExactSizeError(f"n={g.n} too large for exact oracle (cap {cap})")


def permanent_exact(g: BipartiteGraph, cap: int | None = None) -> int:
    """Number of perfect matchings, by Ryser inclusion-exclusion."""
    _check_cap(g, cap)
    return kernels.permanent_rows(list(g.row_masks), g.n)


@dataclass(frozen=True)
class MatchingCountVector:
    """``counts[k]`` is the number of k-edge matchings, k = 0..n."""

    counts: tuple[int, ...]

    def __getitem__(self, k: int) -> int:
        return self.counts[k]

    def __len__(self) -> int:
        return len(self.counts)

    @property
    def n(self) -> int:
        return len(self.counts) - 1

    @property
    def perfect(self) -> int:
        return self.counts[-1]

    def partition_function(self, lam) -> Fraction | float:
        """Sum of lam**k * M(k); exact when ``lam`` is rational."""
        if isinstance(lam, (int, float, Rational)):
            # floats are dyadic rationals, so this stays exact too
            lam = Fraction(lam)
            return sum((c * lam**k for k, c in enumerate(self.counts)), Fraction(0))
        return sum(c * lam**k for k, c in enumerate(self.counts))


def _add_shift(a: list[int], b: list[int]) -> list[int]:
    # a + x*b
    out = a + [0] * max(0, len(b) + 1 - len(a))
    for k, c in enumerate(b):
        out[k + 1] += c
    return out


def matching_counts(g: BipartiteGraph, cap: int | None = None) -> MatchingCountVector:
    """Exact M(0..n) by deletion/contraction on the smallest remaining edge.

    M_G = M_{G-e} + x * M_{G-u-v}.  Memoised on the remaining row masks for
    the duration of one call.
    """
    _check_cap(g, cap)
    memo: dict[tuple[int, ...], list[int]] = {}

    def rec(rows: tuple[int, ...]) -> list[int]:
        i = next((k for k, r in enumerate(rows) if r), None)
        if i is None:
            return [1]
        hit = memo.get(rows)
        if hit is not None:
            return hit
        r = rows[i]
        low = r & -r
        deleted = rows[:i] + (r ^ low,) + rows[i + 1 :]
        keep = ~low
        contracted = tuple(0 if k <= i else rows[k] & keep for k in range(len(rows)))
        out = _add_shift(rec(deleted), rec(contracted))
        memo[rows] = out
        return out

    counts = rec(tuple(g.row_masks))
    counts = counts + [0] * (g.n + 1 - len(counts))
    return MatchingCountVector(tuple(counts))


@dataclass(frozen=True)
class ExactPartitionValue:
    value: Fraction | float
    lam: object

    @property
    def log_value(self) -> float:
        return _log_fraction(self.value)


def _log_fraction(x) -> float:
    if isinstance(x, Fraction):
        # log of huge rationals without float overflow
        return _log_int(x.numerator) - _log_int(x.denominator)
    return math.log(x)


def _log_int(m: int) -> float:
    if m <= 0:
        raise ValueError("log of non-positive value")
    shift = max(0, m.bit_length() - 1000)
    return math.log(m >> shift) + shift * math.log(2)


def partition_function_exact(
    g: BipartiteGraph, lam, cap: int | None = None
) -> ExactPartitionValue:
    """Z(lam, G) = sum_k lam**k M(k)."""
    if lam <= 0:
        raise ValueError(f"activity must be positive, got {lam}")
    mc = matching_counts(g, cap)
    return ExactPartitionValue(mc.partition_function(lam), lam)


def max_matching(g: BipartiteGraph) -> dict[int, int]:
    """Maximum matching as a left->right map, via augmenting-path search."""
    match_r: list[int] = [-1] * g.n
    adj = g.left_adj

    def augment(u: int, seen: list[bool]) -> bool:
        # iterative DFS would be overkill at these sizes; recursion depth <= n
        for v in adj[u]:
            if seen[v]:
                continue
            seen[v] = True
            if match_r[v] == -1 or augment(match_r[v], seen):
                match_r[v] = u
                return True
        return False

    for u in range(g.n):
        augment(u, [False] * g.n)
    return {u: v for v, u in enumerate(match_r) if u != -1}


def max_matching_size(g: BipartiteGraph) -> int:
    return len(max_matching(g))


def has_perfect_matching(g: BipartiteGraph) -> bool:
    return max_matching_size(g) == g.n


@dataclass(frozen=True)
class RatioRow:
    k: int
    ratio: Fraction | None  # None when M(k+1) == 0
    bound: float
    exceeds: bool

    @property
    def undefined(self) -> bool:
        return self.ratio is None


def ratio_bound(n: int, k: int, alpha: float, max_degree: int, c: float = 1.0) -> float:
    """2 (n/(n-k))^(c log(Delta) / log(1+alpha)); the constant c is a knob."""
    if alpha <= 0:
        return math.inf
    denom = math.log1p(alpha)
    expo = 0.0 if max_degree <= 1 else c * math.log(max_degree) / denom
    return 2.0 * (n / (n - k)) ** expo


def ratio_diagnostics(
    g: BipartiteGraph,
    alpha: float,
    max_degree: int | None = None,
    c: float = 1.0,
    cap: int | None = None,
    require_perfect: bool = True,
) -> list[RatioRow]:
    """Exact M(k)/M(k+1) next to the bound with calibration constant ``c``.

    Rows flagged ``exceeds`` are for calibrating ``c``; nothing is asserted.
    With ``require_perfect=False`` graphs lacking a perfect matching are
    accepted and rows with M(k+1) = 0 come back undefined.
    """
    mc = matching_counts(g, cap)
    if require_perfect and mc.perfect == 0:
        raise NoPerfectMatchingError("ratio diagnostics need a perfect matching")
    delta = g.max_degree if max_degree is None else max_degree
    rows = []
    for k in range(g.n):
        nxt = mc[k + 1]
        ratio = Fraction(mc[k], nxt) if nxt else None
        b = ratio_bound(g.n, k, alpha, delta, c)
        rows.append(RatioRow(k, ratio, b, ratio is not None and float(ratio) > b))
    return rows
