"""Vertex expansion: measurement, the expander test, alternating paths.

The expansion coefficient is the *minimum* of |N(A)|/|A| - 1 over one-sided
sets with |A| <= n/2.  That is the reading under which "every such A has
|N(A)| >= (1+alpha)|A|" and "expansion >= alpha" say the same thing.
"""

from __future__ import annotations

import math
from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass
from itertools import combinations

from . import kernels
from .config import EXPANSION_CAP
from .graph import BipartiteGraph, Matching, Side, Vertex

HEURISTIC_SUBSET_BUDGET = 100_000


class ExpansionCapError(ValueError):
    pass


@dataclass(frozen=True)
class Certified:
    alpha: float
    heuristic: bool = False

    @property
    def kind(self) -> str:
        return "certified_heuristic" if self.heuristic else "certified"


@dataclass(frozen=True)
class Violator:
    """A one-sided set A with |A| <= n/2 and |N(A)| <= (1 + 2 alpha)|A|."""

    alpha: float
    side: Side
    subset: tuple[int, ...]
    neighborhood: tuple[int, ...]

    kind = "violator"

    @property
    def neighborhood_size(self) -> int:
        return len(self.neighborhood)

    @property
    def hall_violation(self) -> bool:
        return len(self.neighborhood) < len(self.subset)

    @property
    def vertices(self) -> set[Vertex]:
        return {Vertex(self.side, i) for i in self.subset}


ExpansionVerdict = Certified | Violator


def _bits(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def _ratio(nsize: int, size: int) -> float:
    # one expression shared by measurement and test, so that
    # "certified" and "coefficient >= alpha" agree bit for bit
    return (nsize - size) / size


def expansion_coefficient(g: BipartiteGraph, cap: int = EXPANSION_CAP) -> float:
    """min over A (either side, 1 <= |A| <= n/2) of |N(A)|/|A| - 1.

    Returns ``inf`` when no set qualifies (n <= 1).
    """
    if g.n > cap:
        raise ExpansionCapError(
            f"n={g.n} exceeds the exact expansion cap {cap}; "
            "use test_expansion with a specific alpha instead"
        )
    best = math.inf
    half = g.n // 2
    for side in (Side.LEFT, Side.RIGHT):
        table = kernels.neighborhood_table(list(g.masks(side)), g.n)
        for mask in range(1, len(table)):
            size = mask.bit_count()
            if size <= half:
                r = _ratio(table[mask].bit_count(), size)
                if r < best:
                    best = r
    return best


def _scan(g, side, sizes, alpha, budget=None):
    masks = g.masks(side)
    seen = 0
    for size in sizes:
        for combo in combinations(range(g.n), size):
            if budget is not None:
                if seen >= budget:
                    return None, True
                seen += 1
            nb = 0
            for i in combo:
                nb |= masks[i]
            if _ratio(nb.bit_count(), size) < alpha:
                return Violator(alpha, side, combo, _bits(nb)), False
    return None, False


def _ball_candidates(g: BipartiteGraph, side: Side) -> Iterable[tuple[int, ...]]:
    """Same-side BFS balls around each vertex, grown while |ball| <= n/2."""
    half = g.n // 2
    own = g.masks(side)
    back = g.masks(side.other)
    for v in range(g.n):
        ball = 1 << v
        while True:
            two_hop = 0
            for u in _bits(ball):
                for w in _bits(own[u]):
                    two_hop |= back[w]
            grown = ball | two_hop
            if grown == ball or grown.bit_count() > half:
                break
            ball = grown
            yield _bits(ball)


def test_expansion(
    g: BipartiteGraph,
    alpha: float,
    cap: int = EXPANSION_CAP,
    budget: int = HEURISTIC_SUBSET_BUDGET,
) -> ExpansionVerdict:
    """Certify ``g`` as an alpha-expander or return a poorly expanding set.

    Up to ``cap`` every set with |A| <= n/2 is checked, left side first, by
    size and then lexicographically; the first set with
    |N(A)| < (1 + alpha)|A| is returned.  Above ``cap`` only sizes up to
    ceil(2 alpha n) (within ``budget`` subsets) and BFS balls are checked, and
    a clean pass is reported as a heuristic certificate.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    half = g.n // 2
    if g.n <= cap:
        for side in (Side.LEFT, Side.RIGHT):
            found, _ = _scan(g, side, range(1, half + 1), alpha)
            if found:
                return found
        return Certified(alpha)

    top = min(half, math.ceil(2 * alpha * g.n))
    for side in (Side.LEFT, Side.RIGHT):
        found, _ = _scan(g, side, range(1, top + 1), alpha, budget)
        if found:
            return found
    for side in (Side.LEFT, Side.RIGHT):
        for combo in _ball_candidates(g, side):
            nb = g.neighbor_mask(side, sum(1 << i for i in combo))
            if _ratio(nb.bit_count(), len(combo)) < alpha:
                return Violator(alpha, side, combo, _bits(nb))
    return Certified(alpha, heuristic=True)


test_expansion.__test__ = False  # not a pytest test despite the name


# alternating paths ---------------------------------------------------------


@dataclass(frozen=True)
class AlternatingPath:
    """Left-unmatched start, right-unmatched end, alternating off/on the matching."""

    vertices: tuple[Vertex, ...]

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def length(self) -> int:
        return len(self.vertices)

    def non_matching_edges(self) -> list[tuple[int, int]]:
        vs = self.vertices
        return [(vs[t].index, vs[t + 1].index) for t in range(0, len(vs), 2)]

    def matching_edges(self) -> list[tuple[int, int]]:
        vs = self.vertices
        return [(vs[t + 1].index, vs[t].index) for t in range(1, len(vs) - 1, 2)]

    def augment(self, m: Matching) -> Matching:
        drop = set(self.matching_edges())
        if not drop <= m.edges:
            raise ValueError("path is not alternating with respect to this matching")
        return Matching((m.edges - drop) | frozenset(self.non_matching_edges()))


def find_alternating_path(
    g: BipartiteGraph, m: Matching, start_set: Iterable[int | Vertex] | None = None
) -> AlternatingPath | None:
    """Shortest alternating path from ``start_set`` to an unmatched right vertex.

    ``start_set`` defaults to every unmatched left vertex.  Ties break toward
    smaller indices.  Returns ``None`` when no such path exists.
    """
    m.check(g)
    mate_l = m.left_mate
    mate_r = m.right_mate
    if start_set is None:
        starts = [i for i in range(g.n) if i not in mate_l]
    else:
        starts = []
        for s in start_set:
            if isinstance(s, Vertex):
                if s.side is not Side.LEFT:
                    raise ValueError(f"start vertex {s!r} is not on the left")
                s = s.index
            if not 0 <= s < g.n:
                raise IndexError(f"start vertex {s} out of range")
            if s in mate_l:
                raise ValueError(f"start vertex left{s} is matched")
            starts.append(s)
        starts = sorted(set(starts))

    parent_left: dict[int, int | None] = {s: None for s in starts}
    parent_right: dict[int, int] = {}
    queue = deque(starts)
    while queue:
        u = queue.popleft()
        for v in g.left_adj[u]:
            if v in parent_right or mate_l.get(u) == v:
                continue
            parent_right[v] = u
            if v not in mate_r:
                return AlternatingPath(_unwind(v, parent_left, parent_right, mate_r))
            w = mate_r[v]
            if w not in parent_left:
                parent_left[w] = v
                queue.append(w)
    return None


def _unwind(v, parent_left, parent_right, mate_r):
    out = [Vertex(Side.RIGHT, v)]
    while True:
        u = parent_right[v]
        out.append(Vertex(Side.LEFT, u))
        back = parent_left[u]
        if back is None:
            break
        out.append(Vertex(Side.RIGHT, back))
        v = back
    out.reverse()
    return tuple(out)


def alternating_length_bound(n: int, k: int, alpha: float, c: float = 1.0) -> float:
    """c * log(n/(n-k)) / log(1+alpha)."""
    if not 0 <= k < n:
        raise ValueError(f"need 0 <= k < n, got k={k}, n={n}")
    if not alpha > 0 or not c > 0:
        raise ValueError("alpha and c must be positive")
    return c * math.log(n / (n - k)) / math.log1p(alpha)


def path_length_yardstick(n: int, k: int, alpha: float, c: float = 1.0) -> float:
    """Bound plus the additive floor 2, the shortest possible path length."""
    return 2.0 + alternating_length_bound(n, k, alpha, c)


def calibrate_length_constant(samples: Iterable[tuple[int, int, float, int]]) -> float:
    """Smallest c with length <= 2 + c*log(n/(n-k))/log(1+alpha) on all samples.

    ``samples`` holds ``(n, k, alpha, measured_length)``.  Returns ``inf`` if a
    sample with a zero log-ratio exceeds the floor.
    """
    c = 0.0
    for n, k, alpha, length in samples:
        raw = alternating_length_bound(n, k, alpha, 1.0)
        excess = length - 2
        if excess <= 0:
            continue
        if raw == 0:
            return math.inf
        c = max(c, excess / raw)
    return c
