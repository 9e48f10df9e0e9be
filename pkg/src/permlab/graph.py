"""Balanced bipartite graphs over two parts of equal size.

Vertices on each side are indexed ``0..n-1``.  Adjacency is kept three ways:
the edge set (the semantics), sorted neighbour tuples, and integer bitmasks
per row/column which the kernels use for fast unions.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import NamedTuple


class GraphFormatError(ValueError):
    """Raised when input cannot be read as a balanced bipartite graph."""


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"

    @property
    def other(self) -> "Side":
        return Side.RIGHT if self is Side.LEFT else Side.LEFT


class Vertex(NamedTuple):
    side: Side
    index: int

    def __repr__(self) -> str:
        return f"{self.side.value}{self.index}"


def left(i: int) -> Vertex:
    return Vertex(Side.LEFT, i)


def right(j: int) -> Vertex:
    return Vertex(Side.RIGHT, j)


@dataclass(frozen=True)
class DegreeProfile:
    max_degree: int
    left: tuple[int, ...]
    right: tuple[int, ...]


class BipartiteGraph:
    """Immutable balanced bipartite graph with parts of size ``n``."""

    __slots__ = ("n", "edges", "left_adj", "right_adj", "row_masks", "col_masks")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 0:
            raise GraphFormatError(f"part size must be non-negative, got {n}")
        edge_list = [(int(i), int(j)) for i, j in edges]
        seen = set()
        for i, j in edge_list:
            if not (0 <= i < n and 0 <= j < n):
                raise GraphFormatError(f"edge ({i}, {j}) out of range for n={n}")
            if (i, j) in seen:
                raise GraphFormatError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))
        la: list[list[int]] = [[] for _ in range(n)]
        ra: list[list[int]] = [[] for _ in range(n)]
        rows = [0] * n
        cols = [0] * n
        for i, j in sorted(seen):
            la[i].append(j)
            ra[j].append(i)
            rows[i] |= 1 << j
            cols[j] |= 1 << i
        self.n = n
        self.edges = frozenset(seen)
        self.left_adj = tuple(tuple(a) for a in la)
        self.right_adj = tuple(tuple(sorted(a)) for a in ra)
        self.row_masks = tuple(rows)
        self.col_masks = tuple(cols)

    # construction -------------------------------------------------------

    @classmethod
    def from_matrix(cls, rows: Sequence[Sequence[int]]) -> "BipartiteGraph":
        n = len(rows)
        edges = []
        for i, row in enumerate(rows):
            if len(row) != n:
                raise GraphFormatError(
                    f"non-square matrix: row {i} has length {len(row)}, expected {n}"
                )
            for j, a in enumerate(row):
                if a not in (0, 1):
                    raise GraphFormatError(f"entry ({i}, {j}) = {a!r} is not 0/1")
                if a == 1:
                    edges.append((i, j))
        return cls(n, edges)

    @classmethod
    def complete(cls, n: int) -> "BipartiteGraph":
        return cls(n, ((i, j) for i in range(n) for j in range(n)))

    @classmethod
    def identity(cls, n: int) -> "BipartiteGraph":
        return cls(n, ((i, i) for i in range(n)))

    def to_matrix(self) -> list[list[int]]:
        return [[(m >> j) & 1 for j in range(self.n)] for m in self.row_masks]

    def transpose(self) -> "BipartiteGraph":
        return BipartiteGraph(self.n, ((j, i) for i, j in self.edges))

    def with_edge(self, i: int, j: int) -> "BipartiteGraph":
        return BipartiteGraph(self.n, self.edges | {(i, j)})

    def without_edge(self, i: int, j: int) -> "BipartiteGraph":
        return BipartiteGraph(self.n, self.edges - {(i, j)})

    # queries ------------------------------------------------------------

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def adjacency(self, side: Side) -> tuple[tuple[int, ...], ...]:
        return self.left_adj if side is Side.LEFT else self.right_adj

    def masks(self, side: Side) -> tuple[int, ...]:
        return self.row_masks if side is Side.LEFT else self.col_masks

    def degree(self, v: Vertex) -> int:
        self._check_vertex(v)
        return len(self.adjacency(v.side)[v.index])

    def degrees(self) -> DegreeProfile:
        ld = tuple(len(a) for a in self.left_adj)
        rd = tuple(len(a) for a in self.right_adj)
        return DegreeProfile(max(ld + rd, default=0), ld, rd)

    @property
    def max_degree(self) -> int:
        return self.degrees().max_degree

    def vertex_masks(self) -> list[int]:
        """Adjacency over ``2n`` vertices: left i is bit i, right j is bit n+j."""
        n = self.n
        out = [m << n for m in self.row_masks]
        out.extend(self.col_masks)
        return out

    def neighbor_mask(self, side: Side, subset_mask: int) -> int:
        masks = self.masks(side)
        acc = 0
        while subset_mask:
            low = subset_mask & -subset_mask
            acc |= masks[low.bit_length() - 1]
            subset_mask ^= low
        return acc

    def _check_vertex(self, v: Vertex) -> None:
        if not 0 <= v.index < self.n:
            raise IndexError(f"vertex {v!r} not in graph with n={self.n}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BipartiteGraph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"BipartiteGraph(n={self.n}, edges={len(self.edges)})"


def from_adjacency_matrix(rows: Sequence[Sequence[int]]) -> BipartiteGraph:
    return BipartiteGraph.from_matrix(rows)


def _side_of(vertices: Iterable[Vertex]) -> tuple[Side | None, list[int]]:
    side = None
    idx = []
    for v in vertices:
        if side is None:
            side = v.side
        elif v.side is not side:
            raise ValueError("vertex set mixes left and right vertices")
        idx.append(v.index)
    return side, idx


def neighbors(g: BipartiteGraph, s: Iterable[Vertex]) -> set[Vertex]:
    """Neighbourhood N(s) of a one-sided vertex set."""
    side, idx = _side_of(s)
    if side is None:
        return set()
    adj = g.adjacency(side)
    out: set[Vertex] = set()
    for i in idx:
        g._check_vertex(Vertex(side, i))
        out.update(Vertex(side.other, j) for j in adj[i])
    return out


def induced_subgraph(
    g: BipartiteGraph, left: Iterable[int], right: Iterable[int]
) -> BipartiteGraph:
    """Subgraph on the given left/right indices, reindexed in ascending order."""
    ls = sorted(set(left))
    rs = sorted(set(right))
    if len(ls) != len(rs):
        raise ValueError(f"unbalanced induced subgraph: {len(ls)} left vs {len(rs)} right")
    for i in ls + rs:
        if not 0 <= i < g.n:
            raise IndexError(f"index {i} out of range for n={g.n}")
    rpos = {j: k for k, j in enumerate(rs)}
    edges = [
        (a, rpos[j]) for a, i in enumerate(ls) for j in g.left_adj[i] if j in rpos
    ]
    return BipartiteGraph(len(ls), edges)


def block_diagonal(*blocks: BipartiteGraph) -> BipartiteGraph:
    edges = []
    off = 0
    for b in blocks:
        edges.extend((i + off, j + off) for i, j in b.edges)
        off += b.n
    return BipartiteGraph(off, edges)


# text formats ------------------------------------------------------------


def parse_matrix_text(text: str) -> BipartiteGraph:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        chars = "".join(line.split())
        if not chars:
            continue
        if set(chars) - {"0", "1"}:
            raise GraphFormatError(f"line {lineno}: expected only '0'/'1' characters")
        rows.append([int(c) for c in chars])
    return BipartiteGraph.from_matrix(rows)


def parse_edge_list_text(text: str) -> BipartiteGraph:
    lines = [ln.split() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise GraphFormatError("empty edge list")
    head = lines[0]
    if len(head) != 3 or head[0] != "bipartite":
        raise GraphFormatError("edge list must start with 'bipartite <n> <m>'")
    try:
        n, m = int(head[1]), int(head[2])
        pairs = [(int(a), int(b)) for a, b in (ln for ln in lines[1:])]
    except ValueError as exc:
        raise GraphFormatError(f"malformed edge list: {exc}") from None
    if n < 0 or m < 0:
        raise GraphFormatError("negative size in header")
    if len(pairs) != m:
        raise GraphFormatError(f"header declares {m} edges, found {len(pairs)}")
    return BipartiteGraph(n, pairs)


def parse_graph_text(text: str) -> BipartiteGraph:
    """Read either supported format, chosen by the first non-blank line."""
    for line in text.splitlines():
        if line.strip():
            if line.split()[0] == "bipartite":
                return parse_edge_list_text(text)
            return parse_matrix_text(text)
    raise GraphFormatError("empty input")


def format_matrix(g: BipartiteGraph) -> str:
    return "".join("".join(map(str, row)) + "\n" for row in g.to_matrix())


def format_edge_list(g: BipartiteGraph) -> str:
    lines = [f"bipartite {g.n} {g.num_edges}"]
    lines.extend(f"{i} {j}" for i, j in sorted(g.edges))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Matching:
    """A set of pairwise disjoint edges, stored as (left, right) pairs."""

    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        ls = [i for i, _ in self.edges]
        rs = [j for _, j in self.edges]
        if len(set(ls)) != len(ls) or len(set(rs)) != len(rs):
            raise ValueError("edges share a vertex; not a matching")

    @classmethod
    def of(cls, pairs: Iterable[tuple[int, int]]) -> "Matching":
        return cls(frozenset((int(i), int(j)) for i, j in pairs))

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def left_mate(self) -> dict[int, int]:
        return dict(self.edges)

    @property
    def right_mate(self) -> dict[int, int]:
        return {j: i for i, j in self.edges}

    @property
    def matched_left(self) -> frozenset[int]:
        return frozenset(i for i, _ in self.edges)

    @property
    def matched_right(self) -> frozenset[int]:
        return frozenset(j for _, j in self.edges)

    def check(self, g: BipartiteGraph) -> None:
        missing = self.edges - g.edges
        if missing:
            raise ValueError(f"matching uses non-edges {sorted(missing)}")
