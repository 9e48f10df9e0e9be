"""Deterministic graph families for the bench harness and tests.

All randomness comes from ``random.Random`` (Mersenne Twister, MT19937)
seeded explicitly, so a (seed, n) pair always yields the same graph.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .graph import BipartiteGraph, block_diagonal


@dataclass(frozen=True)
class Instance:
    name: str
    family: str
    graph: BipartiteGraph


def complete(n: int) -> BipartiteGraph:
    return BipartiteGraph.complete(n)


def identity_plus_noise(n: int, p: float, rng: random.Random) -> BipartiteGraph:
    edges = {(i, i) for i in range(n)}
    edges |= {(i, j) for i in range(n) for j in range(n) if i != j and rng.random() < p}
    return BipartiteGraph(n, edges)


def random_bipartite(n: int, p: float, rng: random.Random) -> BipartiteGraph:
    return BipartiteGraph(n, [(i, j) for i in range(n) for j in range(n) if rng.random() < p])


def random_regular(n: int, d: int, rng: random.Random, attempts: int = 1000) -> BipartiteGraph:
    """Union of d random permutation matrices, resampled until they are disjoint."""
    if not 0 <= d <= n:
        raise ValueError(f"need 0 <= d <= n, got d={d}, n={n}")
    if d == n:
        return BipartiteGraph.complete(n)
    for _ in range(attempts):
        edges: set[tuple[int, int]] = set()
        for _ in range(d):
            perm = list(range(n))
            rng.shuffle(perm)
            edges.update((i, perm[i]) for i in range(n))
        if len(edges) == n * d:
            return BipartiteGraph(n, edges)
    raise RuntimeError(f"no simple {d}-regular bipartite graph found for n={n}")


def two_block(n: int, rng: random.Random, p_in: float = 0.6, p_cross: float = 0.3) -> BipartiteGraph:
    """Two dense blocks on the diagonal plus sparse one-way cross edges.

    The first block's left side has neighbourhood barely larger than itself,
    which forces a split in the decomposition.
    """
    a = n // 2
    b = n - a
    blk1 = identity_plus_noise(a, p_in, rng)
    blk2 = identity_plus_noise(b, p_in, rng)
    g = block_diagonal(blk1, blk2)
    extra = {(i, a + j) for i in range(a) for j in range(b) if rng.random() < p_cross}
    return BipartiteGraph(n, g.edges | extra)


def generate(seed: int, cap: int, low: int = 2) -> list[Instance]:
    """The bench corpus: five families for every n in [low, cap]."""
    rng = random.Random(seed)
    out = []
    for n in range(low, cap + 1):
        out.append(Instance(f"complete-{n}", "complete", complete(n)))
        out.append(Instance(f"identity-noise-{n}", "identity_noise", identity_plus_noise(n, 0.25, rng)))
        out.append(Instance(f"regular3-{n}", "regular", random_regular(n, min(3, n), rng)))
        out.append(Instance(f"two-block-{n}", "two_block", two_block(n, rng)))
        out.append(Instance(f"sparse-{n}", "sparse", random_bipartite(n, 0.3, rng)))
    return out
