"""Pure-Python kernels.  Same signatures and arithmetic order as ``_native``."""

from __future__ import annotations


def permanent_rows(rows: list[int], n: int) -> int:
    """Ryser inclusion-exclusion over column subsets, Gray-code order.

    ``rows[i]`` is the bitmask of columns adjacent to row ``i``.
    """
    if n == 0:
        return 1
    for r in rows:
        if not r:
            return 0
    total = 0
    subset = 0
    for k in range(1, 1 << n):
        # flip the bit at position ctz(k)
        subset ^= k & -k
        prod = 1
        for r in rows:
            c = (r & subset).bit_count()
            if c == 0:
                prod = 0
                break
            prod *= c
        if prod:
            parity = subset.bit_count() & 1
            total += -prod if parity else prod
    return -total if n & 1 else total


def unmatched_bracket(
    adj: list[int], removed: int, v: int, lam: float, depth: int
) -> tuple[float, float]:
    """Depth-truncated unmatched probability of ``v`` under both boundaries.

    Returns ``(p_free, p_tight)``: leaves set to 1 (every boundary vertex
    unmatched) and to ``1/(1+lam*deg)`` (every boundary vertex pushed to its
    most-matched value).  The true probability lies between the two.
    """
    memo: dict[tuple[int, int], tuple[float, float]] = {}

    def rec(u: int, gone: int, d: int) -> tuple[float, float]:
        nb = adj[u] & ~gone
        if not nb:
            return 1.0, 1.0
        if d == 0:
            return 1.0, 1.0 / (1.0 + lam * nb.bit_count())
        key = (gone, u)
        hit = memo.get(key)
        if hit is not None:
            return hit
        inner = gone | (1 << u)
        sa = 0.0
        sb = 0.0
        while nb:
            low = nb & -nb
            a, b = rec(low.bit_length() - 1, inner, d - 1)
            sa += a
            sb += b
            nb ^= low
        out = (1.0 / (1.0 + lam * sa), 1.0 / (1.0 + lam * sb))
        memo[key] = out
        return out

    return rec(v, removed, depth)


def neighborhood_table(masks: list[int], n: int) -> list[int]:
    """N(S) for every subset S of one side, indexed by bitmask."""
    table = [0] * (1 << n)
    for s in range(1, 1 << n):
        low = s & -s
        table[s] = table[s ^ low] | masks[low.bit_length() - 1]
    return table
