"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3]

Times the Ryser permanent and the truncated unmatched-probability recursion
on fixed inputs, checks both backends return the same numbers, and prints a
table of best-of-N wall times.
"""

from __future__ import annotations

import argparse
import random
import timeit

from permlab import _purepy, kernels
from permlab.graph import BipartiteGraph


def _random_graph(n: int, p: float, seed: int) -> BipartiteGraph:
    rng = random.Random(seed)
    return BipartiteGraph(n, [(i, j) for i in range(n) for j in range(n) if rng.random() < p])


def cases():
    for n in (10, 14, 17):
        g = _random_graph(n, 0.6, n)
        rows = list(g.row_masks)
        yield f"permanent n={n}", (lambda m: (lambda: m.permanent_rows(rows, n)))
    for n, depth in ((7, 14), (9, 10), (9, 18)):
        g = BipartiteGraph.complete(n)
        adj = g.vertex_masks()
        yield f"decay K{n},{n} depth={depth}", (
            lambda m: (lambda: m.unmatched_bracket(adj, 0, 0, 20.0, depth))
        )


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    native = kernels._native
    if native is None:
        print("compiled extension not available; timing the fallback only")
    print(f"{'kernel':<26}{'python s':>12}{'native s':>12}{'speedup':>10}")
    for name, make in cases():
        py_fn = make(_purepy)
        py_t = min(timeit.repeat(py_fn, number=1, repeat=args.repeat))
        if native is None:
            print(f"{name:<26}{py_t:>12.4f}{'-':>12}{'-':>10}")
            continue
        nat_fn = make(native)
        a, b = py_fn(), nat_fn()
        same = a == b if isinstance(a, int) else all(abs(x - y) <= 1e-12 * abs(x) for x, y in zip(a, b))
        if not same:
            raise SystemExit(f"{name}: backends disagree ({a} vs {b})")
        nat_t = min(timeit.repeat(nat_fn, number=1, repeat=args.repeat))
        print(f"{name:<26}{py_t:>12.4f}{nat_t:>12.4f}{py_t / nat_t:>9.0f}x")


if __name__ == "__main__":
    main()
