"""Kernel dispatch: compiled extension when importable, pure Python otherwise.

Set ``PERMLAB_PURE_PYTHON=1`` to force the fallback.  ``BACKEND`` names the
implementation in use.
"""

from __future__ import annotations

import os

from . import _purepy

try:
    if os.environ.get("PERMLAB_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure Python kernels requested")
    from . import _native  # type: ignore[attr-defined]
except ImportError:
    _native = None

BACKEND = "native" if _native is not None else "python"


def permanent_rows(rows: list[int], n: int) -> int:
    if _native is not None and n <= _native.MAX_PERMANENT_N:
        return _native.permanent_rows(rows, n)
    return _purepy.permanent_rows(rows, n)


def unmatched_bracket(
    adj: list[int], removed: int, v: int, lam: float, depth: int
) -> tuple[float, float]:
    if _native is not None and len(adj) <= _native.MAX_VERTICES:
        return _native.unmatched_bracket(adj, removed, v, lam, depth)
    return _purepy.unmatched_bracket(adj, removed, v, lam, depth)


def neighborhood_table(masks: list[int], n: int) -> list[int]:
    if _native is not None and n <= 24:
        return _native.neighborhood_table(masks, n)
    return _purepy.neighborhood_table(masks, n)
