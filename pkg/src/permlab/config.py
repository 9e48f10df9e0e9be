"""Shared defaults and environment knobs."""

from __future__ import annotations

import os

EXACT_CAP = 20
ENUMERATION_EDGE_CAP = 16
EXPANSION_CAP = 14
BASE_CASE_CAP = 8
CALIBRATION_C = 2.0
LAMBDA_FLOOR = 10.0
NODE_BUDGET = 200_000


def thread_count() -> int:
    """Worker count from ``PERMLAB_THREADS``; unset or invalid means 1."""
    raw = os.environ.get("PERMLAB_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1
