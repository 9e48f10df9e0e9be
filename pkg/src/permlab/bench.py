"""Corpus benchmark: exact oracle against both approximation routes."""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor

from . import __version__, config, corpus, kernels
from .approx import approx_permanent_expander, approx_permanent_general
from .exact import permanent_exact
from .expansion import expansion_coefficient


class SandwichViolation(AssertionError):
    def __init__(self, row: dict, instance: corpus.Instance):
        super().__init__(f"sandwich bound violated on {instance.name}")
        self.row = row
        self.instance = instance


def _within(log_est: float, log_perm: float, n: int, epsilon: float) -> bool:
    if log_perm == -math.inf or log_est == -math.inf:
        return log_perm == log_est
    lo = -n * math.log1p(epsilon)
    hi = (n + 1) * math.log1p(epsilon)
    diff = log_est - log_perm
    # 1e-9 absorbs float rounding in ln
    return lo - 1e-9 <= diff <= hi + 1e-9


def _log_err(log_est, log_perm):
    if log_perm == -math.inf and log_est == -math.inf:
        return 0.0
    return abs(log_est - log_perm)


def run_instance(
    inst: corpus.Instance,
    epsilon: float,
    base_cap: int = config.BASE_CASE_CAP,
    c: float = config.CALIBRATION_C,
    timing: bool = False,
) -> dict:
    g = inst.graph
    t0 = time.perf_counter()
    perm = permanent_exact(g)
    log_perm = math.log(perm) if perm else -math.inf
    alpha = expansion_coefficient(g)
    general, trace = approx_permanent_general(g, epsilon, base_cap=base_cap, c=c, threads=1)

    lam = None
    exp_log = None
    if perm and alpha > 0:
        exp_res = approx_permanent_expander(g, epsilon, alpha, c=c, threads=1)
        lam = exp_res.parameters["lambda"]
        exp_log = exp_res.log_estimate

    ok = _within(general.log_estimate, log_perm, g.n, epsilon)
    if exp_log is not None:
        ok = ok and _within(exp_log, log_perm, g.n, epsilon)

    summary = trace.summary()
    row = {
        "name": inst.name,
        "family": inst.family,
        "n": g.n,
        "edges": g.num_edges,
        "max_degree": g.max_degree,
        "alpha": None if math.isinf(alpha) else alpha,
        "lambda": lam,
        "permanent": str(perm),
        "general_log_estimate": None if general.is_zero else general.log_estimate,
        "general_error_factor": math.exp(_log_err(general.log_estimate, log_perm)),
        "expander_log_estimate": exp_log,
        "expander_error_factor": None if exp_log is None else math.exp(_log_err(exp_log, log_perm)),
        "bound_factor": (1 + epsilon) ** (g.n + 1),
        "exact": general.exact,
        "decomposition_nodes": summary["nodes"],
        "violator_nodes": summary["violator"],
        "ok": ok,
    }
    if timing:
        row["seconds"] = time.perf_counter() - t0
    return row


def run_bench(
    seed: int,
    cap: int,
    epsilon: float = 0.5,
    base_cap: int = config.BASE_CASE_CAP,
    c: float = config.CALIBRATION_C,
    timing: bool = False,
    threads: int | None = None,
) -> dict:
    """Run the corpus; rows come back in corpus order whatever the thread count.

    Raises ``SandwichViolation`` on the first instance (in corpus order)
    whose estimate leaves the guaranteed band.
    """
    instances = corpus.generate(seed, cap)
    workers = config.thread_count() if threads is None else max(1, threads)

    def one(inst):
        return run_instance(inst, epsilon, base_cap, c, timing)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(one, instances))
    else:
        rows = [one(inst) for inst in instances]

    for row, inst in zip(rows, instances):
        if not row["ok"]:
            raise SandwichViolation(row, inst)

    report = {
        "command": "bench",
        "version": __version__,
        "seed": seed,
        "cap": cap,
        "epsilon": epsilon,
        "base_cap": base_cap,
        "calib_c": c,
        "generator": "random.Random (MT19937)",
        "instances": len(rows),
        "rows": rows,
    }
    if timing:
        report["backend"] = kernels.BACKEND
    return report
