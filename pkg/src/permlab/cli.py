"""Command-line entry point.

Exit codes: 0 success, 2 unreadable input, 3 precondition or capacity error,
4 unconverged estimate (document still written), 5 bench bound violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path

from . import __version__, config
from .approx import (
    DecompositionBudgetError,
    HeuristicCertificateError,
    approx_permanent_expander,
    approx_permanent_general,
    corollary_bounds,
    select_activity,
)
from .bench import SandwichViolation, run_bench
from .exact import (
    ExactSizeError,
    NoPerfectMatchingError,
    max_matching,
    partition_function_exact,
    permanent_exact,
    ratio_diagnostics,
)
from .expansion import (
    Certified,
    ExpansionCapError,
    expansion_coefficient,
    find_alternating_path,
    path_length_yardstick,
    test_expansion,
)
from .graph import BipartiteGraph, GraphFormatError, Matching, format_edge_list, parse_graph_text
from .monomer_dimer import DecayParams, partition_function_cd

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_UNCONVERGED = 4
EXIT_VIOLATION = 5

MAX_DECIMAL_DIGITS = 400


class UsageError(ValueError):
    pass


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _finite(x):
    if x is None or isinstance(x, bool):
        return x
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _finite(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_finite(v) for v in x]
    return x


def decimal_from_log(log_value: float) -> str | None:
    """exp(log_value) as a plain decimal string, or None past 400 digits."""
    if log_value == -math.inf:
        return "0"
    if log_value / math.log(10) >= MAX_DECIMAL_DIGITS:
        return None
    with localcontext() as ctx:
        ctx.prec = 17
        value = Decimal(log_value).exp()
        text = format(value, "f")
    return text


def _document(command, raw, g, params, **fields) -> dict:
    doc = {
        "command": command,
        "version": __version__,
        "input_digest": "sha256:" + hashlib.sha256(raw).hexdigest(),
        "parameters": params,
        "n": g.n,
        "log_estimate": None,
        "estimate": None,
        "certified_log_interval": None,
        "guarantee_exponent": None,
        "exact": False,
        "converged": True,
        "timing": {"seconds": 0.0},
        "trace": None,
        "details": {},
    }
    doc.update(fields)
    return _finite(doc)


# commands ------------------------------------------------------------------


def cmd_exact(args, g, raw):
    perm = permanent_exact(g, args.exact_cap)
    log = math.log(perm) if perm else -math.inf
    return _document(
        "exact", raw, g, {"exact_cap": args.exact_cap},
        log_estimate=log,
        estimate=str(perm),
        certified_log_interval=[log, log] if perm else None,
        guarantee_exponent=0.0,
        exact=True,
    )


def cmd_approx(args, g, raw):
    params = {
        "epsilon": args.epsilon,
        "alpha": args.alpha,
        "lambda": args.lam,
        "depth": args.depth,
        "base_cap": args.base_cap,
        "calib_c": args.calib_c,
        "unsound_fast": args.unsound_fast,
        "mode": "expander" if args.expander else "general",
    }
    trace = None
    if args.expander:
        alpha = args.alpha
        if alpha is None:
            alpha = expansion_coefficient(g)
        res = approx_permanent_expander(
            g, args.epsilon, alpha, c=args.calib_c, lam=args.lam, depth=args.depth
        )
    else:
        res, root = approx_permanent_general(
            g,
            args.epsilon,
            base_cap=args.base_cap,
            c=args.calib_c,
            alpha=args.alpha,
            unsound_fast=args.unsound_fast,
            lam=args.lam,
            depth=args.depth,
        )
        trace = root.summary()
    details = {k: v for k, v in res.parameters.items() if k != "trace"}
    return _document(
        "approx", raw, g, params,
        log_estimate=res.log_estimate,
        estimate=str(res.exact_value) if res.exact else decimal_from_log(res.log_estimate),
        certified_log_interval=None if res.is_zero else list(res.log_interval),
        guarantee_exponent=res.guarantee_exponent,
        exact=res.exact,
        converged=res.converged,
        trace=trace,
        details=details,
    )


def cmd_zeta(args, g, raw):
    if args.lam is None:
        raise UsageError("zeta requires --lambda")
    z = partition_function_cd(g, args.lam, DecayParams(delta=args.delta, depth=args.depth))
    return _document(
        "zeta", raw, g, {"lambda": args.lam, "delta": args.delta, "depth": args.depth},
        log_estimate=z.log_value,
        estimate=decimal_from_log(z.log_value),
        certified_log_interval=[z.log_lo, z.log_hi],
        guarantee_exponent=z.width,
        converged=z.converged,
        details={"depth_reached": z.depth_reached, "factor_depths": list(z.factor_depths)},
    )


def _verdict_dict(v):
    if isinstance(v, Certified):
        return {"kind": v.kind, "alpha": v.alpha}
    return {
        "kind": v.kind,
        "alpha": v.alpha,
        "side": v.side.value,
        "subset": list(v.subset),
        "neighborhood_size": v.neighborhood_size,
        "hall_violation": v.hall_violation,
    }


def cmd_expansion(args, g, raw):
    alpha = args.alpha if args.alpha is not None else (g.n ** (-1 / 3) if g.n else 1.0)
    coeff = None
    if g.n <= config.EXPANSION_CAP:
        coeff = expansion_coefficient(g)
    verdict = test_expansion(g, alpha)
    return _document(
        "expansion", raw, g, {"alpha": alpha},
        details={"coefficient": coeff, "verdict": _verdict_dict(verdict)},
    )


def cmd_diagnose(args, g, raw):
    coeff = expansion_coefficient(g)
    alpha = args.alpha if args.alpha is not None else coeff
    delta = g.max_degree
    rows = ratio_diagnostics(
        g, alpha if alpha > 0 else 0.0, c=args.calib_c, cap=args.exact_cap, require_perfect=False
    )
    table = [
        {
            "k": r.k,
            "ratio": None if r.ratio is None else f"{r.ratio.numerator}/{r.ratio.denominator}",
            "ratio_float": None if r.ratio is None else float(r.ratio),
            "bound": r.bound,
            "exceeds": r.exceeds,
            "undefined": r.undefined,
        }
        for r in rows
    ]
    details = {"expansion_coefficient": coeff, "alpha": alpha, "max_degree": delta, "ratios": table}

    perm = permanent_exact(g, args.exact_cap)
    if perm and alpha > 0 and delta >= 1:
        lam = args.lam if args.lam is not None else select_activity(args.epsilon, alpha, delta, args.calib_c)
        z = partition_function_exact(g, Fraction(lam), args.exact_cap).value
        ratio = z / (Fraction(lam) ** g.n * perm)
        bounds = corollary_bounds(g.n, lam, alpha, delta, args.calib_c)
        details["corollary"] = {
            "lambda": lam,
            "log_ratio": math.log(ratio.numerator) - math.log(ratio.denominator),
            "lower": bounds.lower,
            "upper_log": bounds.upper_log,
            "formula_only": bounds.formula_only,
        }
        # alternating-path lengths from prefixes of one perfect matching
        full = sorted(max_matching(g).items())
        paths = []
        for k in range(g.n):
            m = Matching.of(full[:k])
            p = find_alternating_path(g, m)
            paths.append({
                "k": k,
                "length": None if p is None else p.length,
                "yardstick": path_length_yardstick(g.n, k, alpha, args.calib_c),
            })
        details["alternating_paths"] = paths
    return _document("diagnose", raw, g, {"alpha": alpha, "calib_c": args.calib_c}, details=details)


COMMANDS = {
    "exact": cmd_exact,
    "approx": cmd_approx,
    "zeta": cmd_zeta,
    "expansion": cmd_expansion,
    "diagnose": cmd_diagnose,
}


# argument parsing ---------------------------------------------------------


def _positive(kind):
    def conv(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return conv


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--epsilon", type=_positive(float), default=0.5)
    common.add_argument("--lambda", dest="lam", type=_positive(float), default=None)
    common.add_argument("--alpha", type=_positive(float), default=None)
    common.add_argument("--delta", type=_positive(float), default=0.05)
    common.add_argument("--depth", type=int, default=None)
    common.add_argument("--base-cap", type=_positive(int), default=config.BASE_CASE_CAP)
    common.add_argument("--exact-cap", type=_positive(int), default=config.EXACT_CAP)
    common.add_argument("--calib-c", type=_positive(float), default=config.CALIBRATION_C)
    common.add_argument("--unsound-fast", action="store_true")
    common.add_argument("--out", type=Path, default=None)

    p = argparse.ArgumentParser(prog="permlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("input", type=Path)
        if name == "approx":
            sp.add_argument("--expander", action="store_true",
                            help="skip decomposition; alpha defaults to the measured expansion")
    bp = sub.add_parser("bench", parents=[common])
    bp.add_argument("--seed", type=int, required=True)
    bp.add_argument("--cap", type=_positive(int), default=8)
    bp.add_argument("--timing", action="store_true", help="add wall times (breaks byte-identity)")
    return p


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _fail(code: int, message: str) -> int:
    print(f"permlab: {message}", file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "bench":
        if args.cap > args.exact_cap:
            return _fail(EXIT_PRECONDITION, f"bench cap {args.cap} exceeds exact cap {args.exact_cap}")
        try:
            report = run_bench(args.seed, args.cap, args.epsilon, args.base_cap, args.calib_c, args.timing)
        except SandwichViolation as exc:
            _emit(dumps(_finite({
                "command": "bench", "violation": exc.row,
                "instance": format_edge_list(exc.instance.graph),
            })), args.out)
            return _fail(EXIT_VIOLATION, str(exc))
        _emit(dumps(_finite(report)), args.out)
        return EXIT_OK

    try:
        raw = args.input.read_bytes()
        g = parse_graph_text(raw.decode("utf-8"))
    except (OSError, UnicodeDecodeError, GraphFormatError) as exc:
        return _fail(EXIT_PARSE, f"cannot read graph from {args.input}: {exc}")

    t0 = time.perf_counter()
    try:
        doc = COMMANDS[args.command](args, g, raw)
    except (ExactSizeError, ExpansionCapError, HeuristicCertificateError,
            DecompositionBudgetError, NoPerfectMatchingError, ValueError) as exc:
        return _fail(EXIT_PRECONDITION, str(exc))
    doc["timing"] = {"seconds": time.perf_counter() - t0}
    _emit(dumps(doc), args.out)
    if not doc["converged"]:
        return _fail(EXIT_UNCONVERGED, "estimate did not converge; bracket reported")
    return EXIT_OK


def load_schema() -> dict:
    return json.loads((Path(__file__).parent / "schema" / "result.schema.json").read_text())


if __name__ == "__main__":
    sys.exit(main())
